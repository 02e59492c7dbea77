#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#if defined(__x86_64__) || defined(_M_X64)
#define MAPMATCH_X86_64 1
#else
#define MAPMATCH_X86_64 0
#endif

namespace mapmatch::kern {

// Structure-of-arrays view of a polyline's segments. Built once per polyline;
// the projection kernels scan it instead of the point list.
//
// Segment i runs from (ax[i], ay[i]) with delta (dx[i], dy[i]), has length
// len[i] > 0, inv_len2[i] = 1 / (dx^2 + dy^2), and starts at arc length cum[i].
struct SegmentSoa {
  std::size_t size = 0;
  std::vector<double> ax, ay, dx, dy, len, inv_len2, cum;

  void reserve(std::size_t n) {
    ax.reserve(n);
    ay.reserve(n);
    dx.reserve(n);
    dy.reserve(n);
    len.reserve(n);
    inv_len2.reserve(n);
    cum.reserve(n);
  }
};

inline constexpr std::size_t kNoSegment = static_cast<std::size_t>(-1);

// Result of a min-distance scan: winning segment, clamped parameter t in
// [0, 1] along it, and squared distance from the query to the clamped point.
struct MinHit {
  std::size_t seg = kNoSegment;
  double t = 0.0;
  double dist2 = std::numeric_limits<double>::infinity();
};

// Projection of the query onto one segment, with the parameter clamped to
// [t_lo, 1]. This is the scalar reference for a single lane; every kernel
// variant must produce bit-identical (t, dist2) for t_lo = 0.
inline void project_one(const SegmentSoa& s, std::size_t i, double qx,
                        double qy, double t_lo, double& t_out,
                        double& d2_out) {
  const double rx = qx - s.ax[i];
  const double ry = qy - s.ay[i];
  double t = (rx * s.dx[i] + ry * s.dy[i]) * s.inv_len2[i];
  t = t < 1.0 ? t : 1.0;
  t = t > t_lo ? t : t_lo;
  const double px = s.ax[i] + t * s.dx[i];
  const double py = s.ay[i] + t * s.dy[i];
  const double ex = qx - px;
  const double ey = qy - py;
  t_out = t;
  d2_out = ex * ex + ey * ey;
}

// Scalar reference kernels. Scan segments [begin, end); ties on dist2 keep
// the smallest segment index.
MinHit project_min_scalar(const SegmentSoa& s, double qx, double qy,
                          std::size_t begin, std::size_t end);
void project_all_scalar(const SegmentSoa& s, double qx, double qy,
                        std::size_t begin, std::size_t end, double* t_out,
                        double* d2_out);

#if MAPMATCH_X86_64
// AVX2 variants, 4-wide double lanes. Compiled with -mavx2 but without
// -mfma so every lane performs the same IEEE mul/add/sub sequence as the
// scalar reference; results are bit-identical, including tie-breaking.
MinHit project_min_avx2(const SegmentSoa& s, double qx, double qy,
                        std::size_t begin, std::size_t end);
void project_all_avx2(const SegmentSoa& s, double qx, double qy,
                      std::size_t begin, std::size_t end, double* t_out,
                      double* d2_out);
#endif

enum class Isa { Scalar, Avx2 };

const char* isa_name(Isa isa);
bool avx2_supported();

// Currently dispatched implementation. The default is the best supported
// ISA; MAPMATCH_SIMD=scalar|avx2 in the environment overrides it at startup,
// set_isa() overrides it at runtime (returns false if unsupported).
Isa active_isa();
bool set_isa(Isa isa);

// Dispatched entry points.
MinHit project_min(const SegmentSoa& s, double qx, double qy,
                   std::size_t begin, std::size_t end);
void project_all(const SegmentSoa& s, double qx, double qy, std::size_t begin,
                 std::size_t end, double* t_out, double* d2_out);

}  // namespace mapmatch::kern

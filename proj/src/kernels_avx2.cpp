// AVX2 variants of the projection kernels. Built with -mavx2 only (no
// -mfma), so each lane runs the same IEEE mul/add/sub sequence as
// project_one and the results match the scalar reference bit for bit.

#include <immintrin.h>

#include <cstdint>

#include "mapmatch/kernels.hpp"

#if !MAPMATCH_X86_64
#error "this translation unit is x86-64 only"
#endif

namespace mapmatch::kern {

namespace {

// Per-lane (t, d2) for segments i..i+3.
inline void project4(const SegmentSoa& s, std::size_t i, __m256d qx,
                     __m256d qy, __m256d& t, __m256d& d2) {
  const __m256d ax = _mm256_loadu_pd(s.ax.data() + i);
  const __m256d ay = _mm256_loadu_pd(s.ay.data() + i);
  const __m256d dx = _mm256_loadu_pd(s.dx.data() + i);
  const __m256d dy = _mm256_loadu_pd(s.dy.data() + i);
  const __m256d il2 = _mm256_loadu_pd(s.inv_len2.data() + i);

  const __m256d rx = _mm256_sub_pd(qx, ax);
  const __m256d ry = _mm256_sub_pd(qy, ay);
  const __m256d dot = _mm256_add_pd(_mm256_mul_pd(rx, dx), _mm256_mul_pd(ry, dy));
  __m256d tt = _mm256_mul_pd(dot, il2);
  tt = _mm256_min_pd(tt, _mm256_set1_pd(1.0));
  tt = _mm256_max_pd(tt, _mm256_setzero_pd());

  const __m256d px = _mm256_add_pd(ax, _mm256_mul_pd(tt, dx));
  const __m256d py = _mm256_add_pd(ay, _mm256_mul_pd(tt, dy));
  const __m256d ex = _mm256_sub_pd(qx, px);
  const __m256d ey = _mm256_sub_pd(qy, py);

  t = tt;
  d2 = _mm256_add_pd(_mm256_mul_pd(ex, ex), _mm256_mul_pd(ey, ey));
}

}  // namespace

MinHit project_min_avx2(const SegmentSoa& s, double qx, double qy,
                        std::size_t begin, std::size_t end) {
  MinHit best;
  const std::size_t n = end > begin ? end - begin : 0;
  const std::size_t n4 = n & ~std::size_t{3};

  if (n4 != 0) {
    const __m256d vqx = _mm256_set1_pd(qx);
    const __m256d vqy = _mm256_set1_pd(qy);
    __m256d best_d2 = _mm256_set1_pd(best.dist2);
    __m256i best_idx = _mm256_set1_epi64x(-1);
    __m256i idx = _mm256_setr_epi64x(
        static_cast<long long>(begin), static_cast<long long>(begin + 1),
        static_cast<long long>(begin + 2), static_cast<long long>(begin + 3));
    const __m256i step = _mm256_set1_epi64x(4);

    for (std::size_t i = begin; i < begin + n4; i += 4) {
      __m256d t, d2;
      project4(s, i, vqx, vqy, t, d2);
      // Strict < keeps the first (smallest) index within each lane.
      const __m256d lt = _mm256_cmp_pd(d2, best_d2, _CMP_LT_OQ);
      best_d2 = _mm256_blendv_pd(best_d2, d2, lt);
      best_idx = _mm256_castpd_si256(_mm256_blendv_pd(
          _mm256_castsi256_pd(best_idx), _mm256_castsi256_pd(idx), lt));
      idx = _mm256_add_epi64(idx, step);
    }

    alignas(32) double lane_d2[4];
    alignas(32) std::int64_t lane_idx[4];
    _mm256_store_pd(lane_d2, best_d2);
    _mm256_store_si256(reinterpret_cast<__m256i*>(lane_idx), best_idx);
    // Lexicographic (d2, index) reduction reproduces the scalar scan's
    // first-occurrence tie-breaking.
    for (int lane = 0; lane < 4; ++lane) {
      if (lane_idx[lane] < 0) continue;
      const auto seg = static_cast<std::size_t>(lane_idx[lane]);
      if (lane_d2[lane] < best.dist2 ||
          (lane_d2[lane] == best.dist2 && seg < best.seg)) {
        best.dist2 = lane_d2[lane];
        best.seg = seg;
      }
    }
    if (best.seg != kNoSegment) {
      double t, d2;
      project_one(s, best.seg, qx, qy, 0.0, t, d2);
      best.t = t;
    }
  }

  for (std::size_t i = begin + n4; i < end; ++i) {
    double t, d2;
    project_one(s, i, qx, qy, 0.0, t, d2);
    if (d2 < best.dist2) {
      best.seg = i;
      best.t = t;
      best.dist2 = d2;
    }
  }
  return best;
}

void project_all_avx2(const SegmentSoa& s, double qx, double qy,
                      std::size_t begin, std::size_t end, double* t_out,
                      double* d2_out) {
  const std::size_t n = end > begin ? end - begin : 0;
  const std::size_t n4 = n & ~std::size_t{3};
  const __m256d vqx = _mm256_set1_pd(qx);
  const __m256d vqy = _mm256_set1_pd(qy);

  for (std::size_t k = 0; k < n4; k += 4) {
    __m256d t, d2;
    project4(s, begin + k, vqx, vqy, t, d2);
    _mm256_storeu_pd(t_out + k, t);
    _mm256_storeu_pd(d2_out + k, d2);
  }
  for (std::size_t k = n4; k < n; ++k) {
    project_one(s, begin + k, qx, qy, 0.0, t_out[k], d2_out[k]);
  }
}

}  // namespace mapmatch::kern

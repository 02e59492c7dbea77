#include "mapmatch/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace mapmatch::kern {

MinHit project_min_scalar(const SegmentSoa& s, double qx, double qy,
                          std::size_t begin, std::size_t end) {
  MinHit best;
  for (std::size_t i = begin; i < end; ++i) {
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

void project_all_scalar(const SegmentSoa& s, double qx, double qy,
                        std::size_t begin, std::size_t end, double* t_out,
                        double* d2_out) {
  for (std::size_t i = begin; i < end; ++i) {
    project_one(s, i, qx, qy, 0.0, t_out[i - begin], d2_out[i - begin]);
  }
}

bool avx2_supported() {
#if MAPMATCH_X86_64
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
  }
  return "?";
}

namespace {

using MinFn = MinHit (*)(const SegmentSoa&, double, double, std::size_t,
                         std::size_t);
using AllFn = void (*)(const SegmentSoa&, double, double, std::size_t,
                       std::size_t, double*, double*);

struct Dispatch {
  Isa isa = Isa::Scalar;
  MinFn min_fn = &project_min_scalar;
  AllFn all_fn = &project_all_scalar;
};

bool apply(Dispatch& d, Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      d = Dispatch{Isa::Scalar, &project_min_scalar, &project_all_scalar};
      return true;
    case Isa::Avx2:
#if MAPMATCH_X86_64
      if (avx2_supported()) {
        d = Dispatch{Isa::Avx2, &project_min_avx2, &project_all_avx2};
        return true;
      }
#endif
      return false;
  }
  return false;
}

Dispatch initial_dispatch() {
  Dispatch d;
  if (const char* env = std::getenv("MAPMATCH_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) return d;
    if (std::strcmp(env, "avx2") == 0 && apply(d, Isa::Avx2)) return d;
  }
  apply(d, Isa::Avx2);  // best supported; falls back to scalar
  return d;
}

Dispatch& dispatch() {
  static Dispatch d = initial_dispatch();
  return d;
}

}  // namespace

Isa active_isa() { return dispatch().isa; }

bool set_isa(Isa isa) { return apply(dispatch(), isa); }

MinHit project_min(const SegmentSoa& s, double qx, double qy,
                   std::size_t begin, std::size_t end) {
  return dispatch().min_fn(s, qx, qy, begin, end);
}

void project_all(const SegmentSoa& s, double qx, double qy, std::size_t begin,
                 std::size_t end, double* t_out, double* d2_out) {
  dispatch().all_fn(s, qx, qy, begin, end, t_out, d2_out);
}

}  // namespace mapmatch::kern

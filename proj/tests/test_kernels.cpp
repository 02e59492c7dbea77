#include <doctest.h>

#include <random>
#include <vector>

#include "mapmatch/geo.hpp"
#include "mapmatch/kernels.hpp"

using namespace mapmatch;

namespace {

kern::SegmentSoa random_soa(std::mt19937_64& rng, int n_pts) {
  std::uniform_real_distribution<double> step(-60.0, 60.0);
  std::vector<PlanePoint> pts{{step(rng), step(rng)}};
  while (static_cast<int>(pts.size()) < n_pts) {
    pts.push_back({pts.back().x + step(rng), pts.back().y + step(rng)});
  }
  return Polyline(std::move(pts)).soa();
}

}  // namespace

TEST_CASE("scalar kernel: empty range and single segment") {
  std::mt19937_64 rng(3);
  const kern::SegmentSoa soa = random_soa(rng, 5);
  const kern::MinHit none = kern::project_min_scalar(soa, 0, 0, 2, 2);
  CHECK(none.seg == kern::kNoSegment);
  const kern::MinHit one = kern::project_min_scalar(soa, 0, 0, 1, 2);
  CHECK(one.seg == 1);
}

TEST_CASE("scalar min equals scalar all + argmin") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-200.0, 200.0);
  for (int it = 0; it < 50; ++it) {
    const kern::SegmentSoa soa = random_soa(rng, 3 + it % 9);
    const double qx = d(rng), qy = d(rng);
    std::vector<double> t(soa.size), d2(soa.size);
    kern::project_all_scalar(soa, qx, qy, 0, soa.size, t.data(), d2.data());
    const kern::MinHit hit = kern::project_min_scalar(soa, qx, qy, 0, soa.size);
    std::size_t arg = 0;
    for (std::size_t i = 1; i < soa.size; ++i) {
      if (d2[i] < d2[arg]) arg = i;
    }
    CHECK(hit.seg == arg);
    CHECK(hit.t == t[arg]);
    CHECK(hit.dist2 == d2[arg]);
  }
}

#if MAPMATCH_X86_64
TEST_CASE("avx2 kernels match the scalar reference bit for bit") {
  if (!kern::avx2_supported()) {
    MESSAGE("avx2 not supported on this host, skipping");
    return;
  }
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> d(-300.0, 300.0);
  std::uniform_int_distribution<int> n_pts(2, 40);
  for (int it = 0; it < 300; ++it) {
    const kern::SegmentSoa soa = random_soa(rng, n_pts(rng));
    const double qx = d(rng), qy = d(rng);
    std::uniform_int_distribution<std::size_t> pick(0, soa.size);
    std::size_t b = pick(rng);
    std::size_t e = pick(rng);
    if (b > e) std::swap(b, e);

    const kern::MinHit s = kern::project_min_scalar(soa, qx, qy, b, e);
    const kern::MinHit v = kern::project_min_avx2(soa, qx, qy, b, e);
    CHECK(s.seg == v.seg);
    CHECK(s.t == v.t);
    CHECK(s.dist2 == v.dist2);

    if (e > b) {
      std::vector<double> ts(e - b), d2s(e - b), tv(e - b), d2v(e - b);
      kern::project_all_scalar(soa, qx, qy, b, e, ts.data(), d2s.data());
      kern::project_all_avx2(soa, qx, qy, b, e, tv.data(), d2v.data());
      for (std::size_t i = 0; i < e - b; ++i) {
        CHECK(ts[i] == tv[i]);
        CHECK(d2s[i] == d2v[i]);
      }
    }
  }
}

TEST_CASE("avx2 tie-breaking keeps the smallest segment index") {
  if (!kern::avx2_supported()) {
    MESSAGE("avx2 not supported on this host, skipping");
    return;
  }
  // A symmetric zigzag: the query is equidistant from many segments.
  std::vector<PlanePoint> pts;
  for (int i = 0; i <= 12; ++i) {
    pts.push_back({static_cast<double>(10 * i), i % 2 == 0 ? 0.0 : 10.0});
  }
  const kern::SegmentSoa soa = Polyline(std::move(pts)).soa();
  for (double qx : {5.0, 15.0, 25.0, 35.0, 60.0}) {
    const kern::MinHit s = kern::project_min_scalar(soa, qx, 5.0, 0, soa.size);
    const kern::MinHit v = kern::project_min_avx2(soa, qx, 5.0, 0, soa.size);
    CHECK(s.seg == v.seg);
    CHECK(s.dist2 == v.dist2);
  }
}
#endif

TEST_CASE("runtime dispatch switches implementations") {
  const kern::Isa original = kern::active_isa();
  CHECK(kern::set_isa(kern::Isa::Scalar));
  CHECK(kern::active_isa() == kern::Isa::Scalar);
  if (kern::avx2_supported()) {
    CHECK(kern::set_isa(kern::Isa::Avx2));
    CHECK(kern::active_isa() == kern::Isa::Avx2);
  } else {
    CHECK(!kern::set_isa(kern::Isa::Avx2));
  }
  kern::set_isa(original);
}

TEST_CASE("polyline results are identical under both ISAs") {
  if (!kern::avx2_supported()) {
    MESSAGE("avx2 not supported on this host, skipping");
    return;
  }
  const kern::Isa original = kern::active_isa();
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> step(-70.0, 70.0);
  std::uniform_real_distribution<double> d(-250.0, 250.0);
  for (int it = 0; it < 40; ++it) {
    std::vector<PlanePoint> pts{{0, 0}};
    for (int i = 0; i < 12; ++i) {
      pts.push_back({pts.back().x + step(rng), pts.back().y + step(rng)});
    }
    const Polyline line{pts};
    const PlanePoint q{d(rng), d(rng)};
    const double min_off = std::abs(d(rng));

    kern::set_isa(kern::Isa::Scalar);
    const Projection ps = line.project_constrained(q, min_off);
    const auto cs = line.candidate_projections(q, min_off, 150.0);
    kern::set_isa(kern::Isa::Avx2);
    const Projection pv = line.project_constrained(q, min_off);
    const auto cv = line.candidate_projections(q, min_off, 150.0);

    CHECK(ps.offset == pv.offset);
    CHECK(ps.distance == pv.distance);
    REQUIRE(cs.size() == cv.size());
    for (std::size_t i = 0; i < cs.size(); ++i) {
      CHECK(cs[i].offset == cv[i].offset);
      CHECK(cs[i].distance == cv[i].distance);
    }
  }
  kern::set_isa(original);
}

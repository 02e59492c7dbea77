#include "mapmatch/geo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mapmatch/errors.hpp"

namespace mapmatch {

PlanePoint to_local(GeoPoint p, GeoPoint origin) {
  const double k = kEarthRadiusM * kDegToRad;
  return {(p.lon - origin.lon) * std::cos(origin.lat * kDegToRad) * k,
          (p.lat - origin.lat) * k};
}

GeoPoint from_local(PlanePoint p, GeoPoint origin) {
  const double k = kEarthRadiusM * kDegToRad;
  return {origin.lat + p.y / k,
          origin.lon + p.x / (k * std::cos(origin.lat * kDegToRad))};
}

Polyline::Polyline(std::vector<PlanePoint> pts) {
  pts_.reserve(pts.size());
  for (const PlanePoint& p : pts) {
    if (!pts_.empty() && plane_dist2(pts_.back(), p) < kDuplicateEps * kDuplicateEps) {
      continue;
    }
    pts_.push_back(p);
  }
  if (pts_.size() < 2) {
    throw ValidationError("polyline needs at least 2 distinct points");
  }

  const std::size_t n = pts_.size() - 1;
  cum_.resize(pts_.size());
  cum_[0] = 0.0;
  soa_.reserve(n);
  soa_.size = n;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = pts_[i + 1].x - pts_[i].x;
    const double dy = pts_[i + 1].y - pts_[i].y;
    const double len2 = dx * dx + dy * dy;
    const double len = std::sqrt(len2);
    cum_[i + 1] = cum_[i] + len;
    soa_.ax.push_back(pts_[i].x);
    soa_.ay.push_back(pts_[i].y);
    soa_.dx.push_back(dx);
    soa_.dy.push_back(dy);
    soa_.len.push_back(len);
    soa_.inv_len2.push_back(1.0 / len2);
    soa_.cum.push_back(cum_[i]);
  }
}

void Polyline::segment_at(double offset, std::size_t& seg, double& t) const {
  const std::size_t n = segment_count();
  if (offset <= 0.0) {
    seg = 0;
    t = 0.0;
    return;
  }
  if (offset >= length()) {
    seg = n - 1;
    t = 1.0;
    return;
  }
  // First point with cum > offset; its predecessor starts the segment.
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), offset);
  seg = static_cast<std::size_t>(it - cum_.begin()) - 1;
  if (seg >= n) seg = n - 1;
  t = (offset - cum_[seg]) / soa_.len[seg];
  if (t < 0.0) t = 0.0;
  if (t > 1.0) t = 1.0;
}

PlanePoint Polyline::point_at(double offset) const {
  std::size_t seg;
  double t;
  segment_at(offset, seg, t);
  return {soa_.ax[seg] + t * soa_.dx[seg], soa_.ay[seg] + t * soa_.dy[seg]};
}

Projection Polyline::make_projection(std::size_t seg, double t,
                                     double d2) const {
  Projection p;
  p.point = {soa_.ax[seg] + t * soa_.dx[seg], soa_.ay[seg] + t * soa_.dy[seg]};
  p.offset = soa_.cum[seg] + t * soa_.len[seg];
  p.distance = std::sqrt(d2);
  return p;
}

Projection Polyline::project(PlanePoint q) const {
  return project_constrained(q, 0.0);
}

Projection Polyline::project_constrained(PlanePoint q,
                                         double min_offset) const {
  min_offset = std::clamp(min_offset, 0.0, length());
  std::size_t k;
  double t_floor;
  segment_at(min_offset, k, t_floor);

  // Segment k carries the feasibility floor; the rest scan unconstrained.
  double tk, d2k;
  kern::project_one(soa_, k, q.x, q.y, t_floor, tk, d2k);

  const kern::MinHit rest =
      kern::project_min(soa_, q.x, q.y, k + 1, segment_count());
  if (rest.dist2 < d2k) {
    return make_projection(rest.seg, rest.t, rest.dist2);
  }
  Projection p = make_projection(k, tk, d2k);
  // Rounding in t_floor = (min_offset - cum) / len can drop the boundary
  // hit an ulp short of the constraint; pin it.
  if (tk == t_floor && p.offset < min_offset) p.offset = min_offset;
  return p;
}

std::vector<Projection> Polyline::candidate_projections(PlanePoint q,
                                                        double min_offset,
                                                        double window) const {
  min_offset = std::clamp(min_offset, 0.0, length());
  const std::size_t n = segment_count();
  std::size_t k;
  double t_floor;
  segment_at(min_offset, k, t_floor);

  // Bulk per-segment clamped projections, then the feasibility floor on
  // segment k.
  std::vector<double> ts(n - k), d2s(n - k);
  kern::project_all(soa_, q.x, q.y, k, n, ts.data(), d2s.data());
  kern::project_one(soa_, k, q.x, q.y, t_floor, ts[0], d2s[0]);

  // The distance-to-q function along the polyline is convex per segment, so
  // its local minima are interior feet, the feasibility boundary when the
  // foot lies behind it, vertices where both incident segments clamp toward
  // each other, and the polyline end.
  std::vector<Projection> hits;
  std::size_t best = 0;
  for (std::size_t i = k; i < n; ++i) {
    const double t = ts[i - k];
    const double lo = i == k ? t_floor : 0.0;
    if (t == lo && i > k) continue;  // shared vertex, kept at segment i-1
    if (t == 1.0 && i + 1 < n && ts[i - k + 1] != 0.0) continue;
    Projection p = make_projection(i, t, d2s[i - k]);
    if (i == k && t == t_floor && p.offset < min_offset) p.offset = min_offset;
    hits.push_back(p);
    if (hits.back().distance < hits[best].distance) best = hits.size() - 1;
  }

  const double center = hits[best].offset;
  std::vector<Projection> out;
  for (std::size_t i = 0; i < hits.size(); ++i) {
    if (i == best || std::abs(hits[i].offset - center) <= window) {
      out.push_back(hits[i]);
    }
  }
  return out;
}

Polyline Polyline::reversed() const {
  std::vector<PlanePoint> rev(pts_.rbegin(), pts_.rend());
  return Polyline(std::move(rev));
}

}  // namespace mapmatch

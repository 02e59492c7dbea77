#pragma once

#include <cmath>
#include <vector>

#include "mapmatch/kernels.hpp"

namespace mapmatch {

// Mean Earth radius, meters.
inline constexpr double kEarthRadiusM = 6'371'000.0;
inline constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

// Consecutive polyline points closer than this collapse into one.
inline constexpr double kDuplicateEps = 1e-9;

struct GeoPoint {
  double lat = 0.0;  // degrees, WGS84
  double lon = 0.0;  // degrees, WGS84
};

struct PlanePoint {
  double x = 0.0;  // meters east of the local origin
  double y = 0.0;  // meters north of the local origin
};

inline double plane_dist2(PlanePoint a, PlanePoint b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

inline double plane_dist(PlanePoint a, PlanePoint b) {
  return std::sqrt(plane_dist2(a, b));
}

// Equirectangular local projection. Accurate to well under 0.1% at trace
// scale (tens of km), which is all the cost model needs.
PlanePoint to_local(GeoPoint p, GeoPoint origin);
GeoPoint from_local(PlanePoint p, GeoPoint origin);

// A point on a polyline: the point itself, its arc-length offset from the
// polyline start, and its distance from the query that produced it.
struct Projection {
  PlanePoint point;
  double offset = 0.0;    // meters along the polyline
  double distance = 0.0;  // meters from the query point
};

// Arc length between two projections on the same polyline.
inline double along_distance(const Projection& a, const Projection& b) {
  return std::abs(b.offset - a.offset);
}

// Planar polyline with precomputed cumulative arc lengths. Immutable after
// construction; consecutive duplicate points are collapsed, and fewer than
// two distinct points is a validation error.
class Polyline {
 public:
  explicit Polyline(std::vector<PlanePoint> pts);

  const std::vector<PlanePoint>& points() const { return pts_; }
  const std::vector<double>& cum_len() const { return cum_; }
  double length() const { return cum_.back(); }
  std::size_t segment_count() const { return pts_.size() - 1; }
  const kern::SegmentSoa& soa() const { return soa_; }

  // Point at the given arc length (clamped to [0, length]).
  PlanePoint point_at(double offset) const;

  // Globally nearest projection; ties broken by smallest offset.
  Projection project(PlanePoint q) const;

  // Nearest projection among points with offset >= min_offset (the
  // chronological constraint). The point at exactly min_offset is always
  // feasible, so this is total.
  Projection project_constrained(PlanePoint q, double min_offset) const;

  // The constrained nearest projection plus every other local minimum of the
  // constrained distance function whose offset lies within +-window (arc
  // length) of it. Ascending offset; the list always contains the
  // constrained nearest projection.
  std::vector<Projection> candidate_projections(PlanePoint q,
                                                double min_offset,
                                                double window) const;

  double distance_to(PlanePoint q) const { return project(q).distance; }

  Polyline reversed() const;

 private:
  // Segment index k containing the offset and the parameter within it.
  void segment_at(double offset, std::size_t& seg, double& t) const;

  Projection make_projection(std::size_t seg, double t, double d2) const;

  std::vector<PlanePoint> pts_;
  std::vector<double> cum_;  // per point, cum_[0] = 0
  kern::SegmentSoa soa_;
};

}  // namespace mapmatch

// Independent oracles for the test suites. Deliberately brute force: fine
// arc-length sampling, exhaustive path/sequence enumeration, linear scans.
// Nothing here may call the code paths it is used to check.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "mapmatch/geo.hpp"
#include "mapmatch/network.hpp"

namespace oracles {

inline double haversine_m(mapmatch::GeoPoint a, mapmatch::GeoPoint b) {
  const double lat1 = a.lat * mapmatch::kDegToRad;
  const double lat2 = b.lat * mapmatch::kDegToRad;
  const double dlat = lat2 - lat1;
  const double dlon = (b.lon - a.lon) * mapmatch::kDegToRad;
  const double s = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(lat1) * std::cos(lat2) * std::sin(dlon / 2) *
                       std::sin(dlon / 2);
  return 2.0 * mapmatch::kEarthRadiusM * std::asin(std::sqrt(s));
}

struct SampledProjection {
  double offset;
  double distance;
};

// Nearest point by scanning the polyline at a fine arc-length step,
// restricted to offsets >= min_offset.
inline SampledProjection sampled_project(const mapmatch::Polyline& line,
                                         mapmatch::PlanePoint q,
                                         double min_offset, double step) {
  SampledProjection best{0.0, std::numeric_limits<double>::infinity()};
  const double total = line.length();
  for (double s = min_offset; s <= total + step / 2; s += step) {
    const double off = std::min(s, total);
    const double d = mapmatch::plane_dist(q, line.point_at(off));
    if (d < best.distance) best = {off, d};
  }
  return best;
}

// Local minima of the sampled distance function (offsets >= min_offset),
// merged when closer than merge_tol in arc length.
inline std::vector<SampledProjection> sampled_local_minima(
    const mapmatch::Polyline& line, mapmatch::PlanePoint q, double min_offset,
    double step, double merge_tol) {
  std::vector<double> offs;
  std::vector<double> dist;
  const double total = line.length();
  for (double s = min_offset; s <= total + step / 2; s += step) {
    const double off = std::min(s, total);
    offs.push_back(off);
    dist.push_back(mapmatch::plane_dist(q, line.point_at(off)));
    if (off == total) break;
  }
  std::vector<SampledProjection> mins;
  for (std::size_t i = 0; i < offs.size(); ++i) {
    const bool left_ok = i == 0 || dist[i] <= dist[i - 1];
    const bool right_ok = i + 1 == offs.size() || dist[i] <= dist[i + 1];
    if (left_ok && right_ok) {
      if (!mins.empty() && offs[i] - mins.back().offset < merge_tol) {
        if (dist[i] < mins.back().distance) mins.back() = {offs[i], dist[i]};
        continue;
      }
      mins.push_back({offs[i], dist[i]});
    }
  }
  return mins;
}

// All edges whose geometry passes within radius of q, by linear scan.
inline std::vector<mapmatch::EdgeId> linear_edges_within(
    const mapmatch::RoadNetwork& net, mapmatch::PlanePoint q, double radius) {
  std::vector<mapmatch::EdgeId> out;
  for (const mapmatch::Edge& e : net.edges()) {
    double best = std::numeric_limits<double>::infinity();
    const auto& pts = e.geom.points();
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      const double dx = pts[i + 1].x - pts[i].x;
      const double dy = pts[i + 1].y - pts[i].y;
      const double len2 = dx * dx + dy * dy;
      double t = len2 > 0 ? ((q.x - pts[i].x) * dx + (q.y - pts[i].y) * dy) /
                                len2
                          : 0.0;
      t = std::clamp(t, 0.0, 1.0);
      best = std::min(best, mapmatch::plane_dist(
                                q, {pts[i].x + t * dx, pts[i].y + t * dy}));
    }
    if (best <= radius) out.push_back(e.id);
  }
  return out;
}

// Every simple node path from one node to another (from == to yields simple
// cycles), as edge-id sequences.
inline std::vector<std::vector<mapmatch::EdgeId>> all_simple_paths(
    const mapmatch::RoadNetwork& net, mapmatch::NodeId from,
    mapmatch::NodeId to, std::size_t max_edges) {
  std::vector<std::vector<mapmatch::EdgeId>> out;
  std::vector<mapmatch::EdgeId> cur;
  std::vector<bool> visited(net.node_count(), false);
  std::function<void(std::uint32_t)> dfs = [&](std::uint32_t node) {
    if (cur.size() >= max_edges) return;
    visited[node] = true;
    for (std::uint32_t eidx : net.out_edge_indices(node)) {
      const mapmatch::Edge& e = net.edge_at(eidx);
      const std::uint32_t next = net.node_index(e.to);
      cur.push_back(e.id);
      if (e.to == to) {
        out.push_back(cur);
      } else if (!visited[next]) {
        dfs(next);
      }
      cur.pop_back();
    }
    visited[node] = false;
  };
  dfs(net.node_index(from));
  return out;
}

}  // namespace oracles

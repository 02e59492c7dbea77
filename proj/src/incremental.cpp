#include "mapmatch/incremental.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mapmatch/errors.hpp"

namespace mapmatch::incremental {

double distance_score(double d, const Config& cfg) {
  return cfg.mu_d - cfg.a * std::pow(d, cfg.n_d);
}

double orientation_score(double theta, const Config& cfg) {
  if (theta > std::acos(-1.0) / 2.0) return 0.0;
  return cfg.mu_alpha * std::pow(std::cos(theta), cfg.n_alpha);
}

namespace {

double angle_between(PlanePoint a, PlanePoint b) {
  const double na = std::sqrt(a.x * a.x + a.y * a.y);
  const double nb = std::sqrt(b.x * b.x + b.y * b.y);
  if (na <= 0.0 || nb <= 0.0) return 0.0;  // degenerate: treat as aligned
  const double c = std::clamp((a.x * b.x + a.y * b.y) / (na * nb), -1.0, 1.0);
  return std::acos(c);
}

PlanePoint chord(const RoadNetwork& net, const Edge& e) {
  const PlanePoint a = net.node(e.from).pos;
  const PlanePoint b = net.node(e.to).pos;
  return {b.x - a.x, b.y - a.y};
}

// Immediate fit of an edge for measurement i.
double base_score(const RoadNetwork& net, const Edge& e,
                  const std::vector<PlanePoint>& pts, std::size_t i,
                  const Config& cfg) {
  const PlanePoint dir = {pts[i].x - pts[i - 1].x, pts[i].y - pts[i - 1].y};
  const double d = e.geom.distance_to(pts[i]);
  return distance_score(d, cfg) +
         orientation_score(angle_between(dir, chord(net, e)), cfg);
}

// Best achievable score over the next `depth` measurements continuing from
// `e` (stay or advance at each step).
double lookahead(const RoadNetwork& net, const Edge& e,
                 const std::vector<PlanePoint>& pts, std::size_t next,
                 int depth, const Config& cfg) {
  if (depth <= 0 || next >= pts.size()) return 0.0;
  double best = -std::numeric_limits<double>::infinity();
  const auto consider = [&](const Edge& cand) {
    const double v = base_score(net, cand, pts, next, cfg) +
                     lookahead(net, cand, pts, next + 1, depth - 1, cfg);
    best = std::max(best, v);
  };
  consider(e);
  for (EdgeId id : net.out_edges(e.to)) consider(net.edge(id));
  return best;
}

}  // namespace

MatchPath match(const RoadNetwork& net, const Trace& tr, const Config& cfg) {
  const GeoPoint origin = net.origin();
  std::vector<PlanePoint> pts;
  pts.reserve(tr.size());
  for (const Measurement& m : tr.measurements()) {
    pts.push_back(to_local(m.pos, origin));
  }

  // Initial edge: best distance score within the start radius.
  const std::vector<EdgeId> start = net.edges_within(pts[0], cfg.start_radius);
  if (start.empty()) {
    throw MatchFailure(0, "no edge within " +
                              std::to_string(cfg.start_radius) +
                              " m of measurement 0");
  }
  EdgeId current = start[0];
  double best_d = std::numeric_limits<double>::infinity();
  for (EdgeId id : start) {
    const double d = net.edge(id).geom.distance_to(pts[0]);
    if (d < best_d || (d == best_d && id < current)) {
      best_d = d;
      current = id;
    }
  }

  MatchPath path;
  path.edges.push_back(current);
  int skipped = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const Edge& cur = net.edge(current);

    // Candidates: stay on the current edge or take one leaving its end.
    std::vector<EdgeId> cands;
    cands.push_back(current);
    for (EdgeId id : net.out_edges(cur.to)) cands.push_back(id);

    EdgeId committed = current;
    double committed_value = -std::numeric_limits<double>::infinity();
    double committed_base = 0.0;
    for (EdgeId id : cands) {
      const Edge& e = net.edge(id);
      const double base = base_score(net, e, pts, i, cfg);
      const double value =
          base + lookahead(net, e, pts, i + 1, cfg.lookahead_depth - 1, cfg);
      // Prefer staying put, then smaller id, on exact ties.
      const bool better =
          value > committed_value ||
          (value == committed_value && id != current &&
           committed != current && id < committed);
      if (better) {
        committed = id;
        committed_value = value;
        committed_base = base;
      }
    }

    if (committed_base <= 0.0) {
      // Unabsorbable measurement; the chain survives max_skipped of these.
      if (++skipped > cfg.max_skipped) {
        throw MatchFailure(i, "measurement " + std::to_string(i) +
                                  ": more than " +
                                  std::to_string(cfg.max_skipped) +
                                  " consecutive measurements unmatched");
      }
      continue;
    }
    skipped = 0;
    if (committed != current) {
      current = committed;
      path.edges.push_back(committed);
    }
  }
  return path;
}

}  // namespace mapmatch::incremental

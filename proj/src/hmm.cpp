#include "mapmatch/hmm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <queue>

#include "mapmatch/errors.hpp"
#include "mapmatch/log.hpp"

namespace mapmatch::hmm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double emission_logp(double d, double sigma) {
  const double z = d / sigma;
  return -0.5 * z * z - std::log(sigma * std::sqrt(2.0 * std::numbers::pi));
}

double transition_logp(double d_straight, double d_route, double beta_t) {
  const double delta = std::abs(d_route - d_straight);
  return -delta / beta_t - std::log(beta_t);
}

std::vector<Candidate> candidates_for(const RoadNetwork& net, PlanePoint q,
                                      double radius) {
  std::vector<EdgeId> ids = net.edges_within(q, radius);
  std::sort(ids.begin(), ids.end());
  std::vector<Candidate> out;
  out.reserve(ids.size());
  for (EdgeId id : ids) {
    const Edge& e = net.edge(id);
    const Projection p = e.geom.project(q);
    out.push_back({id, p.point, p.offset, 0.0});
  }
  return out;
}

namespace {

// Node-to-node shortest path by edge length, truncated at budget. Fills
// parent edges for path recovery. Returns +inf when out of budget.
double node_dijkstra(const RoadNetwork& net, std::uint32_t src,
                     std::uint32_t dst, double budget,
                     std::vector<std::uint32_t>* parent_edge) {
  if (budget < 0.0) return kInf;
  if (src == dst) return 0.0;
  struct Entry {
    double dist;
    std::uint32_t node;
    bool operator>(const Entry& o) const { return dist > o.dist; }
  };
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> pq;
  std::vector<double> dist(net.node_count(), kInf);
  if (parent_edge != nullptr) {
    parent_edge->assign(net.node_count(), static_cast<std::uint32_t>(-1));
  }
  dist[src] = 0.0;
  pq.push({0.0, src});
  while (!pq.empty()) {
    const Entry top = pq.top();
    pq.pop();
    if (top.dist > dist[top.node]) continue;
    if (top.dist > budget) return kInf;
    if (top.node == dst) return top.dist;
    for (std::uint32_t eidx : net.out_edge_indices(top.node)) {
      const Edge& e = net.edge_at(eidx);
      const std::uint32_t to = net.node_index(e.to);
      const double nd = top.dist + e.length;
      if (nd < dist[to] && nd <= budget) {
        dist[to] = nd;
        if (parent_edge != nullptr) (*parent_edge)[to] = eidx;
        pq.push({nd, to});
      }
    }
  }
  return kInf;
}

}  // namespace

std::vector<EdgeId> route_between(const RoadNetwork& net, const Candidate& a,
                                  const Candidate& b, double cap,
                                  double* dist_out) {
  const auto fail = [&]() {
    if (dist_out != nullptr) *dist_out = kInf;
    return std::vector<EdgeId>{};
  };

  if (a.edge == b.edge && b.offset_on_edge >= a.offset_on_edge) {
    const double d = b.offset_on_edge - a.offset_on_edge;
    if (d > cap) return fail();
    if (dist_out != nullptr) *dist_out = d;
    return {a.edge};
  }

  const Edge& ea = net.edge(a.edge);
  const Edge& eb = net.edge(b.edge);
  const double suffix = ea.length - a.offset_on_edge;
  const double prefix = b.offset_on_edge;
  const double budget = cap - suffix - prefix;

  std::vector<std::uint32_t> parents;
  const double mid = node_dijkstra(net, net.node_index(ea.to),
                                   net.node_index(eb.from), budget, &parents);
  if (!std::isfinite(mid)) return fail();

  std::vector<EdgeId> chain;
  for (std::uint32_t cur = net.node_index(eb.from);
       cur != net.node_index(ea.to);) {
    const std::uint32_t eidx = parents[cur];
    chain.push_back(net.edge_at(eidx).id);
    cur = net.node_index(net.edge_at(eidx).from);
  }
  std::reverse(chain.begin(), chain.end());

  std::vector<EdgeId> out;
  out.reserve(chain.size() + 2);
  out.push_back(a.edge);
  out.insert(out.end(), chain.begin(), chain.end());
  out.push_back(b.edge);
  if (dist_out != nullptr) *dist_out = suffix + mid + prefix;
  return out;
}

double route_distance(const RoadNetwork& net, const Candidate& a,
                      const Candidate& b, double cap) {
  double d = kInf;
  route_between(net, a, b, cap, &d);
  return d;
}

namespace {

double cap_for(const Config& cfg, double straight) {
  return cfg.route_search_cap > 0.0 ? cfg.route_search_cap
                                    : straight * 10.0 + 2000.0;
}

}  // namespace

MatchPath match(const RoadNetwork& net, const Trace& tr, const Config& cfg) {
  const GeoPoint origin = net.origin();

  // Lattice columns; measurements with no candidate in radius drop out.
  std::vector<std::vector<Candidate>> cols;
  std::vector<std::size_t> col_meas;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const PlanePoint q = to_local(tr.measurements()[i].pos, origin);
    std::vector<Candidate> cands =
        candidates_for(net, q, cfg.candidate_radius);
    if (cands.empty()) {
      logging::logf(logging::Level::Debug,
                    "hmm: measurement %zu has no candidate within %.1f m, "
                    "skipping",
                    i, cfg.candidate_radius);
      continue;
    }
    for (Candidate& c : cands) {
      c.emission_logp = emission_logp(plane_dist(q, c.point), cfg.sigma);
    }
    cols.push_back(std::move(cands));
    col_meas.push_back(i);
  }
  if (cols.empty()) {
    throw NoViableSequence("no measurement has a candidate within " +
                           std::to_string(cfg.candidate_radius) + " m");
  }

  // Viterbi. Ties keep the smallest candidate index at every stage.
  std::vector<std::vector<double>> score(cols.size());
  std::vector<std::vector<int>> from(cols.size());
  score[0].resize(cols[0].size());
  from[0].assign(cols[0].size(), -1);
  for (std::size_t k = 0; k < cols[0].size(); ++k) {
    score[0][k] = cols[0][k].emission_logp;
  }
  for (std::size_t j = 1; j < cols.size(); ++j) {
    score[j].assign(cols[j].size(), -kInf);
    from[j].assign(cols[j].size(), -1);
    bool any = false;
    for (std::size_t k = 0; k < cols[j].size(); ++k) {
      const Candidate& cur = cols[j][k];
      double best = -kInf;
      int arg = -1;
      for (std::size_t p = 0; p < cols[j - 1].size(); ++p) {
        if (score[j - 1][p] == -kInf) continue;
        const Candidate& prev = cols[j - 1][p];
        const double straight = plane_dist(prev.point, cur.point);
        const double route =
            route_distance(net, prev, cur, cap_for(cfg, straight));
        if (!std::isfinite(route)) continue;  // pruned transition
        const double s = score[j - 1][p] +
                         transition_logp(straight, route, cfg.beta_t);
        if (s > best) {
          best = s;
          arg = static_cast<int>(p);
        }
      }
      if (arg >= 0) {
        score[j][k] = best + cur.emission_logp;
        from[j][k] = arg;
        any = true;
      }
    }
    if (!any) {
      throw NoViableSequence(
          "all transitions pruned at measurement " +
          std::to_string(col_meas[j]));
    }
  }

  int best_k = 0;
  for (std::size_t k = 1; k < cols.back().size(); ++k) {
    if (score.back()[k] > score.back()[best_k]) best_k = static_cast<int>(k);
  }
  std::vector<int> picks(cols.size());
  picks.back() = best_k;
  for (std::size_t j = cols.size() - 1; j > 0; --j) {
    picks[j - 1] = from[j][picks[j]];
  }

  // Stitch the selected candidates with their route paths.
  MatchPath path;
  path.edges.push_back(cols[0][picks[0]].edge);
  for (std::size_t j = 1; j < cols.size(); ++j) {
    const Candidate& a = cols[j - 1][picks[j - 1]];
    const Candidate& b = cols[j][picks[j]];
    const double straight = plane_dist(a.point, b.point);
    const std::vector<EdgeId> hop =
        route_between(net, a, b, cap_for(cfg, straight));
    for (EdgeId id : hop) {
      if (path.edges.empty() || path.edges.back() != id) {
        path.edges.push_back(id);
      }
    }
  }

  // A measurement exactly on a node ties every incident edge; if the chosen
  // end candidate sits at the very end (start) of its edge, zero meters of
  // that edge were driven and it drops from the path.
  const Candidate& first = cols.front()[picks.front()];
  if (path.edges.size() > 1 &&
      net.edge(first.edge).length - first.offset_on_edge < 1e-6) {
    path.edges.erase(path.edges.begin());
  }
  const Candidate& last = cols.back()[picks.back()];
  if (path.edges.size() > 1 && last.offset_on_edge < 1e-6) {
    path.edges.pop_back();
  }
  return path;
}

}  // namespace mapmatch::hmm

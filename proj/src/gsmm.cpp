#include "mapmatch/gsmm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>

#include "mapmatch/errors.hpp"

namespace mapmatch::gsmm {

namespace {

constexpr double kScoreTie = 1e-6;  // meters; near-tie band for Eq. 1 scores

struct ScoredEdge {
  double score;
  double heading;       // cosine alignment with the relevant trace segment
  double anchor_offset;  // where the measurement projects along the edge
  EdgeId id;
};

PlanePoint direction(PlanePoint a, PlanePoint b) {
  return {b.x - a.x, b.y - a.y};
}

double cosine(PlanePoint a, PlanePoint b) {
  const double na = std::sqrt(a.x * a.x + a.y * a.y);
  const double nb = std::sqrt(b.x * b.x + b.y * b.y);
  if (na <= 0.0 || nb <= 0.0) return 0.0;
  return (a.x * b.x + a.y * b.y) / (na * nb);
}

// Exact Eq. 1 scores rarely tie, but a trace that starts or ends exactly on
// a node makes every incident edge score ~0. Near-ties resolve by heading
// agreement with the trace there, then by where the measurement sits on the
// edge (near its start for the initial edge, near its end for the
// destination), then by id.
EdgeId pick_best(std::vector<ScoredEdge>& scored, bool prefer_late_anchor) {
  const double best =
      std::min_element(scored.begin(), scored.end(), [](auto& a, auto& b) {
        return a.score < b.score;
      })->score;
  const ScoredEdge* pick = nullptr;
  const auto anchor_key = [&](const ScoredEdge& s) {
    return prefer_late_anchor ? -s.anchor_offset : s.anchor_offset;
  };
  for (const ScoredEdge& s : scored) {
    if (s.score > best + kScoreTie) continue;
    if (pick == nullptr) {
      pick = &s;
      continue;
    }
    if (s.heading > pick->heading + 1e-12) {
      pick = &s;
    } else if (std::abs(s.heading - pick->heading) <= 1e-12) {
      if (anchor_key(s) < anchor_key(*pick) - kScoreTie ||
          (std::abs(anchor_key(s) - anchor_key(*pick)) <= kScoreTie &&
           s.id < pick->id)) {
        pick = &s;
      }
    }
  }
  return pick->id;
}

}  // namespace

EdgeId select_initial_edge(const RoadNetwork& net, const TraceLinestring& ts,
                           PlanePoint first, double radius) {
  const std::vector<EdgeId> cands = net.edges_within(first, radius);
  if (cands.empty()) {
    throw NoCandidateEdge("no edge within " + std::to_string(radius) +
                          " m of the trace start");
  }
  const PlanePoint dir =
      direction(ts.line.points()[0], ts.line.points()[1]);
  std::vector<ScoredEdge> scored;
  scored.reserve(cands.size());
  for (EdgeId id : cands) {
    const Edge& e = net.edge(id);
    const Projection on_edge = e.geom.project(first);
    const double score =
        on_edge.distance + ts.line.distance_to(net.node(e.to).pos);
    const PlanePoint chord =
        direction(net.node(e.from).pos, net.node(e.to).pos);
    scored.push_back({score, cosine(dir, chord), on_edge.offset, id});
  }
  return pick_best(scored, /*prefer_late_anchor=*/false);
}

EdgeId select_destination_edge(const RoadNetwork& net,
                               const TraceLinestring& ts, PlanePoint last,
                               double radius) {
  const std::vector<EdgeId> cands = net.edges_within(last, radius);
  if (cands.empty()) {
    throw NoCandidateEdge("no edge within " + std::to_string(radius) +
                          " m of the trace end");
  }
  const auto& pts = ts.line.points();
  const PlanePoint dir = direction(pts[pts.size() - 2], pts.back());
  std::vector<ScoredEdge> scored;
  scored.reserve(cands.size());
  for (EdgeId id : cands) {
    const Edge& e = net.edge(id);
    const Projection on_edge = e.geom.project(last);
    const double score =
        on_edge.distance + ts.line.distance_to(net.node(e.from).pos);
    const PlanePoint chord =
        direction(net.node(e.from).pos, net.node(e.to).pos);
    scored.push_back({score, cosine(dir, chord), on_edge.offset, id});
  }
  return pick_best(scored, /*prefer_late_anchor=*/true);
}

EdgeCost edge_cost(const RoadNetwork& net, const Edge& edge,
                   const SearchLabel& current, const TraceLinestring& ts,
                   const Config& cfg) {
  const PlanePoint to_pos = net.node(edge.to).pos;
  const std::vector<Projection> cands = ts.line.candidate_projections(
      to_pos, current.proj_offset, cfg.candidate_window);

  // c2 shares only the chronological constraint, not the candidate window.
  const PlanePoint mid = edge.geom.point_at(edge.length * 0.5);
  const double c2 =
      ts.line.project_constrained(mid, current.proj_offset).distance;

  EdgeCost best;
  best.cost = std::numeric_limits<double>::infinity();
  for (const Projection& cand : cands) {
    const double along = cand.offset - current.proj_offset;
    const double c1 = cand.distance;
    const double c3 = std::abs(edge.length - along);
    const double cf =
        step_cost(c1, c2, c3, edge.length, along, cfg.alpha, cfg.beta);
    if (cf < best.cost) {
      best.cost = cf;
      best.projection = cand;
    }
  }
  return best;
}

namespace {

struct QueueEntry {
  double cost;
  std::uint64_t seq;  // FIFO tie-break for equal priorities
  std::uint32_t node;
  std::uint32_t parent_node;
  std::uint32_t parent_edge;
  double proj_offset;
};

struct QueueOrder {
  bool operator()(const QueueEntry& a, const QueueEntry& b) const {
    if (a.cost != b.cost) return a.cost > b.cost;
    return a.seq > b.seq;
  }
};

constexpr std::uint32_t kNone = static_cast<std::uint32_t>(-1);

struct Settled {
  double cost = 0.0;
  double proj_offset = 0.0;
  std::uint32_t parent_node = kNone;
  std::uint32_t parent_edge = kNone;
};

}  // namespace

MatchResult match(const RoadNetwork& net, const Trace& tr,
                  const Config& cfg) {
  const TraceLinestring ts = build_linestring(tr, net.origin());
  const PlanePoint first = to_local(tr.front().pos, net.origin());
  const PlanePoint last = to_local(tr.back().pos, net.origin());

  const EdgeId init_id =
      select_initial_edge(net, ts, first, cfg.start_radius);
  const EdgeId dest_id =
      select_destination_edge(net, ts, last, cfg.start_radius);
  const Edge& e_init = net.edge(init_id);
  const Edge& e_dest = net.edge(dest_id);

  // The start label: the initial edge's from-node, pinned at its nearest
  // projection, cost 0, no parent.
  SearchLabel start;
  start.node = e_init.from;
  start.cost = 0.0;
  start.proj_offset = ts.line.project(net.node(e_init.from).pos).offset;

  MatchResult result;
  const EdgeCost first_step = edge_cost(net, e_init, start, ts, cfg);

  if (init_id == dest_id) {
    result.path.edges = {init_id};
    result.cost = first_step.cost;
    result.offsets = {start.proj_offset, first_step.projection.offset};
    return result;
  }

  // The output must start with the initial edge and end with the
  // destination edge, so the search runs between them: seeded across the
  // initial edge, stopped at the destination edge's from-node.
  const std::uint32_t seed_node = net.node_index(e_init.to);
  const std::uint32_t goal_node = net.node_index(e_dest.from);

  std::priority_queue<QueueEntry, std::vector<QueueEntry>, QueueOrder> queue;
  std::vector<Settled> settled(net.node_count());
  std::vector<bool> closed(net.node_count(), false);
  std::uint64_t seq = 0;

  queue.push({first_step.cost, seq++, seed_node, kNone,
              net.edge_index(init_id), first_step.projection.offset});

  bool found = false;
  while (!queue.empty()) {
    const QueueEntry top = queue.top();
    queue.pop();
    if (closed[top.node]) continue;
    closed[top.node] = true;
    settled[top.node] = {top.cost, top.proj_offset, top.parent_node,
                         top.parent_edge};
    ++result.expansions;
    if (top.node == goal_node) {
      found = true;
      break;
    }
    SearchLabel label;
    label.node = net.node_at(top.node).id;
    label.cost = top.cost;
    label.proj_offset = top.proj_offset;
    for (std::uint32_t eidx : net.out_edge_indices(top.node)) {
      const Edge& e = net.edge_at(eidx);
      const std::uint32_t to_idx = net.node_index(e.to);
      if (closed[to_idx]) continue;
      const EdgeCost step = edge_cost(net, e, label, ts, cfg);
      queue.push({top.cost + step.cost, seq++, to_idx, top.node, eidx,
                  step.projection.offset});
    }
  }
  if (!found) {
    throw Unreachable("destination node " + std::to_string(e_dest.from) +
                      " not reachable from start node " +
                      std::to_string(e_init.from));
  }

  // Final fixed hop across the destination edge.
  SearchLabel at_goal;
  at_goal.node = net.node_at(goal_node).id;
  at_goal.cost = settled[goal_node].cost;
  at_goal.proj_offset = settled[goal_node].proj_offset;
  const EdgeCost last_step = edge_cost(net, e_dest, at_goal, ts, cfg);

  std::vector<EdgeId> edges;
  std::vector<double> offsets;
  edges.push_back(dest_id);
  offsets.push_back(last_step.projection.offset);
  for (std::uint32_t cur = goal_node; cur != kNone;
       cur = settled[cur].parent_node) {
    edges.push_back(net.edge_at(settled[cur].parent_edge).id);
    offsets.push_back(settled[cur].proj_offset);
  }
  offsets.push_back(start.proj_offset);
  std::reverse(edges.begin(), edges.end());
  std::reverse(offsets.begin(), offsets.end());

  result.path.edges = std::move(edges);
  result.cost = settled[goal_node].cost + last_step.cost;
  result.offsets = std::move(offsets);
  return result;
}

MatchResult match_full(const RoadNetwork& net, const Trace& tr,
                       const Config& cfg, double net_scale) {
  const std::vector<Trace> parts = split_self_intersecting(tr, net_scale);
  if (parts.size() == 1) {
    return match(net, tr, cfg);
  }
  MatchResult out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    MatchResult part = [&]() {
      try {
        return match(net, parts[i], cfg);
      } catch (const NoCandidateEdge& e) {
        throw NoCandidateEdge("part " + std::to_string(i) + ": " + e.what());
      } catch (const Unreachable& e) {
        throw Unreachable("part " + std::to_string(i) + ": " + e.what());
      }
    }();
    std::size_t from = 0;
    if (!out.path.edges.empty() && !part.path.edges.empty() &&
        out.path.edges.back() == part.path.edges.front()) {
      from = 1;  // shared boundary edge
    }
    out.path.edges.insert(out.path.edges.end(),
                          part.path.edges.begin() + from,
                          part.path.edges.end());
    out.offsets.insert(out.offsets.end(), part.offsets.begin() + from,
                       part.offsets.end());
    out.cost += part.cost;
    out.expansions += part.expansions;
  }
  return out;
}

}  // namespace mapmatch::gsmm

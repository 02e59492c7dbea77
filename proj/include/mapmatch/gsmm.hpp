#pragma once

#include <cstdint>
#include <vector>

#include "mapmatch/network.hpp"
#include "mapmatch/trace.hpp"

// Graph-search map matching: a Dijkstra-style forward search whose edge
// costs measure disagreement between an edge and the trace linestring.
namespace mapmatch::gsmm {

struct Config {
  double alpha = 10.0;            // divisor balancing (c1+c2)*l_e against c3
  double beta = 3.0;              // forward-heuristic weight (c4)
  double start_radius = 100.0;    // candidate radius for start/destination
  double candidate_window = 100.0;  // arc-length window for alternatives
};

// Per-node search state: where the node sits in the queue and where it was
// pinned on the trace. The start label has cost 0 and no parent.
struct SearchLabel {
  NodeId node = 0;
  double cost = 0.0;
  EdgeId parent_edge = -1;   // -1 = none
  double proj_offset = 0.0;  // meters along the trace linestring
};

struct EdgeCost {
  double cost = 0.0;      // c_f = (c1 + c2) * l_e / alpha + c3 - beta * along
  Projection projection;  // the chosen candidate for the edge's to-node
};

struct MatchResult {
  MatchPath path;
  double cost = 0.0;            // accumulated c_f over the returned path
  std::vector<double> offsets;  // label proj_offsets along the path
  std::size_t expansions = 0;   // nodes closed by the search
};

// The step-cost formula on already-measured quantities. Split out so the
// arithmetic itself can be pinned in tests.
inline double step_cost(double c1, double c2, double c3, double edge_len,
                        double along, double alpha, double beta) {
  return (c1 + c2) * edge_len / alpha + c3 - beta * along;
}

// Initial edge: among edges within radius of the first measurement, the one
// minimizing distance(first, edge) + distance(edge end node, trace). Scores
// within 1e-6 m tie-break by heading agreement with the trace start, then by
// smaller id. The edge's from-node is the search start.
EdgeId select_initial_edge(const RoadNetwork& net, const TraceLinestring& ts,
                           PlanePoint first, double radius);

// Mirror of the above with the last measurement and the edge's start node;
// the edge's to-node is the destination.
EdgeId select_destination_edge(const RoadNetwork& net,
                               const TraceLinestring& ts, PlanePoint last,
                               double radius);

// Cost of stepping across `edge` from the current label. Evaluates every
// candidate projection of the edge's to-node (chronologically constrained by
// the label's offset) and returns the cheapest.
EdgeCost edge_cost(const RoadNetwork& net, const Edge& edge,
                   const SearchLabel& current, const TraceLinestring& ts,
                   const Config& cfg);

// Matches a trace with no proximity self-intersection (callers split first).
MatchResult match(const RoadNetwork& net, const Trace& tr,
                  const Config& cfg = {});

// Splits the trace, matches each part, concatenates the part paths
// (deduplicating a shared boundary edge).
MatchResult match_full(const RoadNetwork& net, const Trace& tr,
                       const Config& cfg = {}, double net_scale = 25.0);

}  // namespace mapmatch::gsmm

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "mapmatch/geo.hpp"

namespace mapmatch {

using NodeId = std::int64_t;
using EdgeId = std::int64_t;

struct Node {
  NodeId id = 0;
  GeoPoint geo;
  PlanePoint pos;
};

struct Edge {
  EdgeId id = 0;
  NodeId from = 0;
  NodeId to = 0;
  Polyline geom;
  double length = 0.0;  // geom.length(), cached
};

// A match is a chain of directed edges; consecutive edges share a node.
struct MatchPath {
  std::vector<EdgeId> edges;
};

// Uniform grid over edge bounding boxes. Cell size is fixed at build; a
// radius query returns a candidate superset (no false negatives), which the
// caller filters by exact distance.
class SpatialGrid {
 public:
  SpatialGrid() = default;
  SpatialGrid(const std::vector<Edge>& edges, double cell_size);

  // Indices of edges whose bbox may intersect the disc around q.
  std::vector<std::uint32_t> candidates(PlanePoint q, double radius) const;

 private:
  void cell_range(double lo, double hi, double min, int count, int& a,
                  int& b) const;

  double cell_ = 250.0;
  double min_x_ = 0.0, min_y_ = 0.0;
  int nx_ = 0, ny_ = 0;
  std::vector<std::vector<std::uint32_t>> cells_;
  std::size_t edge_count_ = 0;
};

// Geographic inputs for building a network (also the canonical file model).
struct GeoNodeRecord {
  NodeId id = 0;
  GeoPoint pos;
};

struct GeoEdgeRecord {
  EdgeId id = 0;
  NodeId from = 0;
  NodeId to = 0;
  std::vector<GeoPoint> geometry;  // [lat, lon] pairs, from-node to to-node
};

// Directed road network. Immutable after construction; all geometry lives in
// a local plane anchored at the first node's geographic position.
class RoadNetwork {
 public:
  // Validates every invariant (unique ids, endpoint agreement within 1e-6 m,
  // positive edge lengths); throws ValidationError naming the offending
  // record. Edge lengths are recomputed from geometry, never trusted.
  static RoadNetwork build(const std::vector<GeoNodeRecord>& nodes,
                           const std::vector<GeoEdgeRecord>& edges,
                           double grid_cell = 250.0);

  GeoPoint origin() const { return origin_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }

  const Node& node(NodeId id) const;
  const Edge& edge(EdgeId id) const;
  bool has_node(NodeId id) const { return node_by_id_.count(id) != 0; }
  bool has_edge(EdgeId id) const { return edge_by_id_.count(id) != 0; }

  // Dense-index accessors used by the search loops.
  std::uint32_t node_index(NodeId id) const;
  std::uint32_t edge_index(EdgeId id) const;
  const Node& node_at(std::uint32_t idx) const { return nodes_[idx]; }
  const Edge& edge_at(std::uint32_t idx) const { return edges_[idx]; }
  const std::vector<std::uint32_t>& out_edge_indices(std::uint32_t node_idx)
      const {
    return out_adj_[node_idx];
  }

  // Ids of edges leaving the node. Throws ValidationError on unknown id.
  std::vector<EdgeId> out_edges(NodeId id) const;

  // Exactly the edges whose geometry passes within radius of q.
  std::vector<EdgeId> edges_within(PlanePoint q, double radius) const;

 private:
  RoadNetwork() = default;

  GeoPoint origin_;
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::unordered_map<NodeId, std::uint32_t> node_by_id_;
  std::unordered_map<EdgeId, std::uint32_t> edge_by_id_;
  std::vector<std::vector<std::uint32_t>> out_adj_;
  SpatialGrid grid_;
};

// Canonical network format: one JSON object with "nodes": [{id, lat, lon}]
// and "edges": [{id, from, to, geometry: [[lat, lon], ...]}].
RoadNetwork load_network(const std::filesystem::path& path,
                         double grid_cell = 250.0);
void save_network(const RoadNetwork& net, const std::filesystem::path& path);

}  // namespace mapmatch

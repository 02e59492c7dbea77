#include "mapmatch/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "mapmatch/errors.hpp"

namespace mapmatch {

namespace {

// Endpoint agreement tolerance between edge geometry and node positions.
constexpr double kEndpointTol = 1e-6;

struct Bbox {
  double min_x, min_y, max_x, max_y;
};

Bbox geometry_bbox(const Polyline& geom) {
  Bbox b{std::numeric_limits<double>::infinity(),
         std::numeric_limits<double>::infinity(),
         -std::numeric_limits<double>::infinity(),
         -std::numeric_limits<double>::infinity()};
  for (const PlanePoint& p : geom.points()) {
    b.min_x = std::min(b.min_x, p.x);
    b.min_y = std::min(b.min_y, p.y);
    b.max_x = std::max(b.max_x, p.x);
    b.max_y = std::max(b.max_y, p.y);
  }
  return b;
}

}  // namespace

SpatialGrid::SpatialGrid(const std::vector<Edge>& edges, double cell_size)
    : cell_(cell_size), edge_count_(edges.size()) {
  if (edges.empty()) return;

  double max_x = -std::numeric_limits<double>::infinity();
  double max_y = max_x;
  min_x_ = std::numeric_limits<double>::infinity();
  min_y_ = min_x_;
  std::vector<Bbox> boxes;
  boxes.reserve(edges.size());
  for (const Edge& e : edges) {
    boxes.push_back(geometry_bbox(e.geom));
    min_x_ = std::min(min_x_, boxes.back().min_x);
    min_y_ = std::min(min_y_, boxes.back().min_y);
    max_x = std::max(max_x, boxes.back().max_x);
    max_y = std::max(max_y, boxes.back().max_y);
  }
  nx_ = static_cast<int>((max_x - min_x_) / cell_) + 1;
  ny_ = static_cast<int>((max_y - min_y_) / cell_) + 1;
  cells_.resize(static_cast<std::size_t>(nx_) * ny_);

  for (std::uint32_t i = 0; i < edges.size(); ++i) {
    int ax, bx, ay, by;
    cell_range(boxes[i].min_x, boxes[i].max_x, min_x_, nx_, ax, bx);
    cell_range(boxes[i].min_y, boxes[i].max_y, min_y_, ny_, ay, by);
    for (int cy = ay; cy <= by; ++cy) {
      for (int cx = ax; cx <= bx; ++cx) {
        cells_[static_cast<std::size_t>(cy) * nx_ + cx].push_back(i);
      }
    }
  }
}

void SpatialGrid::cell_range(double lo, double hi, double min, int count,
                             int& a, int& b) const {
  // Clamp before the index math so infinite query radii stay finite.
  lo = std::max(lo, min);
  hi = std::min(hi, min + cell_ * count);
  a = std::clamp(static_cast<int>((lo - min) / cell_), 0, count - 1);
  b = std::clamp(static_cast<int>((hi - min) / cell_), 0, count - 1);
}

std::vector<std::uint32_t> SpatialGrid::candidates(PlanePoint q,
                                                   double radius) const {
  std::vector<std::uint32_t> out;
  if (cells_.empty()) return out;
  int ax, bx, ay, by;
  cell_range(q.x - radius, q.x + radius, min_x_, nx_, ax, bx);
  cell_range(q.y - radius, q.y + radius, min_y_, ny_, ay, by);
  std::vector<bool> seen(edge_count_, false);
  for (int cy = ay; cy <= by; ++cy) {
    for (int cx = ax; cx <= bx; ++cx) {
      for (std::uint32_t idx : cells_[static_cast<std::size_t>(cy) * nx_ + cx]) {
        if (!seen[idx]) {
          seen[idx] = true;
          out.push_back(idx);
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

RoadNetwork RoadNetwork::build(const std::vector<GeoNodeRecord>& nodes,
                               const std::vector<GeoEdgeRecord>& edges,
                               double grid_cell) {
  if (nodes.empty()) {
    throw ValidationError("network has no nodes");
  }
  RoadNetwork net;
  net.origin_ = nodes.front().pos;

  net.nodes_.reserve(nodes.size());
  for (const GeoNodeRecord& n : nodes) {
    if (!net.node_by_id_.emplace(n.id, net.nodes_.size()).second) {
      throw ValidationError("duplicate node id " + std::to_string(n.id));
    }
    net.nodes_.push_back({n.id, n.pos, to_local(n.pos, net.origin_)});
  }

  net.edges_.reserve(edges.size());
  net.out_adj_.resize(net.nodes_.size());
  for (const GeoEdgeRecord& e : edges) {
    const std::string label = "edge " + std::to_string(e.id);
    if (net.edge_by_id_.count(e.id) != 0) {
      throw ValidationError("duplicate " + label);
    }
    const auto from_it = net.node_by_id_.find(e.from);
    const auto to_it = net.node_by_id_.find(e.to);
    if (from_it == net.node_by_id_.end()) {
      throw ValidationError(label + " references missing node " +
                            std::to_string(e.from));
    }
    if (to_it == net.node_by_id_.end()) {
      throw ValidationError(label + " references missing node " +
                            std::to_string(e.to));
    }
    if (e.geometry.size() < 2) {
      throw ValidationError(label + " has fewer than 2 geometry points");
    }
    std::vector<PlanePoint> pts;
    pts.reserve(e.geometry.size());
    for (const GeoPoint& g : e.geometry) pts.push_back(to_local(g, net.origin_));
    Polyline geom = [&]() {
      try {
        return Polyline(std::move(pts));
      } catch (const ValidationError&) {
        throw ValidationError(label + " has zero-length geometry");
      }
    }();
    if (plane_dist(geom.points().front(), net.nodes_[from_it->second].pos) >
        kEndpointTol) {
      throw ValidationError(label + " geometry does not start at node " +
                            std::to_string(e.from));
    }
    if (plane_dist(geom.points().back(), net.nodes_[to_it->second].pos) >
        kEndpointTol) {
      throw ValidationError(label + " geometry does not end at node " +
                            std::to_string(e.to));
    }
    const double length = geom.length();
    net.edge_by_id_.emplace(e.id, net.edges_.size());
    net.out_adj_[from_it->second].push_back(
        static_cast<std::uint32_t>(net.edges_.size()));
    net.edges_.push_back({e.id, e.from, e.to, std::move(geom), length});
  }

  net.grid_ = SpatialGrid(net.edges_, grid_cell);
  return net;
}

const Node& RoadNetwork::node(NodeId id) const {
  return nodes_[node_index(id)];
}

const Edge& RoadNetwork::edge(EdgeId id) const {
  return edges_[edge_index(id)];
}

std::uint32_t RoadNetwork::node_index(NodeId id) const {
  const auto it = node_by_id_.find(id);
  if (it == node_by_id_.end()) {
    throw ValidationError("unknown node id " + std::to_string(id));
  }
  return it->second;
}

std::uint32_t RoadNetwork::edge_index(EdgeId id) const {
  const auto it = edge_by_id_.find(id);
  if (it == edge_by_id_.end()) {
    throw ValidationError("unknown edge id " + std::to_string(id));
  }
  return it->second;
}

std::vector<EdgeId> RoadNetwork::out_edges(NodeId id) const {
  std::vector<EdgeId> out;
  for (std::uint32_t idx : out_adj_[node_index(id)]) {
    out.push_back(edges_[idx].id);
  }
  return out;
}

std::vector<EdgeId> RoadNetwork::edges_within(PlanePoint q,
                                              double radius) const {
  std::vector<EdgeId> out;
  const double r2 = radius * radius;
  for (std::uint32_t idx : grid_.candidates(q, radius)) {
    const kern::MinHit hit = kern::project_min(
        edges_[idx].geom.soa(), q.x, q.y, 0, edges_[idx].geom.segment_count());
    if (hit.dist2 <= r2) out.push_back(edges_[idx].id);
  }
  return out;
}

namespace {

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open " + path.string());
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return j;
}

}  // namespace

RoadNetwork load_network(const std::filesystem::path& path, double grid_cell) {
  const nlohmann::json j = read_json_file(path);
  std::vector<GeoNodeRecord> nodes;
  std::vector<GeoEdgeRecord> edges;
  try {
    for (const auto& n : j.at("nodes")) {
      nodes.push_back({n.at("id").get<NodeId>(),
                       {n.at("lat").get<double>(), n.at("lon").get<double>()}});
    }
    for (const auto& e : j.at("edges")) {
      GeoEdgeRecord rec;
      rec.id = e.at("id").get<EdgeId>();
      rec.from = e.at("from").get<NodeId>();
      rec.to = e.at("to").get<NodeId>();
      for (const auto& p : e.at("geometry")) {
        rec.geometry.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      }
      edges.push_back(std::move(rec));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return RoadNetwork::build(nodes, edges, grid_cell);
}

void save_network(const RoadNetwork& net, const std::filesystem::path& path) {
  nlohmann::json j;
  j["nodes"] = nlohmann::json::array();
  for (const Node& n : net.nodes()) {
    j["nodes"].push_back({{"id", n.id}, {"lat", n.geo.lat}, {"lon", n.geo.lon}});
  }
  j["edges"] = nlohmann::json::array();
  for (const Edge& e : net.edges()) {
    nlohmann::json geometry = nlohmann::json::array();
    for (const PlanePoint& p : e.geom.points()) {
      const GeoPoint g = from_local(p, net.origin());
      geometry.push_back({g.lat, g.lon});
    }
    j["edges"].push_back({{"id", e.id},
                          {"from", e.from},
                          {"to", e.to},
                          {"geometry", std::move(geometry)}});
  }
  std::ofstream out(path);
  if (!out) {
    throw ParseError("cannot write " + path.string());
  }
  out << j.dump(1) << '\n';
}

}  // namespace mapmatch

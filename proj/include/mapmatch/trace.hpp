#pragma once

#include <filesystem>
#include <vector>

#include "mapmatch/geo.hpp"
#include "mapmatch/network.hpp"

namespace mapmatch {

struct Measurement {
  GeoPoint pos;
  double time = 0.0;  // seconds
};

// Time-ordered location measurements of one trip. At least two, strictly
// increasing time; validated at construction.
class Trace {
 public:
  explicit Trace(std::vector<Measurement> measurements);

  const std::vector<Measurement>& measurements() const { return ms_; }
  std::size_t size() const { return ms_.size(); }
  const Measurement& front() const { return ms_.front(); }
  const Measurement& back() const { return ms_.back(); }

 private:
  std::vector<Measurement> ms_;
};

// The trace's connecting polyline in a local plane. index_map[i] is the
// polyline point index of measurement i (consecutive duplicate positions
// collapse onto one point).
struct TraceLinestring {
  Polyline line;
  GeoPoint origin;
  std::vector<std::size_t> index_map;
};

// Keeps measurement 0, then greedily the next measurement at least `period`
// seconds after the last kept one; the final measurement is always kept.
Trace subsample(const Trace& tr, double period);

TraceLinestring build_linestring(const Trace& tr);
TraceLinestring build_linestring(const Trace& tr, GeoPoint origin);

// Cuts the trace wherever it returns within net_scale meters of an earlier
// part of itself after traveling more than 4*net_scale along the line (a
// proximity revisit, which the Dijkstra-style search cannot represent).
// Parts overlap at the cut measurements; each part has >= 2 measurements and
// passes this test itself.
std::vector<Trace> split_self_intersecting(const Trace& tr,
                                           double net_scale = 25.0);

// Canonical trace format: JSON array of {lat, lon, time}.
Trace load_trace(const std::filesystem::path& path);
void save_trace(const Trace& tr, const std::filesystem::path& path);

// Ground-truth files: JSON array of edge ids.
std::vector<EdgeId> load_ground_truth(const std::filesystem::path& path);
void save_ground_truth(const std::vector<EdgeId>& edges,
                       const std::filesystem::path& path);

}  // namespace mapmatch

#include "mapmatch/trace.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "mapmatch/errors.hpp"

namespace mapmatch {

Trace::Trace(std::vector<Measurement> measurements)
    : ms_(std::move(measurements)) {
  if (ms_.size() < 2) {
    throw ValidationError("trace needs at least 2 measurements");
  }
  for (std::size_t i = 0; i < ms_.size(); ++i) {
    if (!std::isfinite(ms_[i].time)) {
      throw ValidationError("measurement " + std::to_string(i) +
                            " has non-finite time");
    }
    if (i > 0 && ms_[i].time <= ms_[i - 1].time) {
      throw ValidationError("measurement " + std::to_string(i) +
                            " does not increase time");
    }
  }
}

Trace subsample(const Trace& tr, double period) {
  if (!(period > 0.0)) {
    throw ValidationError("subsample period must be positive");
  }
  const auto& ms = tr.measurements();
  std::vector<Measurement> kept;
  kept.push_back(ms.front());
  double last = ms.front().time;
  for (std::size_t i = 1; i < ms.size(); ++i) {
    if (ms[i].time >= last + period) {
      kept.push_back(ms[i]);
      last = ms[i].time;
    }
  }
  if (kept.back().time != ms.back().time) {
    kept.push_back(ms.back());
  }
  return Trace(std::move(kept));
}

TraceLinestring build_linestring(const Trace& tr) {
  return build_linestring(tr, tr.front().pos);
}

TraceLinestring build_linestring(const Trace& tr, GeoPoint origin) {
  const auto& ms = tr.measurements();
  std::vector<PlanePoint> pts;
  std::vector<std::size_t> index_map(ms.size());
  pts.reserve(ms.size());
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const PlanePoint p = to_local(ms[i].pos, origin);
    if (pts.empty() ||
        plane_dist2(pts.back(), p) >= kDuplicateEps * kDuplicateEps) {
      pts.push_back(p);
    }
    index_map[i] = pts.size() - 1;
  }
  return {Polyline(std::move(pts)), origin, std::move(index_map)};
}

namespace {

// Minimal distance between two segments; 0 when they properly intersect.
double segment_distance(PlanePoint a0, PlanePoint a1, PlanePoint b0,
                        PlanePoint b1) {
  const auto cross = [](PlanePoint o, PlanePoint p, PlanePoint q) {
    return (p.x - o.x) * (q.y - o.y) - (p.y - o.y) * (q.x - o.x);
  };
  const double d1 = cross(b0, b1, a0);
  const double d2 = cross(b0, b1, a1);
  const double d3 = cross(a0, a1, b0);
  const double d4 = cross(a0, a1, b1);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return 0.0;
  }

  const auto point_seg = [](PlanePoint q, PlanePoint p0, PlanePoint p1) {
    const double dx = p1.x - p0.x;
    const double dy = p1.y - p0.y;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? ((q.x - p0.x) * dx + (q.y - p0.y) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return plane_dist(q, {p0.x + t * dx, p0.y + t * dy});
  };
  return std::min(std::min(point_seg(a0, b0, b1), point_seg(a1, b0, b1)),
                  std::min(point_seg(b0, a0, a1), point_seg(b1, a0, a1)));
}

}  // namespace

std::vector<Trace> split_self_intersecting(const Trace& tr,
                                           double net_scale) {
  const auto& ms = tr.measurements();
  const GeoPoint origin = ms.front().pos;
  std::vector<PlanePoint> pts;
  pts.reserve(ms.size());
  for (const Measurement& m : ms) pts.push_back(to_local(m.pos, origin));

  // Arc position of each measurement along the raw linestring.
  std::vector<double> arc(pts.size(), 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    arc[i] = arc[i - 1] + plane_dist(pts[i - 1], pts[i]);
  }

  // A pair of segments conflicts when they pass within net_scale of each
  // other *and* the trace travels more than 4*net_scale between them;
  // without the arc guard, every trace sampled denser than net_scale would
  // count as self-intersecting through its own continuation.
  const double min_arc_gap = 4.0 * net_scale;
  const std::size_t n_seg = pts.size() - 1;

  std::vector<Trace> parts;
  std::size_t start = 0;  // first measurement of the current part
  for (std::size_t j = 1; j < n_seg; ++j) {
    bool cut = false;
    for (std::size_t i = start; i + 2 <= j; ++i) {
      if (arc[j] - arc[i + 1] <= min_arc_gap) break;  // later i: even closer
      if (segment_distance(pts[i], pts[i + 1], pts[j], pts[j + 1]) <
          net_scale) {
        cut = true;
        break;
      }
    }
    if (cut) {
      parts.emplace_back(
          std::vector<Measurement>(ms.begin() + start, ms.begin() + j + 1));
      start = j;
    }
  }
  parts.emplace_back(std::vector<Measurement>(ms.begin() + start, ms.end()));
  return parts;
}

Trace load_trace(const std::filesystem::path& path) {
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
  std::vector<Measurement> ms;
  try {
    for (const auto& m : j) {
      ms.push_back({{m.at("lat").get<double>(), m.at("lon").get<double>()},
                    m.at("time").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return Trace(std::move(ms));
}

void save_trace(const Trace& tr, const std::filesystem::path& path) {
  nlohmann::json j = nlohmann::json::array();
  for (const Measurement& m : tr.measurements()) {
    j.push_back({{"lat", m.pos.lat}, {"lon", m.pos.lon}, {"time", m.time}});
  }
  std::ofstream out(path);
  if (!out) {
    throw ParseError("cannot write " + path.string());
  }
  out << j.dump(1) << '\n';
}

std::vector<EdgeId> load_ground_truth(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open " + path.string());
  }
  nlohmann::json j;
  try {
    in >> j;
    return j.get<std::vector<EdgeId>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void save_ground_truth(const std::vector<EdgeId>& edges,
                       const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw ParseError("cannot write " + path.string());
  }
  out << nlohmann::json(edges).dump() << '\n';
}

}  // namespace mapmatch

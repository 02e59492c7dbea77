#include "mapmatch/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <thread>
#include <unordered_map>

#include "mapmatch/errors.hpp"
#include "mapmatch/log.hpp"

namespace mapmatch::eval {

RmfBreakdown rmf(const MatchPath& gt, const MatchPath& m,
                 const RoadNetwork& net) {
  RmfBreakdown out;
  std::unordered_map<EdgeId, int> counts;
  for (EdgeId id : gt.edges) {
    out.l_gt += net.edge(id).length;
    ++counts[id];
  }
  if (out.l_gt == 0.0) {
    throw ZeroGroundTruth("ground truth has zero length");
  }
  for (EdgeId id : m.edges) {
    const double len = net.edge(id).length;
    auto it = counts.find(id);
    if (it != counts.end() && it->second > 0) {
      --it->second;
    } else {
      out.l_plus += len;
    }
  }
  for (const auto& [id, n] : counts) {
    if (n > 0) out.l_minus += n * net.edge(id).length;
  }
  out.rmf = (out.l_plus + out.l_minus) / out.l_gt;
  return out;
}

RoadNetwork generate_grid(int rows, int cols, double block, GeoPoint base,
                          double grid_cell) {
  std::vector<GeoNodeRecord> nodes;
  std::vector<GeoEdgeRecord> edges;
  const auto node_id = [cols](int r, int c) {
    return static_cast<NodeId>(r) * cols + c;
  };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const PlanePoint p{c * block, r * block};
      nodes.push_back({node_id(r, c), from_local(p, base)});
    }
  }
  EdgeId next_edge = 0;
  const auto add_pair = [&](NodeId a, NodeId b) {
    const GeoPoint ga = nodes[static_cast<std::size_t>(a)].pos;
    const GeoPoint gb = nodes[static_cast<std::size_t>(b)].pos;
    edges.push_back({next_edge++, a, b, {ga, gb}});
    edges.push_back({next_edge++, b, a, {gb, ga}});
  };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) add_pair(node_id(r, c), node_id(r, c + 1));
      if (r + 1 < rows) add_pair(node_id(r, c), node_id(r + 1, c));
    }
  }
  return RoadNetwork::build(nodes, edges, grid_cell);
}

namespace {

// Concatenated plane geometry of a connected route.
Polyline route_polyline(const RoadNetwork& net,
                        const std::vector<EdgeId>& route) {
  if (route.empty()) {
    throw ValidationError("route is empty");
  }
  std::vector<PlanePoint> pts;
  for (std::size_t i = 0; i < route.size(); ++i) {
    const Edge& e = net.edge(route[i]);
    if (i > 0 && net.edge(route[i - 1]).to != e.from) {
      throw ValidationError("route edges " + std::to_string(route[i - 1]) +
                            " and " + std::to_string(route[i]) +
                            " are not connected");
    }
    const auto& g = e.geom.points();
    pts.insert(pts.end(), g.begin() + (i > 0 ? 1 : 0), g.end());
  }
  return Polyline(std::move(pts));
}

}  // namespace

GeneratedTrace generate_trace(const RoadNetwork& net,
                              const std::vector<EdgeId>& route,
                              double noise_sigma, double period,
                              std::uint64_t seed, double speed) {
  const Polyline line = route_polyline(net, route);
  const double total = line.length();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, noise_sigma > 0.0 ? noise_sigma
                                                                : 1.0);
  std::vector<Measurement> ms;
  const auto emit = [&](double s, double t) {
    PlanePoint p = line.point_at(s);
    if (noise_sigma > 0.0) {
      p.x += gauss(rng);
      p.y += gauss(rng);
    }
    ms.push_back({from_local(p, net.origin()), t});
  };
  const double step = speed * period;
  std::size_t k = 0;
  for (; k * step < total - 1e-9; ++k) {
    emit(k * step, k * period);
  }
  emit(total, total / speed);

  GeneratedTrace out{Trace(std::move(ms)), MatchPath{route}};
  return out;
}

std::vector<EdgeId> random_simple_route(const RoadNetwork& net, int n_edges,
                                        std::mt19937_64& rng,
                                        double clearance,
                                        double detour_ratio) {
  std::uniform_int_distribution<std::size_t> pick_node(0,
                                                       net.node_count() - 1);
  for (int attempt = 0; attempt < 2000; ++attempt) {
    std::vector<EdgeId> route;
    std::vector<std::uint32_t> nodes;
    std::vector<double> arc{0.0};
    std::vector<bool> visited(net.node_count(), false);
    std::uint32_t cur = static_cast<std::uint32_t>(pick_node(rng));
    visited[cur] = true;
    nodes.push_back(cur);
    while (static_cast<int>(route.size()) < n_edges) {
      std::vector<std::uint32_t> options;
      for (std::uint32_t eidx : net.out_edge_indices(cur)) {
        const Edge& e = net.edge_at(eidx);
        const std::uint32_t to = net.node_index(e.to);
        if (visited[to]) continue;
        if (clearance > 0.0) {
          // Re-approach check against every node except the last two
          // (those are close simply by being consecutive).
          const double to_arc = arc.back() + e.length;
          bool close_revisit = false;
          for (std::size_t j = 0; j + 2 < nodes.size(); ++j) {
            const double d =
                plane_dist(net.node_at(nodes[j]).pos, net.node_at(to).pos);
            if (d < clearance && to_arc - arc[j] > detour_ratio * d) {
              close_revisit = true;
              break;
            }
          }
          if (close_revisit) continue;
        }
        options.push_back(eidx);
      }
      if (options.empty()) break;
      std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
      const std::uint32_t eidx = options[pick(rng)];
      route.push_back(net.edge_at(eidx).id);
      arc.push_back(arc.back() + net.edge_at(eidx).length);
      cur = net.node_index(net.edge_at(eidx).to);
      visited[cur] = true;
      nodes.push_back(cur);
    }
    if (static_cast<int>(route.size()) == n_edges) return route;
  }
  throw ValidationError("could not generate a simple route of length " +
                        std::to_string(n_edges));
}

std::vector<EdgeId> random_out_and_back_route(const RoadNetwork& net,
                                              int out_edges, int back_edges,
                                              std::mt19937_64& rng) {
  if (back_edges > out_edges) back_edges = out_edges;
  for (int attempt = 0; attempt < 500; ++attempt) {
    std::vector<EdgeId> out = random_simple_route(net, out_edges, rng);
    std::vector<EdgeId> route = out;
    bool ok = true;
    for (int i = 0; i < back_edges && ok; ++i) {
      const Edge& fwd = net.edge(out[out.size() - 1 - i]);
      // The reverse sibling, if the street is two-way.
      ok = false;
      for (EdgeId id : net.out_edges(fwd.to)) {
        const Edge& e = net.edge(id);
        if (e.to == fwd.from && e.from == fwd.to) {
          route.push_back(id);
          ok = true;
          break;
        }
      }
    }
    if (ok) return route;
  }
  throw ValidationError("could not generate an out-and-back route");
}

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::Gsmm:
      return "gsmm";
    case Algorithm::Hmm:
      return "hmm";
    case Algorithm::Incremental:
      return "incremental";
  }
  return "?";
}

bool parse_algorithm(const std::string& s, Algorithm& out) {
  if (s == "gsmm") {
    out = Algorithm::Gsmm;
  } else if (s == "hmm") {
    out = Algorithm::Hmm;
  } else if (s == "incremental") {
    out = Algorithm::Incremental;
  } else {
    return false;
  }
  return true;
}

namespace {

void append_part(MatchPath& acc, const MatchPath& part) {
  std::size_t from = 0;
  if (!acc.edges.empty() && !part.edges.empty() &&
      acc.edges.back() == part.edges.front()) {
    from = 1;
  }
  acc.edges.insert(acc.edges.end(), part.edges.begin() + from,
                   part.edges.end());
}

}  // namespace

MatchPath run_matcher(const RoadNetwork& net, const Trace& tr, Algorithm alg,
                      const AlgoConfigs& cfgs) {
  if (alg == Algorithm::Gsmm) {
    return gsmm::match_full(net, tr, cfgs.gsmm, cfgs.net_scale).path;
  }
  MatchPath out;
  const std::vector<Trace> parts = split_self_intersecting(tr, cfgs.net_scale);
  for (const Trace& part : parts) {
    switch (alg) {
      case Algorithm::Hmm:
        append_part(out, hmm::match(net, part, cfgs.hmm));
        break;
      case Algorithm::Incremental:
        append_part(out, incremental::match(net, part, cfgs.incremental));
        break;
      case Algorithm::Gsmm:
        break;  // handled above
    }
  }
  return out;
}

std::vector<double> default_periods() {
  return {1, 5, 10, 20, 30, 45, 60, 90, 120, 180, 300};
}

BenchmarkReport run_benchmark(const std::vector<BenchmarkCase>& cases,
                              const std::vector<double>& periods,
                              const std::vector<Algorithm>& algorithms,
                              const AlgoConfigs& cfgs, int jobs) {
  if (cases.empty() || periods.empty() || algorithms.empty()) {
    throw ValidationError("benchmark needs cases, periods and algorithms");
  }
  BenchmarkReport report;
  report.rows.resize(cases.size() * periods.size() * algorithms.size());

  const auto run_row = [&](std::size_t flat) {
    const std::size_t ci = flat / (periods.size() * algorithms.size());
    const std::size_t rem = flat % (periods.size() * algorithms.size());
    const std::size_t pi = rem / algorithms.size();
    const std::size_t ai = rem % algorithms.size();
    const BenchmarkCase& bc = cases[ci];

    BenchmarkRow& row = report.rows[flat];
    row.trace_id = bc.id;
    row.period_s = periods[pi];
    row.algorithm = algorithms[ai];
    row.l_gt = 0.0;
    for (EdgeId id : bc.ground_truth.edges) row.l_gt += bc.net.edge(id).length;

    const Trace sub = subsample(bc.trace, periods[pi]);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const MatchPath m = run_matcher(bc.net, sub, algorithms[ai], cfgs);
      row.runtime_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
      row.rmf = rmf(bc.ground_truth, m, bc.net);
      row.success = true;
    } catch (const std::runtime_error& e) {
      row.runtime_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
      row.success = false;
      row.error = e.what();
      logging::logf(logging::Level::Info, "benchmark %s period %g %s: %s",
                    bc.id.c_str(), periods[pi],
                    algorithm_name(algorithms[ai]), e.what());
    }
  };

  if (jobs <= 1) {
    for (std::size_t flat = 0; flat < report.rows.size(); ++flat) {
      run_row(flat);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (int w = 0; w < jobs; ++w) {
      workers.emplace_back([&]() {
        for (std::size_t flat = next.fetch_add(1); flat < report.rows.size();
             flat = next.fetch_add(1)) {
          run_row(flat);
        }
      });
    }
    for (std::thread& t : workers) t.join();
  }
  return report;
}

std::vector<BenchmarkAggregate> BenchmarkReport::aggregates() const {
  std::map<std::pair<double, int>, BenchmarkAggregate> by_key;
  std::vector<std::pair<double, int>> order;
  for (const BenchmarkRow& row : rows) {
    const auto key = std::make_pair(row.period_s,
                                    static_cast<int>(row.algorithm));
    auto it = by_key.find(key);
    if (it == by_key.end()) {
      it = by_key.emplace(key, BenchmarkAggregate{}).first;
      it->second.period_s = row.period_s;
      it->second.algorithm = row.algorithm;
      order.push_back(key);
    }
    BenchmarkAggregate& agg = it->second;
    ++agg.n_rows;
    agg.mean_runtime_s += row.runtime_s;
    if (row.success) {
      ++agg.n_success;
      agg.mean_rmf += row.rmf.rmf;
    }
  }
  std::vector<BenchmarkAggregate> out;
  out.reserve(order.size());
  for (const auto& key : order) {
    BenchmarkAggregate agg = by_key[key];
    agg.mean_runtime_s /= agg.n_rows;
    agg.mean_rmf = agg.n_success > 0
                       ? agg.mean_rmf / agg.n_success
                       : std::numeric_limits<double>::quiet_NaN();
    out.push_back(agg);
  }
  return out;
}

void BenchmarkReport::write_rows_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) {
    throw ParseError("cannot write " + path.string());
  }
  out << "trace_id,period_s,algorithm,rmf,l_gt,l_plus,l_minus,runtime_s,"
         "success\n";
  char buf[64];
  const auto num = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return std::string(buf);
  };
  for (const BenchmarkRow& row : rows) {
    out << row.trace_id << ',' << num(row.period_s) << ','
        << algorithm_name(row.algorithm) << ',';
    if (row.success) {
      out << num(row.rmf.rmf) << ',' << num(row.rmf.l_gt) << ','
          << num(row.rmf.l_plus) << ',' << num(row.rmf.l_minus);
    } else {
      out << ',' << num(row.l_gt) << ",,";
    }
    out << ',' << num(row.runtime_s) << ',' << (row.success ? "true" : "false")
        << '\n';
  }
}

void BenchmarkReport::write_aggregate_csv(
    const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) {
    throw ParseError("cannot write " + path.string());
  }
  out << "period_s,algorithm,mean_rmf,mean_runtime_s,n_rows,n_success\n";
  char buf[64];
  const auto num = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return std::string(buf);
  };
  for (const BenchmarkAggregate& agg : aggregates()) {
    out << num(agg.period_s) << ',' << algorithm_name(agg.algorithm) << ','
        << num(agg.mean_rmf) << ',' << num(agg.mean_runtime_s) << ','
        << agg.n_rows << ',' << agg.n_success << '\n';
  }
}

}  // namespace mapmatch::eval

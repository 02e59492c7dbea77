// mapmatch: match traces to road networks, benchmark the matchers, generate
// synthetic scenarios, and convert external data to the canonical formats.

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "converters.hpp"
#include "mapmatch/errors.hpp"
#include "mapmatch/eval.hpp"
#include "mapmatch/gsmm.hpp"
#include "mapmatch/hmm.hpp"
#include "mapmatch/incremental.hpp"
#include "mapmatch/log.hpp"
#include "mapmatch/network.hpp"
#include "mapmatch/trace.hpp"

namespace fs = std::filesystem;
using namespace mapmatch;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitMatchFailure = 1;
constexpr int kExitInputError = 2;

void write_match_output(const RoadNetwork& net, const MatchPath& path,
                        const fs::path& out) {
  std::ofstream os(out);
  if (!os) throw ParseError("cannot write " + out.string());
  os << nlohmann::json(path.edges).dump() << '\n';

  // Companion GeoJSON with one LineString per matched edge, for inspection.
  nlohmann::json features = nlohmann::json::array();
  for (EdgeId id : path.edges) {
    const Edge& e = net.edge(id);
    nlohmann::json coords = nlohmann::json::array();
    for (const PlanePoint& p : e.geom.points()) {
      const GeoPoint g = from_local(p, net.origin());
      coords.push_back({g.lon, g.lat});
    }
    features.push_back(
        {{"type", "Feature"},
         {"properties", {{"edge", id}}},
         {"geometry", {{"type", "LineString"}, {"coordinates", coords}}}});
  }
  fs::path geo = out;
  geo.replace_extension(".geojson");
  std::ofstream gs(geo);
  if (!gs) throw ParseError("cannot write " + geo.string());
  gs << nlohmann::json{{"type", "FeatureCollection"}, {"features", features}}
            .dump()
     << '\n';
}

int cmd_match(const std::string& network_file, const std::string& trace_file,
              const std::string& algorithm, double alpha, double beta,
              double sigma, const std::string& out) {
  eval::Algorithm alg;
  if (!eval::parse_algorithm(algorithm, alg)) {
    std::cerr << "unknown algorithm: " << algorithm << "\n";
    return kExitInputError;
  }
  const RoadNetwork net = load_network(network_file);
  const Trace tr = load_trace(trace_file);
  eval::AlgoConfigs cfgs;
  cfgs.gsmm.alpha = alpha;
  cfgs.gsmm.beta = beta;
  cfgs.hmm.sigma = sigma;
  const MatchPath path = eval::run_matcher(net, tr, alg, cfgs);
  write_match_output(net, path, out);
  logging::logf(logging::Level::Info, "matched %zu edges", path.edges.size());
  return kExitOk;
}

int cmd_benchmark(const std::string& dataset_dir,
                  std::vector<double> periods,
                  const std::vector<std::string>& algorithm_names,
                  std::uint64_t seed, const std::string& out_dir, int jobs) {
  std::vector<eval::Algorithm> algs;
  for (const std::string& name : algorithm_names) {
    eval::Algorithm a;
    if (!eval::parse_algorithm(name, a)) {
      std::cerr << "unknown algorithm: " << name << "\n";
      return kExitInputError;
    }
    algs.push_back(a);
  }
  if (periods.empty()) periods = eval::default_periods();

  // Dataset layout: one subdirectory per scenario holding network.json,
  // trace.json and ground_truth.json.
  std::vector<eval::BenchmarkCase> cases;
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(dataset_dir)) {
    if (entry.is_directory()) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  for (const fs::path& dir : dirs) {
    const fs::path net_file = dir / "network.json";
    const fs::path trace_file = dir / "trace.json";
    const fs::path gt_file = dir / "ground_truth.json";
    if (!fs::exists(net_file) || !fs::exists(trace_file) ||
        !fs::exists(gt_file)) {
      throw ParseError("scenario " + dir.string() +
                       " lacks network.json/trace.json/ground_truth.json");
    }
    eval::BenchmarkCase bc{dir.filename().string(), load_network(net_file),
                           load_trace(trace_file),
                           MatchPath{load_ground_truth(gt_file)}};
    cases.push_back(std::move(bc));
  }
  if (cases.empty()) {
    throw ParseError("no scenario directories under " + dataset_dir);
  }

  const eval::BenchmarkReport report =
      eval::run_benchmark(cases, periods, algs, {}, jobs);

  fs::create_directories(out_dir);
  report.write_rows_csv(fs::path(out_dir) / "benchmark_rows.csv");
  report.write_aggregate_csv(fs::path(out_dir) / "benchmark_aggregate.csv");

  std::printf("# seed %llu, %zu scenarios\n",
              static_cast<unsigned long long>(seed), cases.size());
  std::printf("%8s  %-12s %10s %14s %8s\n", "period", "algorithm", "mean_rmf",
              "mean_runtime_s", "success");
  for (const eval::BenchmarkAggregate& a : report.aggregates()) {
    std::printf("%8g  %-12s %10.4f %14.6f %4d/%-4d\n", a.period_s,
                eval::algorithm_name(a.algorithm), a.mean_rmf,
                a.mean_runtime_s, a.n_success, a.n_rows);
  }
  return kExitOk;
}

int cmd_synth(int rows, int cols, double block, int route_len, double noise,
              double period, std::uint64_t seed, const std::string& out_dir) {
  const RoadNetwork net = eval::generate_grid(rows, cols, block);
  std::mt19937_64 rng(seed);
  const std::vector<EdgeId> route =
      eval::random_simple_route(net, route_len, rng);
  const eval::GeneratedTrace gen =
      eval::generate_trace(net, route, noise, period, seed);

  fs::create_directories(out_dir);
  save_network(net, fs::path(out_dir) / "network.json");
  save_trace(gen.trace, fs::path(out_dir) / "trace.json");
  save_ground_truth(gen.ground_truth.edges,
                    fs::path(out_dir) / "ground_truth.json");
  logging::logf(logging::Level::Info,
                "wrote %dx%d grid, %d-edge route to %s", rows, cols,
                route_len, out_dir.c_str());
  return kExitOk;
}

int cmd_convert(const std::string& input, const std::string& format,
                const std::string& out_dir) {
  fs::create_directories(out_dir);
  if (format == "csv") {
    const Trace tr = convert_csv_trace(input);
    save_trace(tr, fs::path(out_dir) / "trace.json");
    // Round-trip through the canonical loader as a validation pass.
    load_trace(fs::path(out_dir) / "trace.json");
    return kExitOk;
  }
  if (format == "zenodo") {
    return convert_zenodo(input, out_dir);
  }
  std::cerr << "unknown format: " << format << "\n";
  return kExitInputError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"map matching toolkit"};
  app.require_subcommand(1);

  // match
  auto* match_cmd = app.add_subcommand("match", "match one trace");
  std::string network_file, trace_file, out_file;
  std::string algorithm = "gsmm";
  double alpha = gsmm::Config{}.alpha;
  double beta = gsmm::Config{}.beta;
  double sigma = hmm::Config{}.sigma;
  match_cmd->add_option("network", network_file, "canonical network file")
      ->required();
  match_cmd->add_option("trace", trace_file, "canonical trace file")
      ->required();
  match_cmd->add_option("--algorithm", algorithm,
                        "gsmm | hmm | incremental");
  match_cmd->add_option("--alpha", alpha, "gsmm cost divisor");
  match_cmd->add_option("--beta", beta, "gsmm forward heuristic weight");
  match_cmd->add_option("--sigma", sigma, "hmm emission sigma");
  match_cmd->add_option("--out", out_file, "output edge-id list (JSON)")
      ->required();

  // benchmark
  auto* bench_cmd = app.add_subcommand("benchmark", "run the period sweep");
  std::string dataset_dir, bench_out = "benchmark_out";
  std::vector<double> periods;
  std::vector<std::string> algorithms = {"gsmm", "hmm", "incremental"};
  std::uint64_t bench_seed = 0;
  int jobs = 1;
  bench_cmd->add_option("dataset", dataset_dir, "scenario directory")
      ->required();
  bench_cmd->add_option("--periods", periods,
                        "sub-sampling periods in seconds");
  bench_cmd->add_option("--algorithms", algorithms, "algorithms to run");
  bench_cmd->add_option("--seed", bench_seed, "recorded in the report");
  bench_cmd->add_option("--out-dir", bench_out, "report directory");
  bench_cmd->add_option("--jobs", jobs, "parallel rows (default sequential)");

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic "
                                                "scenario");
  int rows = 10, cols = 10, route_len = 20;
  double block = 100.0, noise = 0.0, period = 1.0;
  std::uint64_t synth_seed = 0;
  std::string synth_out = "scenario";
  synth_cmd->add_option("--rows", rows, "grid rows");
  synth_cmd->add_option("--cols", cols, "grid columns");
  synth_cmd->add_option("--block", block, "block size in meters");
  synth_cmd->add_option("--route-len", route_len, "route length in edges");
  synth_cmd->add_option("--noise", noise, "gaussian noise sigma in meters");
  synth_cmd->add_option("--period", period, "sampling period in seconds");
  synth_cmd->add_option("--seed", synth_seed, "rng seed");
  synth_cmd->add_option("--out-dir", synth_out, "scenario directory");

  // convert
  auto* conv_cmd = app.add_subcommand("convert", "convert external data");
  std::string conv_input, conv_format = "csv", conv_out = "converted";
  conv_cmd->add_option("input", conv_input, "input file or directory")
      ->required();
  conv_cmd->add_option("--format", conv_format, "zenodo | csv");
  conv_cmd->add_option("--out-dir", conv_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (match_cmd->parsed()) {
      return cmd_match(network_file, trace_file, algorithm, alpha, beta,
                       sigma, out_file);
    }
    if (bench_cmd->parsed()) {
      return cmd_benchmark(dataset_dir, periods, algorithms, bench_seed,
                           bench_out, jobs);
    }
    if (synth_cmd->parsed()) {
      return cmd_synth(rows, cols, block, route_len, noise, period,
                       synth_seed, synth_out);
    }
    if (conv_cmd->parsed()) {
      return cmd_convert(conv_input, conv_format, conv_out);
    }
  } catch (const MatchFailure& e) {
    std::cerr << "match failure at measurement " << e.measurement_index
              << ": " << e.what() << "\n";
    return kExitMatchFailure;
  } catch (const MatchError& e) {
    std::cerr << "match failure: " << e.what() << "\n";
    return kExitMatchFailure;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitOk;
}

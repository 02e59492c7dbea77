#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "mapmatch/gsmm.hpp"
#include "mapmatch/hmm.hpp"
#include "mapmatch/incremental.hpp"
#include "mapmatch/network.hpp"
#include "mapmatch/trace.hpp"

namespace mapmatch::eval {

// Route Mismatch Fraction: (false-positive length + false-negative length)
// over the ground-truth length. 0 is a perfect match.
struct RmfBreakdown {
  double l_gt = 0.0;
  double l_plus = 0.0;
  double l_minus = 0.0;
  double rmf = 0.0;
};

// Paths are compared as multisets of directed edge ids (per occurrence).
// Throws ZeroGroundTruth when gt is empty and ValidationError on unknown
// edge ids.
RmfBreakdown rmf(const MatchPath& gt, const MatchPath& m,
                 const RoadNetwork& net);

// rows x cols node lattice, bidirectional edges between 4-neighbors,
// block-meter spacing. Node (r, c) has id r*cols + c.
RoadNetwork generate_grid(int rows, int cols, double block,
                          GeoPoint base = {50.0, 14.0},
                          double grid_cell = 250.0);

struct GeneratedTrace {
  Trace trace;
  MatchPath ground_truth;
};

// Walks the route at `speed` m/s, emitting a measurement every `period`
// seconds plus isotropic Gaussian noise (std noise_sigma, seeded); the exact
// route end is always emitted. Ground truth is the route itself.
GeneratedTrace generate_trace(const RoadNetwork& net,
                              const std::vector<EdgeId>& route,
                              double noise_sigma, double period,
                              std::uint64_t seed, double speed = 10.0);

// Random route with no repeated node. With clearance > 0 the route also
// never re-approaches itself: no later node comes within `clearance` meters
// of an earlier one while being more than `detour_ratio` times as far along
// the route. The search cannot represent near-revisits (the published
// evaluation protocol excludes cyclic traces for the same reason), so
// recovery scenarios generate trip-like routes with a clearance. Throws if
// the network cannot host one of the requested length after bounded
// retries.
std::vector<EdgeId> random_simple_route(const RoadNetwork& net, int n_edges,
                                        std::mt19937_64& rng,
                                        double clearance = 0.0,
                                        double detour_ratio = 2.2);

// Out-and-back route: a simple walk, then its reverse edges part-way back,
// then onward. Guarantees a proximity self-intersection in the trace.
std::vector<EdgeId> random_out_and_back_route(const RoadNetwork& net,
                                              int out_edges, int back_edges,
                                              std::mt19937_64& rng);

enum class Algorithm { Gsmm, Hmm, Incremental };

const char* algorithm_name(Algorithm a);
bool parse_algorithm(const std::string& s, Algorithm& out);

struct AlgoConfigs {
  gsmm::Config gsmm;
  hmm::Config hmm;
  incremental::Config incremental;
  double net_scale = 25.0;  // trace-splitting scale
};

// Shared pipeline: split the trace, match every part with the chosen
// algorithm, join part paths (deduplicating shared boundary edges).
MatchPath run_matcher(const RoadNetwork& net, const Trace& tr, Algorithm alg,
                      const AlgoConfigs& cfgs);

struct BenchmarkCase {
  std::string id;
  RoadNetwork net;
  Trace trace;
  MatchPath ground_truth;
};

struct BenchmarkRow {
  std::string trace_id;
  double period_s = 0.0;
  Algorithm algorithm = Algorithm::Gsmm;
  bool success = false;
  RmfBreakdown rmf;  // valid only when success
  double l_gt = 0.0; // known even on failure
  double runtime_s = 0.0;
  std::string error;
};

struct BenchmarkAggregate {
  double period_s = 0.0;
  Algorithm algorithm = Algorithm::Gsmm;
  double mean_rmf = 0.0;  // over successful rows (NaN when none)
  double mean_runtime_s = 0.0;  // over all rows
  int n_rows = 0;
  int n_success = 0;
};

struct BenchmarkReport {
  std::vector<BenchmarkRow> rows;
  std::vector<BenchmarkAggregate> aggregates() const;
  void write_rows_csv(const std::filesystem::path& path) const;
  void write_aggregate_csv(const std::filesystem::path& path) const;
};

// The paper's sub-sampling protocol: eleven periods from 1 s to 5 min.
std::vector<double> default_periods();

// For each case x period x algorithm: subsample, split, match with
// wall-clock timing, score against ground truth. Failures are recorded, not
// fatal. jobs > 1 runs rows on that many threads (each row timed on its own
// thread).
BenchmarkReport run_benchmark(const std::vector<BenchmarkCase>& cases,
                              const std::vector<double>& periods,
                              const std::vector<Algorithm>& algorithms,
                              const AlgoConfigs& cfgs = {}, int jobs = 1);

}  // namespace mapmatch::eval

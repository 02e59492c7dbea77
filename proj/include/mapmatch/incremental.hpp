#pragma once

#include "mapmatch/network.hpp"
#include "mapmatch/trace.hpp"

// Local incremental baseline: greedy edge-by-edge extension scored by
// distance and orientation with fixed-depth lookahead. Kept deliberately
// faithful to its published weaknesses; failures are expected output.
namespace mapmatch::incremental {

struct Config {
  double mu_d = 10.0;        // distance score maximum
  double n_d = 1.0;          // distance exponent
  double a = 0.17;           // distance decay per meter
  double mu_alpha = 10.0;    // orientation score maximum
  int n_alpha = 7;           // orientation cosine exponent
  int lookahead_depth = 4;   // measurements evaluated per commitment
  double start_radius = 100.0;
  int max_skipped = 10;      // consecutive unabsorbable measurements allowed
};

// mu_d - a * d^n_d
double distance_score(double d, const Config& cfg);

// mu_alpha * cos(theta)^n_alpha for theta <= pi/2, else 0.
double orientation_score(double theta, const Config& cfg);

// Throws MatchFailure (with the breaking measurement index) when more than
// max_skipped consecutive measurements cannot be absorbed, or when no edge
// lies within start_radius of the first measurement.
MatchPath match(const RoadNetwork& net, const Trace& tr,
                const Config& cfg = {});

}  // namespace mapmatch::incremental

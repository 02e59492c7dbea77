#pragma once

#include <vector>

#include "mapmatch/network.hpp"
#include "mapmatch/trace.hpp"

// HMM map-matching baseline: per-measurement candidates, Gaussian emissions,
// exponential transitions on the route/straight distance gap, Viterbi.
namespace mapmatch::hmm {

struct Config {
  double sigma = 50.0;             // emission noise scale, meters
  double beta_t = 2.0;             // transition scale, meters
  double candidate_radius = 15.0;  // candidate edges per measurement
  // Bound on each pairwise route search. 0 = automatic:
  // straight-line distance * 10 + 2000 m.
  double route_search_cap = 0.0;
};

struct Candidate {
  EdgeId edge = 0;
  PlanePoint point;             // projection of the measurement on the edge
  double offset_on_edge = 0.0;  // meters along the edge geometry
  double emission_logp = 0.0;
};

// log N(d | 0, sigma): -(d/sigma)^2 / 2 - ln(sigma * sqrt(2*pi))
double emission_logp(double d, double sigma);

// log Exp(|d_route - d_straight| | beta_t): -delta/beta_t - ln(beta_t)
double transition_logp(double d_straight, double d_route, double beta_t);

// Nearest projection per edge within radius, sorted by edge id.
std::vector<Candidate> candidates_for(const RoadNetwork& net, PlanePoint q,
                                      double radius);

// Network distance from a's position to b's position (remainder of a.edge,
// connecting edges, prefix of b.edge), or +infinity if none within cap.
double route_distance(const RoadNetwork& net, const Candidate& a,
                      const Candidate& b, double cap);

// Same search, also yielding the edge chain a.edge ... b.edge. Returns an
// empty vector when no route exists within cap.
std::vector<EdgeId> route_between(const RoadNetwork& net, const Candidate& a,
                                  const Candidate& b, double cap,
                                  double* dist_out = nullptr);

// Viterbi decode. Measurements with no candidate in radius are skipped.
// Throws NoViableSequence when every lattice path has probability zero.
MatchPath match(const RoadNetwork& net, const Trace& tr,
                const Config& cfg = {});

}  // namespace mapmatch::hmm

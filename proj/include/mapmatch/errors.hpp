#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mapmatch {

// Input-side failures (bad files, broken invariants in data). CLI exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public InputError {
 public:
  using InputError::InputError;
};

class ValidationError : public InputError {
 public:
  using InputError::InputError;
};

// Matching failures (a matcher could not produce a path). CLI exit code 1.
class MatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// No edge within the start/destination search radius.
class NoCandidateEdge : public MatchError {
 public:
  using MatchError::MatchError;
};

// Search queue exhausted before the destination was reached.
class Unreachable : public MatchError {
 public:
  using MatchError::MatchError;
};

// Every path through the HMM lattice has probability zero.
class NoViableSequence : public MatchError {
 public:
  using MatchError::MatchError;
};

// Incremental matcher broke its chain; carries the measurement index.
class MatchFailure : public MatchError {
 public:
  MatchFailure(std::size_t measurement_index, const std::string& msg)
      : MatchError(msg), measurement_index(measurement_index) {}
  std::size_t measurement_index;
};

class ZeroGroundTruth : public InputError {
 public:
  using InputError::InputError;
};

}  // namespace mapmatch

#pragma once

#include "flattori/common.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace flattori {

struct CoverageFailure {
  Modulus tau;
  std::string reason;
};

struct CoverageReport {
  long samples = 0;
  long realized = 0;
  double max_residual = 0;  // |modulus_formula(solve_params(...)) - target|
  double min_margin = 0;    // smallest region margin of a chosen target
  std::vector<CoverageFailure> failures;
};

// Draws moduli uniformly from the short part of the reduced half (0 <= Re <= 1/2,
// |tau| >= 1, Im < 33) and checks that each one is realized by a 19-family diplotorus.
CoverageReport coverage_audit(long samples, std::uint64_t seed, double residual_tol = 1e-8);

}  // namespace flattori

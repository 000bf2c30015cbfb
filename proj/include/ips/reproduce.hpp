#pragma once

#include <cstdint>

#include "ips/mrftest.hpp"

namespace ips {

/// Quantitative reproduction of the three-vertex counterexample at t = 1.
///
/// Among replicates whose middle vertex has jumped by time 1, the initial
/// state of one end is a fair coin (conditioning on the middle path alone),
/// yet it is exactly the complement of the other end's initial state. The
/// struct carries the conditional estimate, the deterministic relation check,
/// and the first-order suite result.
struct Example35Result {
  std::size_t n_samples = 0;
  std::size_t n_conditioned = 0;          // replicates with middle state 1 at t = 1-
  double p_end_given_middle = 0;          // estimate of P(x0(0) = 1 | x1(1-) = 1)
  double four_std_errors = 0;             // 4 * sqrt(1/4 / n_conditioned)
  double p_end_given_both[2] = {0, 0};    // P(x0(0) = 1 | x1(1-) = 1, x2(0) = k): 1 and 0
  bool complement_relation_held = false;  // x0(0) == 1 - x2(0) on every conditioned draw
  SuiteResult alpha1_suite;               // first-order test: expected to reject
};

Example35Result example35_reproduction(std::size_t n_samples, std::uint64_t seed,
                                       int threads = 1, int n_permutations = 399);

}  // namespace ips

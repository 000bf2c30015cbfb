#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ips/graph.hpp"
#include "ips/model.hpp"
#include "ips/trajectory.hpp"

namespace ips {

/// States read off at fixed grid times in [0, t] (the value at t itself is
/// the left limit).
struct GridStatesScheme {
  std::vector<double> grid;
};

/// (time bin, jump) pairs of the first max_jumps jumps before t, padded with
/// (0, 0). Bin k covers (edges[k-1], edges[k]].
struct JumpSignatureScheme {
  int max_jumps = 1;
  std::vector<double> bin_edges;
};

using SummaryScheme = std::variant<GridStatesScheme, JumpSignatureScheme>;

/// Equispaced grid {0, t/2, t}; the default discretization.
SummaryScheme default_scheme(double t);

/// Discrete code of the path of one vertex on [0, t). Depends on that
/// vertex's path only, so conditional independence of paths implies
/// conditional independence of codes.
std::vector<std::int32_t> summarize(const Trajectory& x, VertexId v, const SummaryScheme& scheme,
                                    double t);

struct CITestReport {
  std::vector<VertexId> a, b, s;
  int alpha = 0;
  double cmi = 0;      // plug-in estimate on the (marks, summary) codes
  double p_value = 1;  // stratified permutation null
  std::size_t n_samples = 0;
  int n_permutations = 0;
  double level = 0.01;
  bool reject = false;
  std::size_t n_strata = 0;
};

struct EnsembleSample {
  std::vector<Mark> marks;
  Trajectory traj;
};

/// Tests whether the (marks, path summaries) of block a are independent of
/// those of block b given those of block s, over an i.i.d. ensemble.
/// The p-value comes from permuting a-codes within each s-stratum; strata
/// with fewer than 5 samples are merged into one "other" stratum first.
CITestReport ci_test(std::span<const EnsembleSample> ensemble, const VertexSet& a,
                     const VertexSet& b, const VertexSet& s, const SummaryScheme& scheme,
                     double t, double level, int n_permutations, std::uint64_t seed,
                     int threads = 1);

struct SuiteOptions {
  double level = 0.01;
  int n_permutations = 999;
  int threads = 1;
  bool use_default_scheme = true;
  SummaryScheme scheme = GridStatesScheme{};
};

struct SuiteResult {
  std::vector<CITestReport> reports;
  double bonferroni_level = 0;  // level / number of tests
  bool any_rejection = false;   // some test fell below the Bonferroni level
};

/// Runs ci_test for every connected block A with |A| <= 2 whose
/// alpha-neighborhood S leaves a nonempty remainder B, over a fresh ensemble
/// of n_samples (marks, trajectory) draws with no frozen vertices.
SuiteResult mrf_suite(const MarkedGraph& g, const Model& m, const MarksSampler& sampler,
                      int alpha, double t, std::size_t n_samples, std::uint64_t seed,
                      const SuiteOptions& options = {});

/// The A-blocks the suite will test, in order.
std::vector<VertexSet> suite_blocks(const MarkedGraph& g, int alpha);

}  // namespace ips

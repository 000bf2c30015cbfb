#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ips/graph.hpp"
#include "ips/model.hpp"

namespace ips {

using Config = std::vector<State>;  // one state per vertex

/// Finite probability mass function over integer tuples (all atoms have the
/// same arity). Probabilities are nonnegative and sum to 1 within 1e-12.
struct FinitePMF {
  std::vector<std::vector<std::int32_t>> atoms;
  std::vector<double> probs;

  std::size_t size() const { return atoms.size(); }
  std::size_t arity() const { return atoms.empty() ? 0 : atoms.front().size(); }
  void validate() const;

  static FinitePMF point_mass(std::vector<std::int32_t> atom);
  static FinitePMF from_entries(std::vector<std::pair<std::vector<std::int32_t>, double>> entries);
};

/// Generator of the configuration-level Markov chain of a model on a graph:
/// states are the configurations reachable from a given support, transitions
/// are single-vertex jumps at the model's rates. Only Markov,
/// piecewise-constant, mark-free-rate models qualify.
struct ConfigurationChain {
  std::vector<Config> states;
  std::unordered_map<std::string, std::size_t> index;          // key(config) -> row
  std::vector<std::vector<std::pair<std::size_t, double>>> rows;  // off-diagonal rates
  std::vector<double> exit_rate;

  std::size_t state_index(const Config& c) const;  // throws input_error if absent
};

ConfigurationChain build_chain(const MarkedGraph& g, const Model& m,
                               std::span<const Config> initial_support,
                               std::size_t cap = 10000);

/// Law at time t started from `initial` (a pmf over configurations),
/// computed by uniformization with Poisson-tail truncation below 1e-13.
FinitePMF transient_distribution(const ConfigurationChain& chain, const FinitePMF& initial,
                                 double t);

/// Joint law of the configurations observed at the grid times, as a pmf over
/// flattened tuples ordered time-major: coordinates [i * n_vertices + v].
/// Grid times are strictly increasing and nonnegative; a leading 0 keeps the
/// initial configuration as part of the tuple.
FinitePMF grid_path_law(const ConfigurationChain& chain, const FinitePMF& initial,
                        std::span<const double> grid, std::size_t max_atoms = 1000000);

/// Plug-in conditional mutual information I(A;B|S) in nats over coordinate
/// blocks of a pmf. Coordinates outside the blocks are marginalized out;
/// s_coords may be empty (plain mutual information). Exact up to float.
double conditional_mutual_information(const FinitePMF& joint,
                                      std::span<const int> a_coords,
                                      std::span<const int> b_coords,
                                      std::span<const int> s_coords);

/// Reweights p0 by a positive factor per atom and renormalizes.
FinitePMF tilt_pmf(const FinitePMF& p0,
                   const std::function<double(std::span<const std::int32_t>)>& factor);

struct FactorizationCheck {
  double ci_before = 0;
  double ci_after = 0;
};

/// Conditional independence of coordinates 0 and 1 given coordinate 2 is
/// preserved by any tilt that factorizes as rho1(z0,z2) * rho2(z1,z2).
/// Requires p0 to be conditionally independent (CMI below 1e-10) and the
/// tilted mass to be positive; returns the CMI before and after tilting.
FactorizationCheck check_factorization_ci(const FinitePMF& p0,
                                          const std::function<double(int, int)>& rho1,
                                          const std::function<double(int, int)>& rho2);

/// Pushforward of an independent marks product through the model's initial
/// map: the exact law of the initial configuration.
FinitePMF initial_pmf_from_marks(const Model& m, const MarksSampler& sampler,
                                 std::size_t cap = 1 << 20);

/// Configurations charged by a pmf, in atom order.
std::vector<Config> pmf_support(const FinitePMF& pmf);

}  // namespace ips

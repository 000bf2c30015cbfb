#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "ips/graph.hpp"
#include "ips/model.hpp"
#include "ips/sim.hpp"
#include "ips/trajectory.hpp"

namespace ips {

/// Likelihood ratio at time t of the model law against the law in which the
/// vertices of a set W run at unit rate per jump type, evaluated on a
/// realization of the latter:
///
///   L = [ prod over W-jumps (tau_k, j_k, v_k) of rate_{v_k, j_k}(tau_k) ]
///       * exp( - sum over (j, v) in J x W of integral_0^t (rate - 1) ds )
///
/// with every rate evaluated on the history strictly before the jump. All
/// arithmetic is carried in log space; a zero rate at an observed jump makes
/// the whole weight zero (flagged, not an error).
struct LikelihoodWeight {
  double t = 0;
  bool open_interval = false;  // product over tau < t instead of tau <= t
  double log_jump_term = 0;    // sum of log rates at W-jumps (zero factors excluded)
  double compensator = 0;      // sum of integrals of (rate - 1)
  double quad_error = 0;       // bound on quadrature error in the compensator
  bool weight_is_zero = false;

  /// log g_v per vertex of W; the total log weight is their ordered sum.
  std::vector<std::pair<VertexId, double>> per_vertex;

  double log_value() const;  // -inf if weight_is_zero
  double value() const;
};

LikelihoodWeight weight(const Model& m, const MarkedGraph& g, std::span<const Mark> marks,
                        const Trajectory& xhat, const VertexSet& w, double t,
                        bool open_interval);

/// Convenience overload using the graph's own marks.
LikelihoodWeight weight(const Model& m, const MarkedGraph& g, const Trajectory& xhat,
                        const VertexSet& w, double t, bool open_interval);

struct Estimate {
  double estimate = 0;
  double std_error = 0;
  std::size_t n_reps = 0;
};

using PathFunctional = std::function<double(std::span<const Mark>, const Trajectory&)>;

/// Importance-sampling estimate of E[f] under the model law: the mean of
/// L * f over replicates of the unit-rate-on-W dynamics.
Estimate importance_estimate(const Model& m, const MarkedGraph& g, const MarksSampler& sampler,
                             const VertexSet& w, double horizon, const PathFunctional& f,
                             std::size_t n_reps, std::uint64_t seed, int threads = 1);

struct MartingalePoint {
  double t = 0;
  double mean = 0;
  double std_error = 0;
  bool flagged = false;  // |mean - 1| > 4 std errors
};

/// Monte Carlo mean of the weight at each grid time. The weight process has
/// unit expectation at every t, so flags indicate either bad luck or a bug.
std::vector<MartingalePoint> martingale_diagnostic(const Model& m, const MarkedGraph& g,
                                                   const MarksSampler& sampler,
                                                   const VertexSet& w,
                                                   std::span<const double> time_grid,
                                                   std::size_t n_reps, std::uint64_t seed,
                                                   int threads = 1);

}  // namespace ips

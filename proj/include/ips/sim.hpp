#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ips/graph.hpp"
#include "ips/model.hpp"
#include "ips/trajectory.hpp"

namespace ips {

/// Descriptor of the driving randomness. Per vertex, candidate points are
/// generated lazily on (0, horizon] x (0, level_v] x jumps at unit intensity:
/// exponential time increments at rate |J| * level_v, jump mark uniform on J,
/// thinning coordinate uniform on (0, level_v]. The stream of vertex v is
/// seeded by seed_split(master_seed, stream_id[v]) and is fully determined by
/// (master_seed, stream_id, level, |J|).
///
/// Levels are at least 1, so the same streams can drive both the target
/// process (accept iff the thinning coordinate is below the local rate) and
/// the unit-rate dynamics of frozen vertices (accept iff it is below 1),
/// giving a common-random-numbers coupling of the two.
struct PoissonStreams {
  std::uint64_t master_seed = 0;
  double horizon = 0;
  std::vector<std::uint64_t> stream_ids;  // per vertex
  std::vector<double> levels;             // per vertex, >= 1
};

/// Streams for g with levels max(rate_bound(|cl(v)|, horizon), 1).
PoissonStreams make_streams(const MarkedGraph& g, const Model& m, double horizon,
                            std::uint64_t master_seed);

/// Exact simulation by thinning. Candidates are processed in global time
/// order (ties broken by vertex id, then draw index); a candidate (s, u, j, v)
/// is accepted iff v is frozen and u <= 1, or v is not frozen and u is at
/// most the rate of (v, j) evaluated on the history strictly before s.
/// Initial states come from the model's initial map applied to `marks`
/// (default: the graph's marks).
Trajectory simulate(const MarkedGraph& g, const Model& m, const PoissonStreams& streams,
                    double horizon, const VertexSet& frozen, std::span<const Mark> marks = {});

/// n_reps independent trajectories; replicate k is driven by streams with
/// master seed seed_split(master_seed, k). Bit-identical for any thread
/// count.
std::vector<Trajectory> replicate(const MarkedGraph& g, const Model& m, double horizon,
                                  const VertexSet& frozen, std::size_t n_reps,
                                  std::uint64_t master_seed, int threads = 1);

struct ReplicateDraw {
  std::vector<Mark> marks;
  Trajectory traj;
};

/// One (marks, trajectory) draw: marks from the sampler, then a simulation
/// driven by a stream derived from the same replicate seed. This is the
/// common sampling path used by direct Monte Carlo, importance sampling and
/// the conditional-independence test ensembles.
ReplicateDraw sample_replicate(const MarkedGraph& g, const Model& m, const MarksSampler& sampler,
                               double horizon, const VertexSet& frozen, std::uint64_t rep_seed);

}  // namespace ips

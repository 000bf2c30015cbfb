#include "ips/sim.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

#include "ips/errors.hpp"
#include "ips/parallel.hpp"
#include "ips/rng.hpp"

namespace ips {

namespace {
constexpr std::uint64_t kMarksSubstream = 0x6d61726b73ULL;    // "marks"
constexpr std::uint64_t kDriverSubstream = 0x6472697665ULL;   // "drive"
}  // namespace

PoissonStreams make_streams(const MarkedGraph& g, const Model& m, double horizon,
                            std::uint64_t master_seed) {
  if (horizon <= 0) throw input_error("make_streams: horizon must be positive");
  PoissonStreams s;
  s.master_seed = master_seed;
  s.horizon = horizon;
  s.stream_ids.resize(g.size());
  s.levels.resize(g.size());
  for (std::size_t v = 0; v < g.size(); ++v) {
    s.stream_ids[v] = v;
    const double bound = m.rate_bound(static_cast<int>(g.closure_of(static_cast<VertexId>(v)).size()), horizon);
    if (!std::isfinite(bound) || bound < 0)
      throw model_contract_error("rate bound is not a finite nonnegative number");
    s.levels[v] = std::max(bound, 1.0);
  }
  return s;
}

namespace {

struct Candidate {
  double t;
  VertexId v;
  std::uint64_t draw;
  double u;   // thinning coordinate in (0, level_v)
  int jump;

  // min-heap by (t, v, draw): simultaneous times across vertices have
  // probability zero but are resolved the same way in every run
  bool operator>(const Candidate& other) const {
    if (t != other.t) return t > other.t;
    if (v != other.v) return v > other.v;
    return draw > other.draw;
  }
};

}  // namespace

Trajectory simulate(const MarkedGraph& g, const Model& m, const PoissonStreams& streams,
                    double horizon, const VertexSet& frozen, std::span<const Mark> marks) {
  const std::size_t n = g.size();
  if (horizon <= 0) throw input_error("simulate: horizon must be positive");
  if (horizon > streams.horizon + 1e-12)
    throw input_error("simulate: horizon exceeds the stream horizon");
  if (streams.stream_ids.size() != n || streams.levels.size() != n)
    throw input_error("simulate: streams sized for a different graph");
  g.check_subset(frozen);
  if (marks.empty()) marks = g.marks();
  if (marks.size() != n) throw input_error("simulate: expected one mark per vertex");

  Trajectory out;
  out.horizon = horizon;
  out.initial.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    out.initial[v] = m.initial_map(marks[v]);
    if (!m.state_space.contains(out.initial[v]))
      throw input_error("simulate: initial state of vertex " + std::to_string(v) +
                        " outside the declared state space");
  }

  std::vector<char> is_frozen(n, 0);
  for (VertexId v : frozen.members()) is_frozen[v] = 1;

  const std::size_t n_jumps = m.jump_set.size();
  std::vector<Rng> rngs;
  rngs.reserve(n);
  std::vector<double> clock(n, 0.0);
  std::vector<std::uint64_t> draws(n, 0);
  std::priority_queue<Candidate, std::vector<Candidate>, std::greater<>> queue;

  // Fixed per-candidate draw order: time increment, jump mark, thinning level.
  const auto push_next = [&](VertexId v) {
    const double level = streams.levels[v];
    Rng& rng = rngs[v];
    clock[v] += rng.exponential(static_cast<double>(n_jumps) * level);
    const int jump = m.jump_set.jumps[rng.below(n_jumps)];
    const double u = level * rng.uniform01();
    if (clock[v] <= horizon) queue.push({clock[v], v, draws[v]++, u, jump});
  };

  for (std::size_t v = 0; v < n; ++v) {
    rngs.emplace_back(seed_split(streams.master_seed, streams.stream_ids[v]));
    push_next(static_cast<VertexId>(v));
  }

  std::vector<State> current = out.initial;
  std::vector<std::vector<Event>> by_vertex(n);
  const PathsRef paths{out.initial, &by_vertex};

  while (!queue.empty()) {
    const Candidate c = queue.top();
    queue.pop();
    bool accept;
    if (is_frozen[c.v]) {
      accept = c.u <= 1.0;
    } else {
      const LocalContext ctx(g, marks, paths, c.v, c.t);
      const double r = m.rate(c.t, c.v, c.jump, ctx);
      if (!std::isfinite(r))
        throw numeric_error("simulate: non-finite rate at t=" + std::to_string(c.t));
      if (r < 0)
        throw model_contract_error("simulate: negative rate at t=" + std::to_string(c.t));
      if (r > streams.levels[c.v] * (1 + 1e-12))
        throw model_contract_error("simulate: rate " + std::to_string(r) + " at vertex " +
                                   std::to_string(c.v) + " exceeds its bound " +
                                   std::to_string(streams.levels[c.v]));
      accept = c.u <= r;
    }
    if (accept) {
      const State next = current[c.v] + c.jump;
      if (!is_frozen[c.v] && !m.state_space.contains(next))
        throw model_contract_error("simulate: accepted jump leaves the state space at vertex " +
                                   std::to_string(c.v));
      current[c.v] = next;
      const Event e{c.t, c.v, c.jump, next};
      by_vertex[c.v].push_back(e);
      out.events.push_back(e);
    }
    push_next(c.v);
  }
  return out;
}

std::vector<Trajectory> replicate(const MarkedGraph& g, const Model& m, double horizon,
                                  const VertexSet& frozen, std::size_t n_reps,
                                  std::uint64_t master_seed, int threads) {
  if (n_reps < 1) throw input_error("replicate: n_reps must be >= 1");
  return replicate_map<Trajectory>(
      n_reps, master_seed, threads, [&](std::size_t, std::uint64_t rep_seed) {
        const auto streams = make_streams(g, m, horizon, seed_split(rep_seed, kDriverSubstream));
        return simulate(g, m, streams, horizon, frozen);
      });
}

ReplicateDraw sample_replicate(const MarkedGraph& g, const Model& m, const MarksSampler& sampler,
                               double horizon, const VertexSet& frozen, std::uint64_t rep_seed) {
  if (sampler.size() != g.size())
    throw input_error("sample_replicate: marks sampler sized for a different graph");
  Rng marks_rng(seed_split(rep_seed, kMarksSubstream));
  ReplicateDraw draw;
  draw.marks = sampler.sample(marks_rng);
  const auto streams = make_streams(g, m, horizon, seed_split(rep_seed, kDriverSubstream));
  draw.traj = simulate(g, m, streams, horizon, frozen, draw.marks);
  return draw;
}

}  // namespace ips

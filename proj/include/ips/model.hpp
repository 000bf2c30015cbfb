#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ips/graph.hpp"
#include "ips/rng.hpp"
#include "ips/trajectory.hpp"

namespace ips {

/// Finite set of admissible state increments. Nonempty, 0 excluded.
struct JumpSet {
  std::vector<int> jumps;  // sorted, unique

  explicit JumpSet(std::vector<int> js);
  std::size_t size() const { return jumps.size(); }
  bool contains(int j) const;
};

/// Declared state space of the target process. Vertices running at forced
/// unit rate (reference dynamics) may leave it; everything else may not.
struct StateSpace {
  bool all_integers = false;
  std::vector<State> values;  // sorted, used when !all_integers

  static StateSpace integers();
  static StateSpace finite(std::vector<State> values);
  bool contains(State s) const;
};

enum class RateKind {
  PiecewiseConstant,  // constant between consecutive events of the local history
  TimeVarying,        // cagld in t; compensators integrate by adaptive quadrature
};

/// Handle to path data: initial states plus per-vertex time-sorted events.
struct PathsRef {
  std::span<const State> initial;
  const std::vector<std::vector<Event>>* by_vertex = nullptr;
};

/// What a rate function is allowed to see: marks and history of the closed
/// neighborhood of one vertex, strictly before a cutoff time. Access outside
/// the closure throws, so locality holds by interface shape rather than by
/// convention; the cutoff makes the evaluation predictable.
class LocalContext {
 public:
  LocalContext(const MarkedGraph& g, std::span<const Mark> marks, PathsRef paths,
               VertexId center, double cutoff);

  VertexId center() const { return center_; }
  double cutoff() const { return cutoff_; }
  std::span<const VertexId> closure() const { return closure_; }

  const Mark& mark(VertexId u) const;
  State initial_state(VertexId u) const;
  State state_before(VertexId u) const;            // left limit at the cutoff
  std::span<const Event> history(VertexId u) const;  // events strictly before cutoff

 private:
  void check_local(VertexId u) const;

  const MarkedGraph* g_;
  std::span<const Mark> marks_;
  PathsRef paths_;
  VertexId center_;
  std::span<const VertexId> closure_;
  double cutoff_;
};

/// A family of per-vertex jump rates with its declared contract: jump set,
/// state space, a bound C(closure size, horizon) that dominates every rate,
/// and the map from a vertex mark to its initial state.
struct Model {
  std::string name;
  JumpSet jump_set{{1}};
  StateSpace state_space = StateSpace::integers();
  RateKind rate_kind = RateKind::PiecewiseConstant;
  double quadrature_tolerance = 1e-9;  // used when rate_kind == TimeVarying

  /// Rates depend on local paths only through the current configuration
  /// (required by the exact transient solver).
  bool markov = true;
  /// Rates read vertex marks beyond their role as initial data.
  bool rate_reads_marks = false;

  std::function<double(double t, VertexId v, int jump, const LocalContext&)> rate;
  std::function<double(int closure_size, double horizon)> rate_bound;
  std::function<State(const Mark&)> initial_map;
  nlohmann::json params;
};

/// Evaluates a rate and enforces the contract: known jump, finite
/// nonnegative value, value within the declared bound.
double eval_rate(const Model& m, double t, VertexId v, int jump, const LocalContext& ctx,
                 bool check_bound = true);

/// Three-vertex chain where the middle vertex jumps 0->1 at rate
/// 1{x0(0) != x2(0), x1(t-) = 0} and the ends never move. The minimal model
/// whose path law stays first-order-dependent across the middle vertex.
Model make_counterexample_model();
MarkedGraph counterexample_graph();

/// Named model catalog. Names: contact, sir, delayed_sir, glauber_ising,
/// voter_rate, constant_birth_death, counterexample.
Model make_builtin(const std::string& name, const nlohmann::json& params);

/// Interprets a mark as an integer state.
State mark_to_state(const Mark& k);

/// Independent per-vertex mark distributions.
struct MarkDist {
  enum class Kind { Fixed, Bernoulli, Choice };
  Kind kind = Kind::Fixed;
  Mark value = Mark(0);        // Fixed
  double p = 0.5;              // Bernoulli
  std::vector<Mark> choices;   // Choice, uniform

  Mark sample(Rng& rng) const;
};

struct MarksSampler {
  std::vector<MarkDist> per_vertex;

  std::vector<Mark> sample(Rng& rng) const;
  std::size_t size() const { return per_vertex.size(); }

  static MarksSampler fixed(std::span<const Mark> marks);
  static MarksSampler iid_bernoulli(std::size_t n, double p);
};

/// Ends fixed i.i.d. Bernoulli(1/2), middle pinned to 0.
MarksSampler counterexample_marks();

/// Randomized contract check: throws model_contract_error if any randomly
/// generated local history exposes a rate above the bound, a negative or
/// non-finite rate, dependence on history at or after the evaluation time,
/// or (for piecewise-constant models) variation between events.
void validate_model(const Model& m, const MarkedGraph& g, std::uint64_t seed, int n_trials = 200);

}  // namespace ips

#include "ips/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ips/errors.hpp"

namespace ips {

JumpSet::JumpSet(std::vector<int> js) : jumps(std::move(js)) {
  std::sort(jumps.begin(), jumps.end());
  jumps.erase(std::unique(jumps.begin(), jumps.end()), jumps.end());
  if (jumps.empty()) throw input_error("jump set must be nonempty");
  for (int j : jumps)
    if (j == 0) throw input_error("jump set must not contain 0");
}

bool JumpSet::contains(int j) const {
  return std::binary_search(jumps.begin(), jumps.end(), j);
}

StateSpace StateSpace::integers() {
  StateSpace s;
  s.all_integers = true;
  return s;
}

StateSpace StateSpace::finite(std::vector<State> values) {
  StateSpace s;
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  if (values.empty()) throw input_error("state space must be nonempty");
  s.values = std::move(values);
  return s;
}

bool StateSpace::contains(State x) const {
  return all_integers || std::binary_search(values.begin(), values.end(), x);
}

LocalContext::LocalContext(const MarkedGraph& g, std::span<const Mark> marks, PathsRef paths,
                           VertexId center, double cutoff)
    : g_(&g),
      marks_(marks),
      paths_(paths),
      center_(center),
      closure_(g.closure_of(center)),
      cutoff_(cutoff) {}

void LocalContext::check_local(VertexId u) const {
  if (!std::binary_search(closure_.begin(), closure_.end(), u))
    throw model_contract_error("rate for vertex " + std::to_string(center_) +
                               " accessed vertex " + std::to_string(u) +
                               " outside its closure");
}

const Mark& LocalContext::mark(VertexId u) const {
  check_local(u);
  return marks_[u];
}

State LocalContext::initial_state(VertexId u) const {
  check_local(u);
  return paths_.initial[u];
}

std::span<const Event> LocalContext::history(VertexId u) const {
  check_local(u);
  std::span<const Event> ev = (*paths_.by_vertex)[u];
  auto it = std::partition_point(ev.begin(), ev.end(),
                                 [&](const Event& e) { return e.t < cutoff_; });
  return ev.subspan(0, static_cast<std::size_t>(it - ev.begin()));
}

State LocalContext::state_before(VertexId u) const {
  const auto ev = history(u);
  return ev.empty() ? initial_state(u) : ev.back().state;
}

double eval_rate(const Model& m, double t, VertexId v, int jump, const LocalContext& ctx,
                 bool check_bound) {
  if (!m.jump_set.contains(jump))
    throw input_error("eval_rate: jump " + std::to_string(jump) + " not in the jump set");
  const double r = m.rate(t, v, jump, ctx);
  if (!std::isfinite(r)) throw numeric_error("rate is not finite at t=" + std::to_string(t));
  if (r < 0) throw model_contract_error("negative rate at t=" + std::to_string(t));
  if (check_bound) {
    const double bound = m.rate_bound(static_cast<int>(ctx.closure().size()), t);
    if (r > bound * (1 + 1e-12) + 1e-12)
      throw model_contract_error("rate " + std::to_string(r) + " exceeds declared bound " +
                                 std::to_string(bound));
  }
  return r;
}

State mark_to_state(const Mark& k) {
  if (k.is_number_integer()) return k.get<State>();
  if (k.is_boolean()) return k.get<bool>() ? 1 : 0;
  throw input_error("mark is not an integer: " + k.dump());
}

namespace {

double require_param(const nlohmann::json& params, const std::string& key) {
  if (!params.contains(key))
    throw input_error("model params: missing field \"" + key + "\"");
  if (!params[key].is_number())
    throw input_error("model params: field \"" + key + "\" must be a number");
  return params[key].get<double>();
}

double param_or(const nlohmann::json& params, const std::string& key, double fallback) {
  if (!params.contains(key)) return fallback;
  if (!params[key].is_number())
    throw input_error("model params: field \"" + key + "\" must be a number");
  return params[key].get<double>();
}

int count_neighbors_in_state(const LocalContext& ctx, VertexId v, State s) {
  int n = 0;
  for (VertexId u : ctx.closure())
    if (u != v && ctx.state_before(u) == s) ++n;
  return n;
}

Model make_contact(const nlohmann::json& params) {
  const double lambda = require_param(params, "lambda");
  const double mu = require_param(params, "mu");
  if (lambda < 0 || mu < 0) throw input_error("contact: rates must be nonnegative");
  Model m;
  m.name = "contact";
  m.params = {{"lambda", lambda}, {"mu", mu}};
  m.jump_set = JumpSet({+1, -1});
  m.state_space = StateSpace::finite({0, 1});
  m.rate = [lambda, mu](double, VertexId v, int jump, const LocalContext& ctx) -> double {
    const State self = ctx.state_before(v);
    if (jump == +1) return self == 0 ? lambda * count_neighbors_in_state(ctx, v, 1) : 0.0;
    return self == 1 ? mu : 0.0;
  };
  m.rate_bound = [lambda, mu](int d, double) { return std::max(lambda * (d - 1), mu); };
  m.initial_map = mark_to_state;
  return m;
}

Model make_sir(const nlohmann::json& params) {
  const double lambda = require_param(params, "lambda");
  const double mu = require_param(params, "mu");
  Model m;
  m.name = "sir";
  m.params = {{"lambda", lambda}, {"mu", mu}};
  m.jump_set = JumpSet({+1});
  m.state_space = StateSpace::finite({0, 1, 2});
  m.rate = [lambda, mu](double, VertexId v, int, const LocalContext& ctx) -> double {
    const State self = ctx.state_before(v);
    if (self == 0) return lambda * count_neighbors_in_state(ctx, v, 1);
    if (self == 1) return mu;
    return 0.0;
  };
  m.rate_bound = [lambda, mu](int d, double) { return std::max(lambda * (d - 1), mu); };
  m.initial_map = mark_to_state;
  return m;
}

// SIR whose recovery intensity ramps up with the time since infection;
// genuinely history-dependent, so excluded from the exact solvers.
Model make_delayed_sir(const nlohmann::json& params) {
  const double lambda = require_param(params, "lambda");
  const double mu = require_param(params, "mu");
  const double delay = require_param(params, "delay");
  if (delay <= 0) throw input_error("delayed_sir: delay must be positive");
  Model m;
  m.name = "delayed_sir";
  m.params = {{"lambda", lambda}, {"mu", mu}, {"delay", delay}};
  m.jump_set = JumpSet({+1});
  m.state_space = StateSpace::finite({0, 1, 2});
  m.rate_kind = RateKind::TimeVarying;
  m.quadrature_tolerance = 1e-9;
  m.markov = false;
  m.rate = [lambda, mu, delay](double t, VertexId v, int, const LocalContext& ctx) -> double {
    const State self = ctx.state_before(v);
    if (self == 0) return lambda * count_neighbors_in_state(ctx, v, 1);
    if (self != 1) return 0.0;
    double infected_at = 0;  // infected from the start unless the history says otherwise
    for (const Event& e : ctx.history(v))
      if (e.state == 1) infected_at = e.t;
    return mu * -std::expm1(-(t - infected_at) / delay);
  };
  m.rate_bound = [lambda, mu](int d, double) { return std::max(lambda * (d - 1), mu); };
  m.initial_map = mark_to_state;
  return m;
}

Model make_glauber_ising(const nlohmann::json& params) {
  const double beta = require_param(params, "beta");
  const double field = param_or(params, "field", 0.0);
  Model m;
  m.name = "glauber_ising";
  m.params = {{"beta", beta}, {"field", field}};
  m.jump_set = JumpSet({+1, -1});
  m.state_space = StateSpace::finite({0, 1});
  m.rate = [beta, field](double, VertexId v, int jump, const LocalContext& ctx) -> double {
    const State self = ctx.state_before(v);
    if ((jump == +1 && self != 0) || (jump == -1 && self != 1)) return 0.0;
    const double sigma = self >= 1 ? 1.0 : -1.0;
    double local_field = field;
    for (VertexId u : ctx.closure())
      if (u != v) local_field += ctx.state_before(u) >= 1 ? 1.0 : -1.0;
    // heat-bath flip rate, always <= 1
    return 1.0 / (1.0 + std::exp(2.0 * beta * sigma * local_field));
  };
  m.rate_bound = [](int, double) { return 1.0; };
  m.initial_map = mark_to_state;
  return m;
}

Model make_voter(const nlohmann::json& params) {
  const double scale = param_or(params, "rate", 1.0);
  if (scale < 0) throw input_error("voter_rate: rate must be nonnegative");
  Model m;
  m.name = "voter_rate";
  m.params = {{"rate", scale}};
  m.jump_set = JumpSet({+1, -1});
  m.state_space = StateSpace::finite({0, 1});
  m.rate = [scale](double, VertexId v, int jump, const LocalContext& ctx) -> double {
    const State self = ctx.state_before(v);
    const int deg = static_cast<int>(ctx.closure().size()) - 1;
    if (deg == 0) return 0.0;
    if (jump == +1 && self == 0)
      return scale * count_neighbors_in_state(ctx, v, 1) / static_cast<double>(deg);
    if (jump == -1 && self == 1)
      return scale * count_neighbors_in_state(ctx, v, 0) / static_cast<double>(deg);
    return 0.0;
  };
  m.rate_bound = [scale](int, double) { return scale; };
  m.initial_map = mark_to_state;
  return m;
}

Model make_constant_birth_death(const nlohmann::json& params) {
  const double a = require_param(params, "a");
  const double b = require_param(params, "b");
  if (a < 0 || b < 0) throw input_error("constant_birth_death: rates must be nonnegative");
  Model m;
  m.name = "constant_birth_death";
  m.params = {{"a", a}, {"b", b}};
  m.jump_set = JumpSet({+1, -1});
  m.state_space = StateSpace::finite({0, 1});
  m.rate = [a, b](double, VertexId v, int jump, const LocalContext& ctx) -> double {
    const State self = ctx.state_before(v);
    if (jump == +1) return self == 0 ? a : 0.0;
    return self == 1 ? b : 0.0;
  };
  m.rate_bound = [a, b](int, double) { return std::max(a, b); };
  m.initial_map = mark_to_state;
  return m;
}

}  // namespace

Model make_counterexample_model() {
  Model m;
  m.name = "counterexample";
  m.jump_set = JumpSet({+1});
  m.state_space = StateSpace::finite({0, 1});
  m.rate = [](double, VertexId v, int, const LocalContext& ctx) -> double {
    if (v != 1) return 0.0;  // the end vertices never jump
    const bool armed = ctx.initial_state(0) != ctx.initial_state(2);
    return (armed && ctx.state_before(1) == 0) ? 1.0 : 0.0;
  };
  m.rate_bound = [](int, double) { return 1.0; };
  m.initial_map = mark_to_state;
  return m;
}

MarkedGraph counterexample_graph() { return path_graph(3); }

MarksSampler counterexample_marks() {
  MarksSampler s;
  s.per_vertex.resize(3);
  s.per_vertex[0] = {MarkDist::Kind::Bernoulli, Mark(0), 0.5, {}};
  s.per_vertex[1] = {MarkDist::Kind::Fixed, Mark(0), 0.5, {}};
  s.per_vertex[2] = {MarkDist::Kind::Bernoulli, Mark(0), 0.5, {}};
  return s;
}

Model make_builtin(const std::string& name, const nlohmann::json& params) {
  if (name == "contact") return make_contact(params);
  if (name == "sir") return make_sir(params);
  if (name == "delayed_sir") return make_delayed_sir(params);
  if (name == "glauber_ising") return make_glauber_ising(params);
  if (name == "voter_rate") return make_voter(params);
  if (name == "constant_birth_death") return make_constant_birth_death(params);
  if (name == "counterexample") return make_counterexample_model();
  throw input_error("unknown model name \"" + name + "\"");
}

Mark MarkDist::sample(Rng& rng) const {
  switch (kind) {
    case Kind::Fixed:
      return value;
    case Kind::Bernoulli:
      return Mark(rng.uniform01() < p ? 1 : 0);
    case Kind::Choice:
      if (choices.empty()) throw input_error("marks sampler: empty choice list");
      return choices[rng.below(choices.size())];
  }
  throw input_error("marks sampler: bad kind");
}

std::vector<Mark> MarksSampler::sample(Rng& rng) const {
  std::vector<Mark> out;
  out.reserve(per_vertex.size());
  for (const auto& d : per_vertex) out.push_back(d.sample(rng));
  return out;
}

MarksSampler MarksSampler::fixed(std::span<const Mark> marks) {
  MarksSampler s;
  s.per_vertex.reserve(marks.size());
  for (const Mark& m : marks) s.per_vertex.push_back({MarkDist::Kind::Fixed, m, 0.5, {}});
  return s;
}

MarksSampler MarksSampler::iid_bernoulli(std::size_t n, double p) {
  if (p < 0 || p > 1) throw input_error("marks sampler: p must lie in [0,1]");
  MarksSampler s;
  s.per_vertex.assign(n, MarkDist{MarkDist::Kind::Bernoulli, Mark(0), p, {}});
  return s;
}

void validate_model(const Model& m, const MarkedGraph& g, std::uint64_t seed, int n_trials) {
  Rng rng(seed);
  const double horizon = 2.0;
  std::vector<State> states;
  if (m.state_space.all_integers)
    states = {-2, -1, 0, 1, 2};
  else
    states = m.state_space.values;

  for (int trial = 0; trial < n_trials; ++trial) {
    const auto v = static_cast<VertexId>(rng.below(g.size()));
    std::vector<State> initial(g.size(), states[0]);
    std::vector<std::vector<Event>> by_vertex(g.size());
    for (VertexId u : g.closure_of(v)) {
      initial[u] = states[rng.below(states.size())];
      const std::size_t k = rng.below(4);
      std::vector<double> times(k);
      for (auto& t : times) t = horizon * rng.uniform01();
      std::sort(times.begin(), times.end());
      State cur = initial[u];
      for (double t : times) {
        const int j = m.jump_set.jumps[rng.below(m.jump_set.size())];
        cur += j;
        by_vertex[u].push_back({t, u, j, cur});
      }
    }
    const double t = 0.25 * horizon + 0.5 * horizon * rng.uniform01();
    const PathsRef paths{initial, &by_vertex};

    for (int j : m.jump_set.jumps) {
      const LocalContext ctx(g, g.marks(), paths, v, t);
      const double r = eval_rate(m, t, v, j, ctx, /*check_bound=*/true);

      // Appending history at or after t must not be visible.
      auto padded = by_vertex;
      const double t_after = t + 0.1 * (horizon - t) * (1 + rng.uniform01());
      const State cur = ctx.state_before(v);
      padded[v].push_back({t_after, v, m.jump_set.jumps[0], cur + m.jump_set.jumps[0]});
      const PathsRef padded_paths{initial, &padded};
      const LocalContext padded_ctx(g, g.marks(), padded_paths, v, t);
      if (eval_rate(m, t, v, j, padded_ctx, false) != r)
        throw model_contract_error("model \"" + m.name +
                                   "\": rate depends on history at or after t");

      if (m.rate_kind == RateKind::PiecewiseConstant) {
        // Two interior times of the same inter-event gap must agree.
        std::vector<double> cuts{0.0, horizon};
        for (VertexId u : g.closure_of(v))
          for (const Event& e : by_vertex[u]) cuts.push_back(e.t);
        std::sort(cuts.begin(), cuts.end());
        auto hi = std::upper_bound(cuts.begin(), cuts.end(), t);
        const double b = *hi;
        const double a = *std::prev(hi);
        const double t2 = a + (b - a) * rng.uniform01();
        const LocalContext ctx2(g, g.marks(), paths, v, std::max(t2, 1e-12));
        if (m.rate(std::max(t2, 1e-12), v, j, ctx2) != r)
          throw model_contract_error("model \"" + m.name +
                                     "\": rate varies between local events");
      }
    }
  }
}

}  // namespace ips

#include "ips/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <string>

#include "ips/errors.hpp"
#include "ips/stats.hpp"

namespace ips {

void FinitePMF::validate() const {
  if (atoms.size() != probs.size()) throw input_error("pmf: atom/probability size mismatch");
  if (atoms.empty()) throw input_error("pmf: empty support");
  const std::size_t k = atoms.front().size();
  double total = 0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].size() != k) throw input_error("pmf: ragged atoms");
    if (!(probs[i] >= 0)) throw input_error("pmf: negative probability");
    total += probs[i];
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw input_error("pmf: probabilities sum to " + std::to_string(total));
}

FinitePMF FinitePMF::point_mass(std::vector<std::int32_t> atom) {
  FinitePMF p;
  p.atoms.push_back(std::move(atom));
  p.probs.push_back(1.0);
  return p;
}

FinitePMF FinitePMF::from_entries(
    std::vector<std::pair<std::vector<std::int32_t>, double>> entries) {
  FinitePMF p;
  for (auto& [a, w] : entries) {
    p.atoms.push_back(std::move(a));
    p.probs.push_back(w);
  }
  p.validate();
  return p;
}

namespace {

std::string config_key(const Config& c) {
  std::string key;
  key.reserve(c.size() * 4);
  for (State s : c) {
    key += std::to_string(s);
    key += ',';
  }
  return key;
}

std::vector<std::int32_t> config_to_atom(const Config& c) {
  std::vector<std::int32_t> a(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] < INT32_MIN || c[i] > INT32_MAX) throw capacity_error("configuration state overflow");
    a[i] = static_cast<std::int32_t>(c[i]);
  }
  return a;
}

Config atom_to_config(const std::vector<std::int32_t>& a) {
  return Config(a.begin(), a.end());
}

// Rate of (v, j) out of a fixed configuration: the context is a flat history
// sitting at c since time 0.
double config_rate(const MarkedGraph& g, const Model& m,
                   const std::vector<std::vector<Event>>& no_events, const Config& c, VertexId v,
                   int j) {
  const PathsRef paths{c, &no_events};
  const LocalContext ctx(g, g.marks(), paths, v, 1.0);
  return eval_rate(m, 1.0, v, j, ctx);
}

constexpr double kPoissonTail = 1e-14;

// Smallest K with P(Poisson(lambda) > K) below the tail target.
int poisson_truncation(double lambda) {
  if (lambda > 700.0) throw capacity_error("uniformization: rate*t too large for desk scale");
  double pmf = std::exp(-lambda);
  double cum = pmf;
  int k = 0;
  while (1.0 - cum > kPoissonTail) {
    ++k;
    pmf *= lambda / k;
    cum += pmf;
    if (k > 100000) throw capacity_error("uniformization: truncation did not converge");
  }
  return k;
}

// p <- p * (I + Q/Lambda), rows applied in index order.
std::vector<double> apply_substochastic(const ConfigurationChain& chain,
                                        const std::vector<double>& p, double lambda) {
  std::vector<double> next(p.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double mass = p[i];
    if (mass == 0) continue;
    next[i] += mass * (1.0 - chain.exit_rate[i] / lambda);
    for (const auto& [dst, rate] : chain.rows[i]) next[dst] += mass * (rate / lambda);
  }
  return next;
}

std::vector<double> transient_vector(const ConfigurationChain& chain, std::vector<double> p,
                                     double t) {
  double lambda = 0;
  for (double e : chain.exit_rate) lambda = std::max(lambda, e);
  if (lambda == 0 || t == 0) return p;
  const int K = poisson_truncation(lambda * t);
  std::vector<double> acc(p.size(), 0.0);
  double pois = std::exp(-lambda * t);
  for (int k = 0;; ++k) {
    for (std::size_t i = 0; i < p.size(); ++i) acc[i] += pois * p[i];
    if (k == K) break;
    p = apply_substochastic(chain, p, lambda);
    pois *= lambda * t / (k + 1);
  }
  return acc;
}

}  // namespace

std::size_t ConfigurationChain::state_index(const Config& c) const {
  const auto it = index.find(config_key(c));
  if (it == index.end()) throw input_error("configuration not in the enumerated chain");
  return it->second;
}

ConfigurationChain build_chain(const MarkedGraph& g, const Model& m,
                               std::span<const Config> initial_support, std::size_t cap) {
  if (!m.markov)
    throw unsupported_model_error("exact transient laws need Markov rates; model \"" + m.name +
                                  "\" is history-dependent");
  if (m.rate_kind != RateKind::PiecewiseConstant)
    throw unsupported_model_error("exact transient laws need piecewise-constant rates");
  if (m.rate_reads_marks)
    throw unsupported_model_error("exact transient laws need mark-free rates");

  ConfigurationChain chain;
  const std::vector<std::vector<Event>> no_events(g.size());
  std::deque<std::size_t> frontier;

  const auto intern = [&](const Config& c) -> std::size_t {
    const std::string key = config_key(c);
    if (const auto it = chain.index.find(key); it != chain.index.end()) return it->second;
    if (chain.states.size() >= cap)
      throw capacity_error("reachable configuration count exceeds the cap of " +
                           std::to_string(cap));
    const std::size_t idx = chain.states.size();
    chain.index.emplace(key, idx);
    chain.states.push_back(c);
    frontier.push_back(idx);
    return idx;
  };

  for (const Config& c : initial_support) {
    if (c.size() != g.size()) throw input_error("build_chain: configuration arity mismatch");
    for (State s : c)
      if (!m.state_space.contains(s))
        throw input_error("build_chain: initial configuration outside the state space");
    intern(c);
  }

  chain.rows.reserve(cap);
  while (!frontier.empty()) {
    const std::size_t idx = frontier.front();
    frontier.pop_front();
    const Config c = chain.states[idx];
    std::vector<std::pair<std::size_t, double>> row;
    double exit = 0;
    for (std::size_t v = 0; v < g.size(); ++v) {
      for (int j : m.jump_set.jumps) {
        const double r = config_rate(g, m, no_events, c, static_cast<VertexId>(v), j);
        if (r == 0) continue;
        Config next = c;
        next[v] += j;
        if (!m.state_space.contains(next[v]))
          throw model_contract_error("positive rate out of the declared state space");
        row.emplace_back(intern(next), r);
        exit += r;
      }
    }
    if (chain.rows.size() <= idx) chain.rows.resize(chain.states.size());
    chain.rows[idx] = std::move(row);
    if (chain.exit_rate.size() <= idx) chain.exit_rate.resize(chain.states.size(), 0.0);
    chain.exit_rate[idx] = exit;
  }
  chain.rows.resize(chain.states.size());
  chain.exit_rate.resize(chain.states.size(), 0.0);
  return chain;
}

FinitePMF transient_distribution(const ConfigurationChain& chain, const FinitePMF& initial,
                                 double t) {
  initial.validate();
  if (t < 0) throw input_error("transient_distribution: t must be nonnegative");
  std::vector<double> p(chain.states.size(), 0.0);
  for (std::size_t i = 0; i < initial.size(); ++i)
    p[chain.state_index(atom_to_config(initial.atoms[i]))] += initial.probs[i];
  p = transient_vector(chain, std::move(p), t);
  FinitePMF out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0) continue;
    out.atoms.push_back(config_to_atom(chain.states[i]));
    out.probs.push_back(p[i]);
  }
  return out;
}

FinitePMF grid_path_law(const ConfigurationChain& chain, const FinitePMF& initial,
                        std::span<const double> grid, std::size_t max_atoms) {
  initial.validate();
  if (grid.empty()) throw input_error("grid_path_law: empty grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 0) throw input_error("grid_path_law: negative grid time");
    if (i > 0 && grid[i] <= grid[i - 1])
      throw input_error("grid_path_law: grid must be strictly increasing");
  }
  const std::size_t n_states = chain.states.size();
  if (n_states > 4096) throw capacity_error("grid_path_law: too many states for dense matrices");

  // Law at the first grid time.
  std::vector<double> p0(n_states, 0.0);
  for (std::size_t i = 0; i < initial.size(); ++i)
    p0[chain.state_index(atom_to_config(initial.atoms[i]))] += initial.probs[i];
  p0 = transient_vector(chain, std::move(p0), grid.front());

  // One dense transition matrix per grid interval.
  std::vector<std::vector<double>> transitions;  // [interval][src * n + dst]
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double dt = grid[i + 1] - grid[i];
    std::vector<double> mat(n_states * n_states, 0.0);
    for (std::size_t src = 0; src < n_states; ++src) {
      std::vector<double> row(n_states, 0.0);
      row[src] = 1.0;
      row = transient_vector(chain, std::move(row), dt);
      std::copy(row.begin(), row.end(), mat.begin() + src * n_states);
    }
    transitions.push_back(std::move(mat));
  }

  FinitePMF out;
  std::vector<std::size_t> path(grid.size());
  const auto emit = [&](double prob) {
    if (out.atoms.size() >= max_atoms)
      throw capacity_error("grid_path_law: joint support exceeds " + std::to_string(max_atoms) +
                           " atoms");
    std::vector<std::int32_t> atom;
    atom.reserve(grid.size() * chain.states.front().size());
    for (std::size_t idx : path)
      for (std::int32_t s : config_to_atom(chain.states[idx])) atom.push_back(s);
    out.atoms.push_back(std::move(atom));
    out.probs.push_back(prob);
  };
  const std::function<void(std::size_t, double)> recurse = [&](std::size_t depth, double prob) {
    if (prob <= 0) return;
    if (depth == grid.size()) {
      emit(prob);
      return;
    }
    const auto& mat = transitions[depth - 1];
    const std::size_t src = path[depth - 1];
    for (std::size_t dst = 0; dst < n_states; ++dst) {
      path[depth] = dst;
      recurse(depth + 1, prob * mat[src * n_states + dst]);
    }
  };
  for (std::size_t first = 0; first < n_states; ++first) {
    path[0] = first;
    recurse(1, p0[first]);
  }
  return out;
}

double conditional_mutual_information(const FinitePMF& joint, std::span<const int> a_coords,
                                      std::span<const int> b_coords,
                                      std::span<const int> s_coords) {
  joint.validate();
  const auto arity = static_cast<int>(joint.arity());
  const auto check = [&](std::span<const int> coords) {
    for (int c : coords)
      if (c < 0 || c >= arity) throw input_error("cmi: coordinate out of range");
  };
  check(a_coords);
  check(b_coords);
  check(s_coords);

  using Key = std::vector<std::int32_t>;
  const auto project = [](const std::vector<std::int32_t>& atom, std::span<const int> coords) {
    Key k(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i) k[i] = atom[coords[i]];
    return k;
  };

  // Ordered maps so the float accumulation order is reproducible.
  std::map<Key, double> p_s, p_as, p_bs;
  std::map<std::pair<Key, std::pair<Key, Key>>, double> p_abs;
  for (std::size_t i = 0; i < joint.size(); ++i) {
    const double p = joint.probs[i];
    if (p == 0) continue;
    Key a = project(joint.atoms[i], a_coords);
    Key b = project(joint.atoms[i], b_coords);
    Key s = project(joint.atoms[i], s_coords);
    Key as = s;
    as.insert(as.end(), a.begin(), a.end());
    Key bs = s;
    bs.insert(bs.end(), b.begin(), b.end());
    p_s[s] += p;
    p_as[as] += p;
    p_bs[bs] += p;
    p_abs[{s, {a, b}}] += p;
  }

  double info = 0;
  for (const auto& [key, p] : p_abs) {
    const auto& [s, ab] = key;
    const auto& [a, b] = ab;
    Key as = s;
    as.insert(as.end(), a.begin(), a.end());
    Key bs = s;
    bs.insert(bs.end(), b.begin(), b.end());
    info += p * std::log(p * p_s.at(s) / (p_as.at(as) * p_bs.at(bs)));
  }
  if (info < 0) {
    if (info < -1e-9) throw numeric_error("cmi: negative value beyond rounding");
    info = 0;
  }
  return info;
}

FinitePMF tilt_pmf(const FinitePMF& p0,
                   const std::function<double(std::span<const std::int32_t>)>& factor) {
  p0.validate();
  FinitePMF out;
  double total = 0;
  for (std::size_t i = 0; i < p0.size(); ++i) {
    const double f = factor(p0.atoms[i]);
    if (!(f >= 0)) throw input_error("tilt_pmf: factors must be nonnegative");
    const double w = p0.probs[i] * f;
    if (w == 0) continue;
    out.atoms.push_back(p0.atoms[i]);
    out.probs.push_back(w);
    total += w;
  }
  if (total <= 0) throw input_error("tilt_pmf: tilted mass is zero");
  for (double& p : out.probs) p /= total;
  return out;
}

FactorizationCheck check_factorization_ci(const FinitePMF& p0,
                                          const std::function<double(int, int)>& rho1,
                                          const std::function<double(int, int)>& rho2) {
  p0.validate();
  if (p0.arity() != 3) throw input_error("check_factorization_ci: pmf must have 3 coordinates");
  const int A[] = {0}, B[] = {1}, S[] = {2};
  FactorizationCheck out;
  out.ci_before = conditional_mutual_information(p0, A, B, S);
  if (out.ci_before >= 1e-10)
    throw input_error("check_factorization_ci: base pmf is not conditionally independent");
  const FinitePMF p1 = tilt_pmf(p0, [&](std::span<const std::int32_t> z) {
    return rho1(z[0], z[2]) * rho2(z[1], z[2]);
  });
  out.ci_after = conditional_mutual_information(p1, A, B, S);
  return out;
}

FinitePMF initial_pmf_from_marks(const Model& m, const MarksSampler& sampler, std::size_t cap) {
  // Enumerate the product of per-vertex (mark, prob) supports.
  std::vector<std::vector<std::pair<Mark, double>>> supports;
  for (const auto& d : sampler.per_vertex) {
    switch (d.kind) {
      case MarkDist::Kind::Fixed:
        supports.push_back({{d.value, 1.0}});
        break;
      case MarkDist::Kind::Bernoulli:
        supports.push_back({{Mark(0), 1.0 - d.p}, {Mark(1), d.p}});
        break;
      case MarkDist::Kind::Choice: {
        std::vector<std::pair<Mark, double>> sup;
        for (const Mark& c : d.choices) sup.emplace_back(c, 1.0 / d.choices.size());
        supports.push_back(std::move(sup));
        break;
      }
    }
  }
  std::map<std::vector<std::int32_t>, double> acc;
  std::vector<std::size_t> odometer(supports.size(), 0);
  std::size_t combos = 0;
  while (true) {
    if (++combos > cap) throw capacity_error("initial_pmf_from_marks: support too large");
    double prob = 1;
    Config c(supports.size());
    for (std::size_t v = 0; v < supports.size(); ++v) {
      const auto& [mark, p] = supports[v][odometer[v]];
      prob *= p;
      c[v] = m.initial_map(mark);
    }
    if (prob > 0) acc[config_to_atom(c)] += prob;
    std::size_t v = 0;
    for (; v < supports.size(); ++v) {
      if (++odometer[v] < supports[v].size()) break;
      odometer[v] = 0;
    }
    if (v == supports.size()) break;
  }
  FinitePMF out;
  for (const auto& [atom, p] : acc) {
    out.atoms.push_back(atom);
    out.probs.push_back(p);
  }
  out.validate();
  return out;
}

std::vector<Config> pmf_support(const FinitePMF& pmf) {
  std::vector<Config> out;
  out.reserve(pmf.size());
  for (const auto& a : pmf.atoms) out.push_back(atom_to_config(a));
  return out;
}

}  // namespace ips

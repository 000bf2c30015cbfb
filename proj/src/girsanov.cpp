#include "ips/girsanov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ips/errors.hpp"
#include "ips/parallel.hpp"
#include "ips/stats.hpp"

namespace ips {

double LikelihoodWeight::log_value() const {
  if (weight_is_zero) return -std::numeric_limits<double>::infinity();
  std::vector<double> terms;
  terms.reserve(per_vertex.size());
  for (const auto& [v, lg] : per_vertex) terms.push_back(lg);
  double s = 0;
  for (double x : terms) s += x;  // ordered by vertex; the decomposition is exact
  return s;
}

double LikelihoodWeight::value() const {
  return weight_is_zero ? 0.0 : std::exp(log_value());
}

namespace {

struct Quad {
  double value = 0;
  double err = 0;
};

template <typename Fn>
Quad simpson_recurse(const Fn& f, double a, double fa, double b, double fb, double m, double fm,
                     double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return {left + right + delta / 15.0, std::abs(delta) / 15.0};
  const Quad l = simpson_recurse(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1);
  const Quad r = simpson_recurse(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
  return {l.value + r.value, l.err + r.err};
}

template <typename Fn>
Quad adaptive_simpson(const Fn& f, double a, double b, double tol) {
  if (b <= a) return {0, 0};
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_recurse(f, a, fa, b, fb, m, fm, whole, tol, 40);
}

}  // namespace

LikelihoodWeight weight(const Model& m, const MarkedGraph& g, std::span<const Mark> marks,
                        const Trajectory& xhat, const VertexSet& w, double t,
                        bool open_interval) {
  if (t < 0) throw input_error("weight: t must be nonnegative");
  if (t > xhat.horizon + 1e-12)
    throw input_error("weight: t exceeds the trajectory horizon");
  g.check_subset(w);
  if (marks.empty()) marks = g.marks();
  if (marks.size() != g.size()) throw input_error("weight: expected one mark per vertex");
  xhat.validate();

  const PathView view(xhat);
  const PathsRef paths{xhat.initial, &view.by_vertex()};

  LikelihoodWeight out;
  out.t = t;
  out.open_interval = open_interval;

  for (VertexId v : w.members()) {
    double log_gv = 0;
    double jump_sum = 0;

    // Product over the jumps of v, each rate read off the left-limit history.
    for (const Event& e : view.vertex_events(v)) {
      if (e.t > t || (open_interval && e.t == t)) break;
      const LocalContext ctx(g, marks, paths, v, e.t);
      const double r = eval_rate(m, e.t, v, e.jump, ctx);
      if (r == 0) {
        out.weight_is_zero = true;
      } else {
        jump_sum += std::log(r);
      }
    }

    // Compensator: integral of (rate - 1) per jump type over (0, t). Rates
    // can only change at events of the closure, so integrate segment by
    // segment between them.
    std::vector<double> cuts{0.0};
    for (VertexId u : g.closure_of(v))
      for (const Event& e : view.vertex_events(u))
        if (e.t < t) cuts.push_back(e.t);
    cuts.push_back(t);
    std::sort(cuts.begin(), cuts.end());

    double comp = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double a = cuts[i], b = cuts[i + 1];
      if (b <= a) continue;
      if (m.rate_kind == RateKind::PiecewiseConstant) {
        const double mid = 0.5 * (a + b);
        const LocalContext ctx(g, marks, paths, v, mid);
        for (int j : m.jump_set.jumps)
          comp += (eval_rate(m, mid, v, j, ctx) - 1.0) * (b - a);
      } else {
        for (int j : m.jump_set.jumps) {
          const auto integrand = [&](double s) {
            const double sc = std::clamp(s, std::nextafter(a, b), std::nextafter(b, a));
            const LocalContext ctx(g, marks, paths, v, sc);
            return eval_rate(m, sc, v, j, ctx) - 1.0;
          };
          const Quad q =
              adaptive_simpson(integrand, a, b, m.quadrature_tolerance * (b - a) / std::max(t, 1e-300));
          comp += q.value;
          out.quad_error += q.err;
        }
      }
    }

    log_gv = jump_sum - comp;
    out.log_jump_term += jump_sum;
    out.compensator += comp;
    out.per_vertex.emplace_back(v, log_gv);
  }
  return out;
}

LikelihoodWeight weight(const Model& m, const MarkedGraph& g, const Trajectory& xhat,
                        const VertexSet& w, double t, bool open_interval) {
  return weight(m, g, g.marks(), xhat, w, t, open_interval);
}

Estimate importance_estimate(const Model& m, const MarkedGraph& g, const MarksSampler& sampler,
                             const VertexSet& w, double horizon, const PathFunctional& f,
                             std::size_t n_reps, std::uint64_t seed, int threads) {
  if (n_reps < 2) throw input_error("importance_estimate: need at least 2 replicates");
  const auto values = replicate_map<double>(
      n_reps, seed, threads, [&](std::size_t, std::uint64_t rep_seed) {
        const auto draw = sample_replicate(g, m, sampler, horizon, w, rep_seed);
        const auto lw = weight(m, g, draw.marks, draw.traj, w, horizon, /*open_interval=*/true);
        return lw.value() * f(draw.marks, draw.traj);
      });
  const auto ms = mean_stderr(values);
  return {ms.mean, ms.std_error, n_reps};
}

std::vector<MartingalePoint> martingale_diagnostic(const Model& m, const MarkedGraph& g,
                                                   const MarksSampler& sampler,
                                                   const VertexSet& w,
                                                   std::span<const double> time_grid,
                                                   std::size_t n_reps, std::uint64_t seed,
                                                   int threads) {
  if (time_grid.empty()) throw input_error("martingale_diagnostic: empty time grid");
  for (std::size_t i = 0; i + 1 < time_grid.size(); ++i)
    if (time_grid[i] >= time_grid[i + 1])
      throw input_error("martingale_diagnostic: grid must be strictly increasing");
  const double horizon = time_grid.back();
  if (horizon <= 0) throw input_error("martingale_diagnostic: grid must end past 0");

  const auto rows = replicate_map<std::vector<double>>(
      n_reps, seed, threads, [&](std::size_t, std::uint64_t rep_seed) {
        const auto draw = sample_replicate(g, m, sampler, horizon, w, rep_seed);
        std::vector<double> vals(time_grid.size());
        for (std::size_t i = 0; i < time_grid.size(); ++i)
          vals[i] = weight(m, g, draw.marks, draw.traj, w, time_grid[i], false).value();
        return vals;
      });

  std::vector<MartingalePoint> out(time_grid.size());
  std::vector<double> column(n_reps);
  for (std::size_t i = 0; i < time_grid.size(); ++i) {
    for (std::size_t k = 0; k < n_reps; ++k) column[k] = rows[k][i];
    const auto ms = mean_stderr(column);
    out[i] = {time_grid[i], ms.mean, ms.std_error,
              std::abs(ms.mean - 1.0) > 4.0 * ms.std_error};
  }
  return out;
}

}  // namespace ips

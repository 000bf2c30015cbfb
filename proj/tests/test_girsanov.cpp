#include <doctest.h>

#include <cmath>
#include <vector>

#include "ips/errors.hpp"
#include "ips/girsanov.hpp"
#include "ips/parallel.hpp"
#include "ips/stats.hpp"

using namespace ips;

namespace {

double bd_occupancy(double a, double b, double t) {
  return a / (a + b) * (1.0 - std::exp(-(a + b) * t));
}

// Rates identically c for every (v, j); bound c. Used for closed-form checks.
Model flat_model(double c) {
  Model m = make_builtin("constant_birth_death", {{"a", 1.0}, {"b", 1.0}});
  m.name = "flat";
  m.jump_set = JumpSet({+1, -1});
  m.state_space = StateSpace::integers();
  m.rate = [c](double, VertexId, int, const LocalContext&) { return c; };
  m.rate_bound = [c](int, double) { return std::max(c, 1.0); };
  return m;
}

Trajectory quiet_trajectory(std::size_t n, double horizon) {
  Trajectory x;
  x.horizon = horizon;
  x.initial.assign(n, 0);
  return x;
}

}  // namespace

TEST_CASE("empty W gives weight one") {
  const MarkedGraph g = path_graph(3);
  const Model m = make_builtin("contact", {{"lambda", 1.0}, {"mu", 1.0}});
  Trajectory x = quiet_trajectory(3, 1.0);
  x.events = {{0.4, 1, 1, 1}};
  const auto lw = weight(m, g, x, VertexSet{}, 1.0, false);
  CHECK(lw.value() == 1.0);
  CHECK(lw.log_value() == 0.0);
  CHECK_FALSE(lw.weight_is_zero);
}

TEST_CASE("no W-jumps and constant rates: closed form") {
  const double c = 1.7, t = 0.8;
  const MarkedGraph g = path_graph(4);
  const Model m = flat_model(c);
  const Trajectory x = quiet_trajectory(4, 1.0);
  const VertexSet w{1, 3};
  const auto lw = weight(m, g, x, w, t, false);
  // |J| * |W| * (c - 1) * t in the exponent
  CHECK(lw.value() == doctest::Approx(std::exp(-2 * 2 * (c - 1) * t)).epsilon(1e-12));
  CHECK(lw.quad_error == 0.0);
}

TEST_CASE("zero target rate at an observed jump kills the weight") {
  const MarkedGraph g = counterexample_graph();
  const Model m = make_counterexample_model();
  // disarmed initial data (ends equal) but the middle vertex jumped anyway
  Trajectory x = quiet_trajectory(3, 1.0);
  x.initial = {1, 0, 1};
  x.events = {{0.3, 1, 1, 1}};
  const auto lw = weight(m, g, x, VertexSet{1}, 1.0, false);
  CHECK(lw.weight_is_zero);
  CHECK(lw.value() == 0.0);
  CHECK(lw.log_value() == -std::numeric_limits<double>::infinity());
}

TEST_CASE("restriction consistency on a quiet stretch") {
  const double c = 2.5;
  const MarkedGraph g = path_graph(3);
  const Model m = flat_model(c);
  Trajectory x = quiet_trajectory(3, 2.0);
  x.events = {{0.25, 1, 1, 1}};
  const VertexSet w{1};
  const double t1 = 0.5, t2 = 1.25;
  const auto w1 = weight(m, g, x, w, t1, false);
  const auto w2 = weight(m, g, x, w, t2, false);
  // no W-jumps and constant rates on [t1, t2): log L drops linearly
  CHECK(w2.log_value() ==
        doctest::Approx(w1.log_value() - 2 * (c - 1) * (t2 - t1)).epsilon(1e-12));
}

TEST_CASE("open and closed intervals agree when no jump sits exactly at t") {
  const MarkedGraph g = path_graph(3);
  const Model m = make_builtin("contact", {{"lambda", 1.2}, {"mu", 0.8}});
  Trajectory x = quiet_trajectory(3, 1.0);
  x.initial = {1, 0, 0};
  x.events = {{0.2, 1, 1, 1}, {0.6, 1, -1, 0}};
  const VertexSet w{1};
  const auto closed = weight(m, g, x, w, 0.9, false);
  const auto open = weight(m, g, x, w, 0.9, true);
  CHECK(closed.log_value() == open.log_value());
  // with a jump exactly at t they differ by that jump's factor
  const auto at_jump_closed = weight(m, g, x, w, 0.6, false);
  const auto at_jump_open = weight(m, g, x, w, 0.6, true);
  CHECK(at_jump_closed.log_value() != at_jump_open.log_value());
}

TEST_CASE("per-vertex decomposition sums exactly to the log weight") {
  const MarkedGraph g = path_graph(5);
  const Model m = make_builtin("contact", {{"lambda", 1.5}, {"mu", 1.0}});
  const MarksSampler sampler = MarksSampler::iid_bernoulli(5, 0.5);
  const VertexSet w{1, 2, 3};
  for (std::uint64_t seed : {10u, 11u, 12u, 13u}) {
    const auto draw = sample_replicate(g, m, sampler, 1.0, w, seed);
    const auto lw = weight(m, g, draw.marks, draw.traj, w, 1.0, true);
    if (lw.weight_is_zero) continue;
    double sum = 0;
    for (const auto& [v, lg] : lw.per_vertex) sum += lg;
    CHECK(sum == lw.log_value());  // bitwise: the decomposition is the definition
    CHECK(lw.log_value() ==
          doctest::Approx(lw.log_jump_term - lw.compensator).epsilon(1e-12));
  }
}

TEST_CASE("mean one on the one-vertex chain") {
  const MarkedGraph g(1, {}, {Mark(0)});
  const Model m = make_builtin("constant_birth_death", {{"a", 2.0}, {"b", 3.0}});
  const MarksSampler sampler = MarksSampler::fixed(g.marks());
  const PathFunctional one = [](std::span<const Mark>, const Trajectory&) { return 1.0; };
  const auto est = importance_estimate(m, g, sampler, VertexSet{0}, 0.7, one, 20000, 99);
  CHECK(std::abs(est.estimate - 1.0) <= 4.0 * est.std_error);
}

TEST_CASE("importance sampling matches the closed form") {
  const MarkedGraph g(1, {}, {Mark(0)});
  const double a = 2.0, b = 3.0, t = 0.7;
  const Model m = make_builtin("constant_birth_death", {{"a", a}, {"b", b}});
  const MarksSampler sampler = MarksSampler::fixed(g.marks());
  const PathFunctional f = [t](std::span<const Mark>, const Trajectory& x) {
    return PathView(x).state_before(0, t) == 1 ? 1.0 : 0.0;
  };
  const auto est = importance_estimate(m, g, sampler, VertexSet{0}, t, f, 30000, 4);
  CHECK(std::abs(est.estimate - bd_occupancy(a, b, t)) <= 4.0 * est.std_error);
}

TEST_CASE("importance sampling matches direct simulation on the counterexample") {
  const MarkedGraph g = counterexample_graph();
  const Model m = make_counterexample_model();
  const MarksSampler sampler = counterexample_marks();
  // f = indicator the middle vertex has fired by time 1
  const PathFunctional f = [](std::span<const Mark>, const Trajectory& x) {
    return PathView(x).state_before(1, 1.0) == 1 ? 1.0 : 0.0;
  };
  const std::size_t reps = 30000;
  const auto is = importance_estimate(m, g, sampler, VertexSet{1}, 1.0, f, reps, 51, 4);

  const auto direct = replicate_map<double>(reps, 52, 4, [&](std::size_t, std::uint64_t rs) {
    const auto draw = sample_replicate(g, m, sampler, 1.0, VertexSet{}, rs);
    return f(draw.marks, draw.traj);
  });
  const auto dm = mean_stderr(direct);
  const double tol = 4.0 * std::sqrt(is.std_error * is.std_error + dm.std_error * dm.std_error);
  CHECK(std::abs(is.estimate - dm.mean) <= tol);
  // analytic value: P(armed) * P(Exp(1) <= 1) = (1/2)(1 - e^{-1})
  CHECK(std::abs(is.estimate - 0.5 * -std::expm1(-1.0)) <= 4.0 * is.std_error);
}

TEST_CASE("martingale diagnostic") {
  const MarkedGraph g = path_graph(3);
  const Model m = make_builtin("contact", {{"lambda", 1.0}, {"mu", 1.0}});
  const MarksSampler sampler = MarksSampler::iid_bernoulli(3, 0.5);
  SUBCASE("t = 0 is exact") {
    const std::vector<double> grid{0.0, 0.5};
    const auto points = martingale_diagnostic(m, g, sampler, VertexSet{1}, grid, 2000, 7, 2);
    CHECK(points[0].mean == 1.0);
    CHECK(points[0].std_error == 0.0);
    CHECK_FALSE(points[0].flagged);
  }
  SUBCASE("empty W is exactly one at all times") {
    const std::vector<double> grid{0.25, 0.75};
    const auto points = martingale_diagnostic(m, g, sampler, VertexSet{}, grid, 500, 7);
    for (const auto& p : points) {
      CHECK(p.mean == 1.0);
      CHECK(p.std_error == 0.0);
    }
  }
  SUBCASE("interior times stay within four standard errors of one") {
    const std::vector<double> grid{0.5, 1.0};
    const auto points = martingale_diagnostic(m, g, sampler, VertexSet{1}, grid, 20000, 8, 4);
    for (const auto& p : points) CHECK_FALSE(p.flagged);
  }
}

TEST_CASE("time-varying rates integrate by quadrature with an error bound") {
  const MarkedGraph g = path_graph(3);
  Model m = flat_model(1.0);
  m.rate_kind = RateKind::TimeVarying;
  m.quadrature_tolerance = 1e-10;
  m.rate = [](double t, VertexId, int, const LocalContext&) { return 0.5 + 0.25 * t * t; };
  m.rate_bound = [](int, double horizon) { return 0.5 + 0.25 * horizon * horizon + 1.0; };
  const Trajectory x = quiet_trajectory(3, 2.0);
  const double t = 1.5;
  const auto lw = weight(m, g, x, VertexSet{0}, t, false);
  // exact: 2 jump types, integral of (0.5 + t^2/4 - 1) dt over (0, 1.5)
  const double exact = 2 * (-0.5 * t + 0.25 * t * t * t / 3.0);
  CHECK(lw.compensator == doctest::Approx(exact).epsilon(1e-9));
  CHECK(lw.quad_error < 1e-6);
}

TEST_CASE("weight input validation") {
  const MarkedGraph g = path_graph(3);
  const Model m = make_builtin("contact", {{"lambda", 1.0}, {"mu", 1.0}});
  const Trajectory x = quiet_trajectory(3, 1.0);
  CHECK_THROWS_AS(weight(m, g, x, VertexSet{1}, 2.0, false), input_error);
  CHECK_THROWS_AS(weight(m, g, x, VertexSet{9}, 0.5, false), input_error);
  CHECK_THROWS_AS(importance_estimate(m, g, MarksSampler::fixed(g.marks()), VertexSet{1}, 1.0,
                                      [](std::span<const Mark>, const Trajectory&) { return 1.0; },
                                      1, 1),
                  input_error);
}

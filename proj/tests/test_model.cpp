#include <doctest.h>

#include <vector>

#include "ips/errors.hpp"
#include "ips/model.hpp"

using namespace ips;

namespace {

// Convenience: rate of (v, j) at time t given explicit initial states and
// per-vertex event lists.
double rate_at(const Model& m, const MarkedGraph& g, const std::vector<State>& initial,
               const std::vector<std::vector<Event>>& by_vertex, double t, VertexId v, int j) {
  const PathsRef paths{initial, &by_vertex};
  const LocalContext ctx(g, g.marks(), paths, v, t);
  return eval_rate(m, t, v, j, ctx);
}

}  // namespace

TEST_CASE("counterexample rates match their definition") {
  const MarkedGraph g = counterexample_graph();
  const Model m = make_counterexample_model();
  std::vector<std::vector<Event>> quiet(3);

  // armed: ends differ, middle still at 0
  CHECK(rate_at(m, g, {1, 0, 0}, quiet, 0.5, 1, 1) == 1.0);
  CHECK(rate_at(m, g, {0, 0, 1}, quiet, 0.5, 1, 1) == 1.0);
  // ends equal: never fires
  CHECK(rate_at(m, g, {1, 0, 1}, quiet, 0.5, 1, 1) == 0.0);
  CHECK(rate_at(m, g, {0, 0, 0}, quiet, 0.5, 1, 1) == 0.0);
  // end vertices are inert
  CHECK(rate_at(m, g, {1, 0, 0}, quiet, 0.5, 0, 1) == 0.0);
  CHECK(rate_at(m, g, {1, 0, 0}, quiet, 0.5, 2, 1) == 0.0);
  // absorbed once the middle has jumped
  std::vector<std::vector<Event>> jumped(3);
  jumped[1].push_back({0.2, 1, 1, 1});
  CHECK(rate_at(m, g, {1, 0, 0}, jumped, 0.5, 1, 1) == 0.0);
  // but before its own jump time the rate is still 1
  CHECK(rate_at(m, g, {1, 0, 0}, jumped, 0.1, 1, 1) == 1.0);

  CHECK(m.rate_bound(2, 1.0) == 1.0);
  CHECK(m.rate_bound(3, 100.0) == 1.0);
  CHECK_NOTHROW(validate_model(m, g, 7));
}

TEST_CASE("constant_birth_death is a two-state chain") {
  const Model m = make_builtin("constant_birth_death", {{"a", 2.0}, {"b", 3.0}});
  const MarkedGraph g(1, {}, {Mark(0)});
  std::vector<std::vector<Event>> quiet(1);
  CHECK(rate_at(m, g, {0}, quiet, 0.3, 0, +1) == 2.0);
  CHECK(rate_at(m, g, {0}, quiet, 0.3, 0, -1) == 0.0);
  CHECK(rate_at(m, g, {1}, quiet, 0.3, 0, +1) == 0.0);
  CHECK(rate_at(m, g, {1}, quiet, 0.3, 0, -1) == 3.0);
}

TEST_CASE("contact rates and bound") {
  const Model m = make_builtin("contact", {{"lambda", 1.5}, {"mu", 1.0}});
  const MarkedGraph g = path_graph(5);
  std::vector<std::vector<Event>> quiet(5);
  // no infected neighbors: no infection
  CHECK(rate_at(m, g, {0, 0, 0, 0, 0}, quiet, 0.5, 2, +1) == 0.0);
  // both neighbors infected: rate equals the declared bound for closure size 3
  CHECK(rate_at(m, g, {0, 1, 0, 1, 0}, quiet, 0.5, 2, +1) == doctest::Approx(3.0));
  CHECK(m.rate_bound(3, 1.0) == doctest::Approx(3.0));
  // recovery only from the infected state
  CHECK(rate_at(m, g, {0, 1, 0, 1, 0}, quiet, 0.5, 1, -1) == doctest::Approx(1.0));
  CHECK(rate_at(m, g, {0, 1, 0, 1, 0}, quiet, 0.5, 2, -1) == 0.0);
}

TEST_CASE("builtin catalog and validation fuzzer") {
  const MarkedGraph g = path_graph(4);
  for (const char* name : {"contact", "sir", "voter_rate", "glauber_ising"}) {
    nlohmann::json params;
    if (std::string(name) == "contact" || std::string(name) == "sir")
      params = {{"lambda", 1.2}, {"mu", 0.7}};
    if (std::string(name) == "glauber_ising") params = {{"beta", 0.4}};
    const Model m = make_builtin(name, params);
    CHECK_NOTHROW(validate_model(m, g, 17));
  }
  const Model dsir = make_builtin("delayed_sir", {{"lambda", 1.0}, {"mu", 2.0}, {"delay", 0.5}});
  CHECK(dsir.rate_kind == RateKind::TimeVarying);
  CHECK_FALSE(dsir.markov);
  CHECK_NOTHROW(validate_model(dsir, g, 31));

  CHECK_THROWS_AS(make_builtin("bogus", {}), input_error);
  CHECK_THROWS_AS(make_builtin("contact", {{"lambda", 1.0}}), input_error);  // missing mu
}

TEST_CASE("locality is enforced by the context") {
  const MarkedGraph g = path_graph(5);
  Model peeker = make_builtin("contact", {{"lambda", 1.0}, {"mu", 1.0}});
  peeker.rate = [](double, VertexId, int, const LocalContext& ctx) -> double {
    return ctx.state_before(4) == 0 ? 0.5 : 0.0;  // vertex 4 is outside cl(0)
  };
  std::vector<std::vector<Event>> quiet(5);
  const std::vector<State> initial(5, 0);
  const PathsRef paths{initial, &quiet};
  const LocalContext ctx(g, g.marks(), paths, 0, 0.5);
  CHECK_THROWS_AS(eval_rate(peeker, 0.5, 0, +1, ctx), model_contract_error);
}

TEST_CASE("contract violations are caught") {
  const MarkedGraph g = path_graph(3);
  Model bad = make_builtin("constant_birth_death", {{"a", 1.0}, {"b", 1.0}});
  bad.rate = [](double, VertexId, int, const LocalContext&) { return 5.0; };  // above bound 1
  CHECK_THROWS_AS(validate_model(bad, g, 3), model_contract_error);

  Model negative = make_builtin("constant_birth_death", {{"a", 1.0}, {"b", 1.0}});
  negative.rate = [](double, VertexId, int, const LocalContext&) { return -0.1; };
  CHECK_THROWS_AS(validate_model(negative, g, 3), model_contract_error);

  // time-dependent rate declared piecewise-constant
  Model drifting = make_builtin("constant_birth_death", {{"a", 1.0}, {"b", 1.0}});
  drifting.rate = [](double t, VertexId, int, const LocalContext&) { return t / 10.0; };
  CHECK_THROWS_AS(validate_model(drifting, g, 3), model_contract_error);
}

TEST_CASE("jump set and state space validation") {
  CHECK_THROWS_AS(JumpSet({}), input_error);
  CHECK_THROWS_AS(JumpSet({0}), input_error);
  CHECK(JumpSet({-1, 1}).contains(-1));
  CHECK(StateSpace::integers().contains(-100));
  const StateSpace s = StateSpace::finite({0, 1});
  CHECK(s.contains(1));
  CHECK_FALSE(s.contains(2));
  CHECK_THROWS_AS(mark_to_state(Mark("abc")), input_error);
}

TEST_CASE("marks samplers") {
  Rng rng(5);
  const MarksSampler ce = counterexample_marks();
  int middle_always_zero = 0;
  for (int i = 0; i < 50; ++i) {
    const auto marks = ce.sample(rng);
    REQUIRE(marks.size() == 3);
    if (marks[1] == Mark(0)) ++middle_always_zero;
    CHECK((marks[0] == Mark(0) || marks[0] == Mark(1)));
  }
  CHECK(middle_always_zero == 50);
  CHECK_THROWS_AS(MarksSampler::iid_bernoulli(3, 1.5), input_error);
}

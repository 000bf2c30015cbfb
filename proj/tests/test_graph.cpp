#include <doctest.h>

#include <algorithm>
#include <functional>
#include <vector>

#include "ips/errors.hpp"
#include "ips/graph.hpp"
#include "ips/rng.hpp"

using namespace ips;

namespace {

// Test oracle: enumerate every simple path from a to b and check each for a
// run of alpha consecutive separator vertices. Exponential, small graphs only.
bool separates_by_enumeration(const MarkedGraph& g, const VertexSet& s, const VertexSet& a,
                              const VertexSet& b, int alpha) {
  std::vector<char> on_path(g.size(), 0);
  std::vector<VertexId> path;
  bool found_escape = false;
  std::function<void(VertexId)> dfs = [&](VertexId v) {
    if (found_escape) return;
    if (b.contains(v)) {
      int run = 0;
      bool killed = false;
      for (VertexId u : path) {
        run = s.contains(u) ? run + 1 : 0;
        if (run >= alpha) killed = true;
      }
      if (!killed) found_escape = true;
      return;
    }
    for (VertexId w : g.neighbors(v)) {
      if (on_path[w]) continue;
      on_path[w] = 1;
      path.push_back(w);
      dfs(w);
      path.pop_back();
      on_path[w] = 0;
    }
  };
  for (VertexId v : a.members()) {
    on_path.assign(g.size(), 0);
    on_path[v] = 1;
    path.assign(1, v);
    dfs(v);
    if (found_escape) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("neighborhood on a path") {
  const MarkedGraph g = path_graph(5);
  CHECK(neighborhood(g, VertexSet{0}, 1) == VertexSet{1});
  CHECK(neighborhood(g, VertexSet{0}, 2) == (VertexSet{1, 2}));
  CHECK(neighborhood(g, VertexSet::range(0, 5), 3).empty());
  CHECK_THROWS_AS(neighborhood(g, VertexSet{7}, 1), input_error);
  CHECK_THROWS_AS(neighborhood(g, VertexSet{0}, 0), input_error);
}

TEST_CASE("closure") {
  const MarkedGraph p3 = path_graph(3);
  CHECK(closure(p3, VertexSet{1}) == (VertexSet{0, 1, 2}));
  const MarkedGraph lonely(1, {}, {Mark(0)});
  CHECK(closure(lonely, VertexSet{0}) == VertexSet{0});
  const MarkedGraph tri = cycle_graph(3);
  CHECK(closure(tri, VertexSet{0}) == (VertexSet{0, 1, 2}));
}

TEST_CASE("ball") {
  const MarkedGraph g = path_graph(5);
  CHECK(ball(g, 2, 0) == VertexSet{2});
  CHECK(ball(g, 2, 1) == (VertexSet{1, 2, 3}));
  CHECK(ball(g, 2, 10) == VertexSet::range(0, 5));
  CHECK_THROWS_AS(ball(g, 9, 1), input_error);
}

TEST_CASE("ball recursion: B(r,n) = B(r,n-1) plus its neighborhood") {
  const MarkedGraph g = erdos_renyi(12, 0.3, 99);
  for (int n = 1; n <= 4; ++n) {
    const VertexSet prev = ball(g, 3, n - 1);
    CHECK(ball(g, 3, n) == prev.set_union(neighborhood(g, prev, 1)));
  }
}

TEST_CASE("alpha_separates on known cases") {
  const MarkedGraph p5 = path_graph(5);
  CHECK(alpha_separates(p5, VertexSet{1, 2}, VertexSet{0}, VertexSet{3, 4}, 2));
  CHECK_FALSE(alpha_separates(p5, VertexSet{2}, VertexSet{0}, VertexSet{4}, 2));
  // six-cycle: both routes around touch the separator once
  const MarkedGraph c6 = cycle_graph(6);
  const VertexSet s{1, 5}, a{0}, b{3};
  CHECK(separates_by_enumeration(c6, s, a, b, 1));
  CHECK(alpha_separates(c6, s, a, b, 1));
  CHECK_THROWS_AS(alpha_separates(p5, VertexSet{1}, VertexSet{0, 1}, VertexSet{4}, 1),
                  input_error);
}

TEST_CASE("alpha_separates agrees with path enumeration for alpha <= 2") {
  Rng rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const MarkedGraph g = erdos_renyi(8, 0.35, splitmix64(trial));
    std::vector<VertexId> ids(8);
    for (int i = 0; i < 8; ++i) ids[i] = i;
    for (std::size_t i = 8; i > 1; --i) std::swap(ids[i - 1], ids[rng.below(i)]);
    const VertexSet a{ids[0]}, b{ids[1]};
    std::vector<VertexId> sv;
    for (std::size_t i = 2; i < 8; ++i)
      if (rng.uniform01() < 0.5) sv.push_back(ids[i]);
    const VertexSet s(std::move(sv));
    for (int alpha : {1, 2})
      CHECK(alpha_separates(g, s, a, b, alpha) == separates_by_enumeration(g, s, a, b, alpha));
  }
}

TEST_CASE("the alpha-neighborhood of a block separates it from the remainder") {
  for (int alpha : {1, 2, 3}) {
    for (std::uint64_t seed : {5u, 6u, 7u}) {
      const MarkedGraph g = erdos_renyi(10, 0.25, seed);
      const VertexSet a{0, 4};
      const VertexSet s = neighborhood(g, a, alpha);
      const VertexSet b = VertexSet::range(0, 10).set_minus(a).set_minus(s);
      CHECK(alpha_separates(g, s, a, b, alpha));
    }
  }
}

TEST_CASE("neighborhood properties") {
  const MarkedGraph g = erdos_renyi(14, 0.2, 11);
  const VertexSet u{2, 5, 9};
  VertexSet prev;
  for (int alpha = 1; alpha <= 4; ++alpha) {
    const VertexSet n = neighborhood(g, u, alpha);
    CHECK(n.disjoint_with(u));
    for (VertexId v : prev.members()) CHECK(n.contains(v));  // monotone in alpha
    prev = n;
  }
}

TEST_CASE("graph constructor validation") {
  CHECK_THROWS_AS(MarkedGraph(3, {{0, 0}}, {Mark(0), Mark(0), Mark(0)}), input_error);
  CHECK_THROWS_AS(MarkedGraph(3, {{0, 1}, {1, 0}}, {Mark(0), Mark(0), Mark(0)}), input_error);
  CHECK_THROWS_AS(MarkedGraph(3, {{0, 5}}, {Mark(0), Mark(0), Mark(0)}), input_error);
  CHECK_THROWS_AS(MarkedGraph(3, {}, {Mark(0)}), input_error);
}

TEST_CASE("induced subgraph keeps structure and marks") {
  MarkedGraph g = with_marks(path_graph(5), {Mark(10), Mark(11), Mark(12), Mark(13), Mark(14)});
  const auto [sub, old_ids] = induced_subgraph(g, VertexSet{1, 2, 4});
  CHECK(sub.size() == 3);
  CHECK(old_ids == std::vector<VertexId>{1, 2, 4});
  CHECK(sub.has_edge(0, 1));        // 1-2 survives
  CHECK_FALSE(sub.has_edge(1, 2));  // 2-4 was never an edge
  CHECK(sub.mark(2) == Mark(14));
}

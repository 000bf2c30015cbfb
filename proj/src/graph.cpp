#include "ips/graph.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <string>

#include "ips/errors.hpp"
#include "ips/rng.hpp"

namespace ips {

VertexSet::VertexSet(std::vector<VertexId> members) : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

VertexSet::VertexSet(std::initializer_list<VertexId> members)
    : VertexSet(std::vector<VertexId>(members)) {}

VertexSet VertexSet::range(VertexId lo, VertexId hi) {
  std::vector<VertexId> m;
  for (VertexId v = lo; v < hi; ++v) m.push_back(v);
  return VertexSet(std::move(m));
}

bool VertexSet::contains(VertexId v) const {
  return std::binary_search(members_.begin(), members_.end(), v);
}

VertexSet VertexSet::set_union(const VertexSet& other) const {
  std::vector<VertexId> m;
  std::set_union(members_.begin(), members_.end(), other.members_.begin(), other.members_.end(),
                 std::back_inserter(m));
  return VertexSet(std::move(m));
}

VertexSet VertexSet::set_minus(const VertexSet& other) const {
  std::vector<VertexId> m;
  std::set_difference(members_.begin(), members_.end(), other.members_.begin(),
                      other.members_.end(), std::back_inserter(m));
  return VertexSet(std::move(m));
}

bool VertexSet::disjoint_with(const VertexSet& other) const {
  const auto& a = members_;
  const auto& b = other.members_;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) return false;
    if (a[i] < b[j])
      ++i;
    else
      ++j;
  }
  return true;
}

MarkedGraph::MarkedGraph(std::size_t n_vertices,
                         std::vector<std::pair<VertexId, VertexId>> edges,
                         std::vector<Mark> marks)
    : adjacency_(n_vertices), closures_(n_vertices), marks_(std::move(marks)) {
  if (marks_.size() != n_vertices)
    throw input_error("graph: expected one mark per vertex, got " +
                      std::to_string(marks_.size()) + " marks for " +
                      std::to_string(n_vertices) + " vertices");
  std::set<std::pair<VertexId, VertexId>> seen;
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= n_vertices ||
        static_cast<std::size_t>(v) >= n_vertices)
      throw input_error("graph: edge endpoint out of range: {" + std::to_string(u) + "," +
                        std::to_string(v) + "}");
    if (u == v) throw input_error("graph: self-loop at vertex " + std::to_string(u));
    auto e = std::minmax(u, v);
    if (!seen.insert({e.first, e.second}).second)
      throw input_error("graph: duplicate edge {" + std::to_string(e.first) + "," +
                        std::to_string(e.second) + "}");
  }
  edges_.assign(seen.begin(), seen.end());
  for (auto [u, v] : edges_) {
    adjacency_[u].push_back(v);
    adjacency_[v].push_back(u);
  }
  for (std::size_t v = 0; v < n_vertices; ++v) {
    std::sort(adjacency_[v].begin(), adjacency_[v].end());
    closures_[v] = adjacency_[v];
    closures_[v].push_back(static_cast<VertexId>(v));
    std::sort(closures_[v].begin(), closures_[v].end());
  }
}

std::span<const VertexId> MarkedGraph::neighbors(VertexId v) const {
  check_vertex(v);
  return adjacency_[v];
}

int MarkedGraph::degree(VertexId v) const {
  check_vertex(v);
  return static_cast<int>(adjacency_[v].size());
}

std::span<const VertexId> MarkedGraph::closure_of(VertexId v) const {
  check_vertex(v);
  return closures_[v];
}

const Mark& MarkedGraph::mark(VertexId v) const {
  check_vertex(v);
  return marks_[v];
}

bool MarkedGraph::has_edge(VertexId u, VertexId v) const {
  check_vertex(u);
  check_vertex(v);
  return std::binary_search(adjacency_[u].begin(), adjacency_[u].end(), v);
}

void MarkedGraph::check_vertex(VertexId v) const {
  if (v < 0 || static_cast<std::size_t>(v) >= size())
    throw input_error("unknown vertex id " + std::to_string(v));
}

void MarkedGraph::check_subset(const VertexSet& u) const {
  for (VertexId v : u.members()) check_vertex(v);
}

VertexSet neighborhood(const MarkedGraph& g, const VertexSet& u, int alpha) {
  g.check_subset(u);
  if (alpha < 1) throw input_error("neighborhood: alpha must be >= 1");
  std::vector<int> dist(g.size(), -1);
  std::deque<VertexId> queue;
  for (VertexId v : u.members()) {
    dist[v] = 0;
    queue.push_back(v);
  }
  std::vector<VertexId> out;
  while (!queue.empty()) {
    const VertexId v = queue.front();
    queue.pop_front();
    if (dist[v] == alpha) continue;
    for (VertexId w : g.neighbors(v)) {
      if (dist[w] >= 0) continue;
      dist[w] = dist[v] + 1;
      out.push_back(w);
      queue.push_back(w);
    }
  }
  return VertexSet(std::move(out));
}

VertexSet closure(const MarkedGraph& g, const VertexSet& u) {
  return u.set_union(neighborhood(g, u, 1));
}

VertexSet ball(const MarkedGraph& g, VertexId root, int n) {
  g.check_vertex(root);
  if (n < 0) throw input_error("ball: radius must be >= 0");
  if (n == 0) return VertexSet({root});
  return VertexSet({root}).set_union(neighborhood(g, VertexSet({root}), n));
}

bool alpha_separates(const MarkedGraph& g, const VertexSet& s, const VertexSet& a,
                     const VertexSet& b, int alpha) {
  g.check_subset(s);
  g.check_subset(a);
  g.check_subset(b);
  if (alpha < 1) throw input_error("alpha_separates: alpha must be >= 1");
  if (!a.disjoint_with(b) || !a.disjoint_with(s) || !b.disjoint_with(s))
    throw input_error("alpha_separates: a, b, s must be pairwise disjoint");
  if (a.empty() || b.empty()) return true;

  std::vector<char> in_s(g.size(), 0), in_b(g.size(), 0);
  for (VertexId v : s.members()) in_s[v] = 1;
  for (VertexId v : b.members()) in_b[v] = 1;

  // State (v, run): run = length of the current consecutive-separator streak
  // ending at v; run is 0 outside s and in 1..alpha-1 inside s.
  std::vector<char> visited(g.size() * static_cast<std::size_t>(alpha), 0);
  const auto state = [&](VertexId v, int run) {
    return static_cast<std::size_t>(v) * alpha + run;
  };
  std::deque<std::pair<VertexId, int>> queue;
  for (VertexId v : a.members()) {
    if (!visited[state(v, 0)]) {
      visited[state(v, 0)] = 1;
      queue.emplace_back(v, 0);
    }
  }
  while (!queue.empty()) {
    auto [v, run] = queue.front();
    queue.pop_front();
    for (VertexId w : g.neighbors(v)) {
      if (in_s[w]) {
        const int next_run = run + 1;
        if (next_run >= alpha) continue;  // streak complete, route dies
        if (!visited[state(w, next_run)]) {
          visited[state(w, next_run)] = 1;
          queue.emplace_back(w, next_run);
        }
      } else {
        if (in_b[w]) return false;
        if (!visited[state(w, 0)]) {
          visited[state(w, 0)] = 1;
          queue.emplace_back(w, 0);
        }
      }
    }
  }
  return true;
}

namespace {
std::vector<Mark> zero_marks(std::size_t n) { return std::vector<Mark>(n, Mark(0)); }
}  // namespace

MarkedGraph path_graph(std::size_t n) {
  std::vector<std::pair<VertexId, VertexId>> edges;
  for (std::size_t i = 0; i + 1 < n; ++i)
    edges.emplace_back(static_cast<VertexId>(i), static_cast<VertexId>(i + 1));
  return MarkedGraph(n, std::move(edges), zero_marks(n));
}

MarkedGraph cycle_graph(std::size_t n) {
  if (n < 3) throw input_error("cycle_graph: need at least 3 vertices");
  std::vector<std::pair<VertexId, VertexId>> edges;
  for (std::size_t i = 0; i < n; ++i)
    edges.emplace_back(static_cast<VertexId>(i), static_cast<VertexId>((i + 1) % n));
  return MarkedGraph(n, std::move(edges), zero_marks(n));
}

MarkedGraph complete_graph(std::size_t n) {
  std::vector<std::pair<VertexId, VertexId>> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      edges.emplace_back(static_cast<VertexId>(i), static_cast<VertexId>(j));
  return MarkedGraph(n, std::move(edges), zero_marks(n));
}

MarkedGraph grid_graph(std::size_t rows, std::size_t cols) {
  std::vector<std::pair<VertexId, VertexId>> edges;
  const auto id = [cols](std::size_t r, std::size_t c) {
    return static_cast<VertexId>(r * cols + c);
  };
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      if (c + 1 < cols) edges.emplace_back(id(r, c), id(r, c + 1));
      if (r + 1 < rows) edges.emplace_back(id(r, c), id(r + 1, c));
    }
  return MarkedGraph(rows * cols, std::move(edges), zero_marks(rows * cols));
}

MarkedGraph erdos_renyi(std::size_t n, double p, std::uint64_t seed) {
  if (p < 0 || p > 1) throw input_error("erdos_renyi: p must lie in [0,1]");
  Rng rng(seed);
  std::vector<std::pair<VertexId, VertexId>> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (rng.uniform01() < p)
        edges.emplace_back(static_cast<VertexId>(i), static_cast<VertexId>(j));
  return MarkedGraph(n, std::move(edges), zero_marks(n));
}

MarkedGraph with_marks(const MarkedGraph& g, std::vector<Mark> marks) {
  return MarkedGraph(g.size(), g.edges(), std::move(marks));
}

std::pair<MarkedGraph, std::vector<VertexId>> induced_subgraph(const MarkedGraph& g,
                                                               const VertexSet& u) {
  g.check_subset(u);
  std::vector<VertexId> old_ids(u.members().begin(), u.members().end());
  std::vector<VertexId> new_id(g.size(), -1);
  for (std::size_t i = 0; i < old_ids.size(); ++i) new_id[old_ids[i]] = static_cast<VertexId>(i);
  std::vector<std::pair<VertexId, VertexId>> edges;
  for (auto [a, b] : g.edges())
    if (new_id[a] >= 0 && new_id[b] >= 0) edges.emplace_back(new_id[a], new_id[b]);
  std::vector<Mark> marks;
  marks.reserve(old_ids.size());
  for (VertexId v : old_ids) marks.push_back(g.mark(v));
  return {MarkedGraph(old_ids.size(), std::move(edges), std::move(marks)), std::move(old_ids)};
}

}  // namespace ips

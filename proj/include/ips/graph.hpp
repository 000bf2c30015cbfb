#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

namespace ips {

using VertexId = std::int32_t;

/// Per-vertex initial data. Opaque to the graph; models interpret it
/// (typically as an integer initial state).
using Mark = nlohmann::json;

/// Sorted, duplicate-free set of vertex ids.
class VertexSet {
 public:
  VertexSet() = default;
  explicit VertexSet(std::vector<VertexId> members);
  VertexSet(std::initializer_list<VertexId> members);

  static VertexSet range(VertexId lo, VertexId hi);  // [lo, hi)

  bool contains(VertexId v) const;
  std::span<const VertexId> members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }

  VertexSet set_union(const VertexSet& other) const;
  VertexSet set_minus(const VertexSet& other) const;
  bool disjoint_with(const VertexSet& other) const;

  bool operator==(const VertexSet&) const = default;

 private:
  std::vector<VertexId> members_;
};

/// Finite simple undirected graph with a mark on every vertex. Vertex ids
/// are dense: exactly 0..n-1. Immutable after construction; concurrent
/// reads are safe.
class MarkedGraph {
 public:
  MarkedGraph(std::size_t n_vertices, std::vector<std::pair<VertexId, VertexId>> edges,
              std::vector<Mark> marks);

  std::size_t size() const { return adjacency_.size(); }
  std::span<const VertexId> neighbors(VertexId v) const;
  int degree(VertexId v) const;

  /// Closed neighborhood {v} ∪ N(v), sorted.
  std::span<const VertexId> closure_of(VertexId v) const;

  const Mark& mark(VertexId v) const;
  std::span<const Mark> marks() const { return marks_; }
  bool has_edge(VertexId u, VertexId v) const;
  const std::vector<std::pair<VertexId, VertexId>>& edges() const { return edges_; }

  void check_vertex(VertexId v) const;          // throws input_error
  void check_subset(const VertexSet& u) const;  // throws input_error

 private:
  std::vector<std::vector<VertexId>> adjacency_;
  std::vector<std::vector<VertexId>> closures_;
  std::vector<std::pair<VertexId, VertexId>> edges_;
  std::vector<Mark> marks_;
};

/// Vertices outside u whose graph distance to u is at most alpha.
VertexSet neighborhood(const MarkedGraph& g, const VertexSet& u, int alpha);

/// u together with its 1-neighborhood.
VertexSet closure(const MarkedGraph& g, const VertexSet& u);

/// Vertices within distance n of root, root included.
VertexSet ball(const MarkedGraph& g, VertexId root, int n);

/// Whether s separates a from b at order alpha: every surviving route from a
/// to b would need to pass through alpha consecutive vertices of s.
///
/// Decided by BFS over (vertex, run-length) states, where the run length
/// counts the current streak of consecutive s-vertices and a streak reaching
/// alpha kills the route. Exact for alpha <= 2 and whenever s is the
/// alpha-neighborhood of a; for alpha >= 3 on graphs with cycles the BFS
/// explores walks, which may revisit vertices to reset a streak, so it can
/// report "not separated" on inputs where every simple path dies.
bool alpha_separates(const MarkedGraph& g, const VertexSet& s, const VertexSet& a,
                     const VertexSet& b, int alpha);

// Builders for tests and experiments. Marks default to integer 0.
MarkedGraph path_graph(std::size_t n);
MarkedGraph cycle_graph(std::size_t n);
MarkedGraph complete_graph(std::size_t n);
MarkedGraph grid_graph(std::size_t rows, std::size_t cols);
MarkedGraph erdos_renyi(std::size_t n, double p, std::uint64_t seed);

/// Copy of g with the given marks.
MarkedGraph with_marks(const MarkedGraph& g, std::vector<Mark> marks);

/// Induced subgraph on u. Vertices are renumbered densely in the order of
/// u.members(); the returned map sends new ids to original ids.
std::pair<MarkedGraph, std::vector<VertexId>> induced_subgraph(const MarkedGraph& g,
                                                               const VertexSet& u);

}  // namespace ips

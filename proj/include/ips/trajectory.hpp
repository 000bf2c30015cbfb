#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ips/graph.hpp"

namespace ips {

using State = std::int64_t;

struct Event {
  double t = 0;
  VertexId v = 0;
  int jump = 0;
  State state = 0;  // state of v right after the jump; redundant, for self-checking logs
};

/// Per-vertex cadlag step paths on [0, horizon], stored as initial states
/// plus the globally time-ordered jump events. Proper by invariant: event
/// times are strictly increasing across all vertices.
struct Trajectory {
  double horizon = 0;
  std::vector<State> initial;  // indexed by vertex id
  std::vector<Event> events;

  std::size_t n_vertices() const { return initial.size(); }

  /// Structural checks: ordering, vertex range, per-vertex state chains.
  /// Throws properness_error on duplicate timestamps, input_error otherwise.
  void validate() const;
};

/// Per-vertex index over a trajectory for fast path queries.
class PathView {
 public:
  explicit PathView(const Trajectory& x);

  std::span<const Event> vertex_events(VertexId v) const { return by_vertex_[v]; }
  const std::vector<std::vector<Event>>& by_vertex() const { return by_vertex_; }
  std::span<const State> initial() const { return traj_->initial; }

  State state_at(VertexId v, double s) const;      // x_v(s), right-continuous
  State state_before(VertexId v, double s) const;  // x_v(s-)

 private:
  const Trajectory* traj_;
  std::vector<std::vector<Event>> by_vertex_;
};

struct JumpTriple {
  double t = 0;
  int jump = 0;
  VertexId v = 0;
  bool operator==(const JumpTriple&) const = default;
};

/// Time-ordered (time, jump, vertex) triples of a proper trajectory.
struct JumpCharacteristics {
  std::vector<JumpTriple> triples;
};

/// The same triples viewed as a simple counting measure on
/// (0,T] x jumps x vertices.
struct DualPointProcess {
  std::vector<JumpTriple> points;

  std::size_t count() const { return points.size(); }
  std::size_t count_in(double t0, double t1) const;  // atoms with t in (t0, t1]
};

JumpCharacteristics jump_characteristics(const Trajectory& x, const VertexSet& u);
DualPointProcess dual(const Trajectory& x, const VertexSet& u);
DualPointProcess restrict(const DualPointProcess& p, const VertexSet& u);

/// Copy of x with only the events of vertices in u (initial states kept).
Trajectory restrict_events(const Trajectory& x, const VertexSet& u);

}  // namespace ips

#include "ips/trajectory.hpp"

#include <algorithm>
#include <string>

#include "ips/errors.hpp"

namespace ips {

void Trajectory::validate() const {
  if (horizon <= 0) throw input_error("trajectory: horizon must be positive");
  std::vector<State> current = initial;
  double last_t = 0;
  for (const Event& e : events) {
    if (e.v < 0 || static_cast<std::size_t>(e.v) >= initial.size())
      throw input_error("trajectory: event at unknown vertex " + std::to_string(e.v));
    if (e.t <= 0 || e.t > horizon)
      throw input_error("trajectory: event time " + std::to_string(e.t) + " outside (0, horizon]");
    if (e.t == last_t)
      throw properness_error("trajectory: duplicate event timestamp " + std::to_string(e.t));
    if (e.t < last_t) throw input_error("trajectory: events out of order");
    if (e.jump == 0) throw input_error("trajectory: zero jump");
    if (e.state != current[e.v] + e.jump)
      throw input_error("trajectory: inconsistent state at vertex " + std::to_string(e.v) +
                        ", t=" + std::to_string(e.t));
    current[e.v] = e.state;
    last_t = e.t;
  }
}

PathView::PathView(const Trajectory& x) : traj_(&x), by_vertex_(x.n_vertices()) {
  for (const Event& e : x.events) by_vertex_[e.v].push_back(e);
}

namespace {

// Last event of `ev` with time satisfying the bound, or none.
template <typename Cmp>
const Event* last_event(std::span<const Event> ev, double s, Cmp cmp) {
  auto it = std::partition_point(ev.begin(), ev.end(), [&](const Event& e) { return cmp(e.t, s); });
  return it == ev.begin() ? nullptr : &*std::prev(it);
}

}  // namespace

State PathView::state_at(VertexId v, double s) const {
  const Event* e = last_event(by_vertex_[v], s, [](double a, double b) { return a <= b; });
  return e ? e->state : traj_->initial[v];
}

State PathView::state_before(VertexId v, double s) const {
  const Event* e = last_event(by_vertex_[v], s, [](double a, double b) { return a < b; });
  return e ? e->state : traj_->initial[v];
}

std::size_t DualPointProcess::count_in(double t0, double t1) const {
  std::size_t n = 0;
  for (const auto& p : points)
    if (p.t > t0 && p.t <= t1) ++n;
  return n;
}

JumpCharacteristics jump_characteristics(const Trajectory& x, const VertexSet& u) {
  x.validate();  // also rejects improper logs
  for (VertexId v : u.members())
    if (v < 0 || static_cast<std::size_t>(v) >= x.n_vertices())
      throw input_error("jump_characteristics: unknown vertex " + std::to_string(v));
  JumpCharacteristics jc;
  for (const Event& e : x.events)
    if (u.contains(e.v)) jc.triples.push_back({e.t, e.jump, e.v});
  return jc;
}

DualPointProcess dual(const Trajectory& x, const VertexSet& u) {
  return DualPointProcess{jump_characteristics(x, u).triples};
}

DualPointProcess restrict(const DualPointProcess& p, const VertexSet& u) {
  DualPointProcess out;
  for (const auto& q : p.points)
    if (u.contains(q.v)) out.points.push_back(q);
  return out;
}

Trajectory restrict_events(const Trajectory& x, const VertexSet& u) {
  Trajectory out;
  out.horizon = x.horizon;
  out.initial = x.initial;
  for (const Event& e : x.events)
    if (u.contains(e.v)) out.events.push_back(e);
  return out;
}

}  // namespace ips

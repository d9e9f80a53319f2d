#include "stargraph/jumpset.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "stargraph/error.hpp"

namespace stargraph {

JumpSet::JumpSet(double drift, std::vector<JumpEvent> events, double horizon, double cutoff)
    : drift_(drift), events_(std::move(events)), horizon_(horizon), cutoff_(cutoff) {
  if (!(drift >= 0.0) || !std::isfinite(drift))
    throw Error(ErrorCode::InvalidArgument, "drift must be finite and >= 0");
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw Error(ErrorCode::InvalidArgument, "horizon must be finite and > 0");
  std::sort(events_.begin(), events_.end(),
            [](const JumpEvent& a, const JumpEvent& b) { return a.time < b.time; });
  cum_.reserve(events_.size());
  double c = 0.0;
  for (std::size_t i = 0; i < events_.size(); ++i) {
    const auto& ev = events_[i];
    if (!(ev.time > 0.0) || ev.time > horizon)
      throw Error(ErrorCode::InvalidArgument, "event time outside (0, horizon]");
    if (!(ev.height > 0.0) || !std::isfinite(ev.height))
      throw Error(ErrorCode::InvalidArgument, "event heights must be positive");
    if (i > 0 && ev.time == events_[i - 1].time)
      throw Error(ErrorCode::InvalidArgument, "simultaneous jumps");
    c += ev.height;
    cum_.push_back(c);
  }
}

namespace {

void check_time(double t, double horizon) {
  if (!(t >= 0.0)) throw Error(ErrorCode::InvalidArgument, "negative time");
  if (t > horizon) throw Error(ErrorCode::BeyondHorizon, "time beyond the jump-set horizon");
}

}  // namespace

double JumpSet::p_eval(double t) const {
  check_time(t, horizon_);
  const auto it = std::upper_bound(events_.begin(), events_.end(), t,
                                   [](double v, const JumpEvent& ev) { return v < ev.time; });
  const std::size_t n = static_cast<std::size_t>(it - events_.begin());
  return drift_ * t + (n ? cum_[n - 1] : 0.0);
}

double JumpSet::p_left(double t) const {
  check_time(t, horizon_);
  const auto it = std::lower_bound(events_.begin(), events_.end(), t,
                                   [](const JumpEvent& ev, double v) { return ev.time < v; });
  const std::size_t n = static_cast<std::size_t>(it - events_.begin());
  return drift_ * t + (n ? cum_[n - 1] : 0.0);
}

double JumpSet::p_e_eval(EdgeId e, double t) const {
  check_time(t, horizon_);
  const auto it = std::lower_bound(events_.begin(), events_.end(), t,
                                   [](const JumpEvent& ev, double v) { return ev.time < v; });
  const std::size_t n = static_cast<std::size_t>(it - events_.begin());
  double v = drift_ * t + (n ? cum_[n - 1] : 0.0);
  if (it != events_.end() && it->time == t && it->edge == e) v = drift_ * t + cum_[n];
  return v;
}

JumpSet::Inverse JumpSet::locate(double u) const {
  if (!(u >= 0.0)) throw Error(ErrorCode::InvalidArgument, "negative level");
  const double total = drift_ * horizon_ + (cum_.empty() ? 0.0 : cum_.back());
  if (!(total > u)) throw Error(ErrorCode::HorizonExhausted, "P(horizon) <= u");
  // first event whose post-jump value exceeds u
  std::size_t lo = 0, hi = events_.size();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (drift_ * events_[mid].time + cum_[mid] > u)
      hi = mid;
    else
      lo = mid + 1;
  }
  const double before = lo ? cum_[lo - 1] : 0.0;
  if (lo == events_.size()) return {(u - before) / drift_, std::nullopt};
  if (drift_ > 0.0) {
    const double s = (u - before) / drift_;
    if (s < events_[lo].time) return {s, std::nullopt};
  }
  return {events_[lo].time, lo};
}

FlatInterval JumpSet::flat_interval(std::size_t n) const {
  const JumpEvent& ev = events_.at(n);
  return {drift_ * ev.time + (n ? cum_[n - 1] : 0.0), drift_ * ev.time + cum_[n], ev.edge,
          ev.time};
}

std::vector<FlatInterval> JumpSet::flat_intervals() const {
  std::vector<FlatInterval> out;
  out.reserve(events_.size());
  for (std::size_t n = 0; n < events_.size(); ++n) out.push_back(flat_interval(n));
  return out;
}

EtaValue eta(const JumpSet& J, double l, std::size_t n_edges) {
  const auto inv = J.locate(l);
  EtaValue out;
  out.per_edge.assign(n_edges, 0.0);
  if (!inv.jump) return out;
  const FlatInterval fi = J.flat_interval(*inv.jump);
  for (EdgeId e = 0; e < n_edges; ++e) out.per_edge[e] = fi.lminus - l;
  out.total = fi.lplus - l;
  if (fi.edge < n_edges) out.per_edge[fi.edge] = out.total;
  out.active = fi.edge;
  return out;
}

namespace {

void sample_window(const JumpMeasureSpec& spec, double t0, double t1, double eps,
                   std::size_t n_edges, Rng& rng, std::vector<JumpEvent>& events) {
  if (spec.is_zero()) return;
  if (!spec.finite_mass() && !(eps > 0.0))
    throw Error(ErrorCode::NeedsCutoff, "infinite jump measure needs a cutoff eps > 0");
  const JumpMeasureSpec sim = spec.truncated(eps);
  std::set<double> taken;
  for (const auto& ev : events) taken.insert(ev.time);
  const double width = t1 - t0;
  auto draw_time = [&] {
    for (;;) {
      const double t = t0 + width * (1.0 - rng.uniform());
      if (t > t0 && t <= t1 && taken.insert(t).second) return t;
    }
  };
  for (EdgeId e = 0; e < n_edges; ++e) {
    const double mass = sim.edge_mass(e);
    if (!(mass > 0.0)) continue;
    const long count = rng.poisson(width * mass);
    for (long i = 0; i < count; ++i) {
      const double t = draw_time();
      double h = 0.0;
      double u = rng.uniform() * mass;
      if (sim.is_atoms()) {
        for (const auto& a : sim.atom_list()) {
          if (a.edge != e) continue;
          h = a.height;
          if (u < a.mass) break;
          u -= a.mass;
        }
      } else {
        for (const auto& [edge, tail] : sim.edge_tails()) {
          if (edge != e) continue;
          const double m = tail.total_mass();
          h = tail.inverse_tail(m * rng.uniform_open());
          if (u < m) break;
          u -= m;
        }
      }
      events.push_back({t, e, h});
    }
  }
}

}  // namespace

JumpSet sample_jumpset(const JumpMeasureSpec& spec, double drift, double horizon, double eps,
                       std::size_t n_edges, Rng& rng) {
  std::vector<JumpEvent> events;
  sample_window(spec, 0.0, horizon, eps, n_edges, rng, events);
  return JumpSet(drift, std::move(events), horizon, eps);
}

JumpSet extend_jumpset(const JumpSet& J, const JumpMeasureSpec& spec, double new_horizon,
                       double eps, std::size_t n_edges, Rng& rng) {
  if (!(new_horizon > J.horizon())) return J;
  std::vector<JumpEvent> events = J.events();
  sample_window(spec, J.horizon(), new_horizon, eps, n_edges, rng, events);
  return JumpSet(J.drift(), std::move(events), new_horizon, J.cutoff());
}

}  // namespace stargraph

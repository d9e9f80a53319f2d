#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "stargraph/jumpset.hpp"
#include "stargraph/rng.hpp"

namespace testsupport {

// Random JumpSet on (0, horizon] with up to 8 events on `edges` edges.  Event
// times sit on a 1/1024 lattice so that exact event-time queries are common.
inline stargraph::JumpSet random_jumpset(stargraph::Rng& rng, std::size_t edges,
                                         bool allow_zero_drift = true) {
  const double horizon = 0.5 + 4.0 * rng.uniform();
  const double drift = allow_zero_drift && rng.uniform() < 0.2 ? 0.0 : 0.1 + 2.0 * rng.uniform();
  const auto n = static_cast<std::size_t>(9 * rng.uniform());
  std::vector<stargraph::JumpEvent> ev;
  std::vector<long> used;
  for (std::size_t i = 0; i < n; ++i) {
    const long slot = 1 + static_cast<long>(std::floor(rng.uniform() * (horizon * 1024 - 1)));
    bool dup = false;
    for (long u : used) dup = dup || u == slot;
    if (dup) continue;
    used.push_back(slot);
    ev.push_back({static_cast<double>(slot) / 1024.0,
                  static_cast<stargraph::EdgeId>(rng.uniform() * edges),
                  0.01 + 3.0 * rng.uniform()});
  }
  return stargraph::JumpSet(drift, ev, horizon);
}

// P(t) by direct summation over the events.
inline double p_direct(const stargraph::JumpSet& J, double t) {
  double p = J.drift() * t;
  for (const auto& e : J.events())
    if (e.time <= t) p += e.height;
  return p;
}

// Smallest grid point k * step with P(k * step) > u, found by bisection over
// the grid indices (P is nondecreasing).  Negative when no grid point in
// [0, horizon] qualifies.
inline double grid_inverse(const stargraph::JumpSet& J, double u, double step = 1e-6) {
  long hi = static_cast<long>(std::floor(J.horizon() / step));
  if (!(p_direct(J, hi * step) > u)) return -1.0;
  long lo = -1;  // P(lo * step) <= u, with lo = -1 standing for "before 0"
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo) / 2;
    if (p_direct(J, mid * step) > u)
      hi = mid;
    else
      lo = mid;
  }
  return hi * step;
}

}  // namespace testsupport

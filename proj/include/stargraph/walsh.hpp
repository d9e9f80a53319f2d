#pragma once

#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "stargraph/graph.hpp"
#include "stargraph/rng.hpp"

namespace stargraph {

/// Number of grid steps covering [0, T] with step dt; the last step may be
/// shorter.  Throws BadStep for dt <= 0, dt > T or non-finite input.
std::size_t grid_steps(double T, double dt);
/// Grid time k of that grid, exactly k * dt except for the final node (= T).
double grid_time(std::size_t k, std::size_t steps, double T, double dt);

/// Reflecting Brownian motion |B| = M - B with local time L = M, where B is a
/// driving Brownian motion started at -x0 and M its running maximum floored
/// at 0.  With `bridge_max` the maximum inside each step is sampled from the
/// Brownian bridge, which makes (radius, ltime) exact in law at grid times.
class ReflectingStepper {
 public:
  ReflectingStepper(double x0, bool bridge_max) : b_(-x0), m_(0.0), bridge_max_(bridge_max) {}

  /// Advances by h; returns true when the local time increased.
  bool step(double h, Rng& rng);

  double radius() const { return m_ - b_; }
  double ltime() const { return m_; }

 private:
  double b_;
  double m_;
  bool bridge_max_;
};

struct ReflectingSample {
  std::vector<double> radius;
  std::vector<double> ltime;
};

ReflectingSample sample_reflecting_with_local_time(double x0, double T, double dt, Rng& rng,
                                                   bool bridge_max = true);

/// Discretized Walsh Brownian motion with its vertex local time.  Grids from
/// the samplers are uniform; time-changed paths carry explicit node times.
struct WalshPath {
  std::vector<double> times;
  std::vector<double> radius;
  std::vector<EdgeId> edge;
  std::vector<double> ltime;
  GraphPoint start;

  std::size_t size() const { return times.size(); }
  GraphPoint state(std::size_t k) const {
    return radius[k] > 0.0 ? GraphPoint::on_edge(edge[k], radius[k]) : GraphPoint::vertex();
  }
  double duration() const { return times.empty() ? 0.0 : times.back(); }
};

/// Categorical draw from a probability vector.
EdgeId sample_edge(std::span<const double> q, Rng& rng);

/// Walsh path: the radius comes from the reflecting sampler on
/// `streams.radius`, edge labels from `streams.edge`.  The label is resampled
/// from q at every step whose local time strictly increases.
WalshPath sample_walsh(const GraphPoint& start, double T, double dt, std::span<const double> q,
                       PathStreams& streams, bool bridge_max = true);

/// Same grid with twice the step, derived from a fine path.  Because the
/// fine local time is the running maximum of the driving motion, the result
/// has exactly the law of a path sampled at step 2 dt.
WalshPath coarsen(const WalshPath& fine);

/// Time change by tau^{-1}(t) = t + gamma * L_t.  Inside a step where L
/// increases, the linear radius interpolant reaches 0, stays at the vertex
/// for gamma * dL, and leaves again.  The new local time is L o tau.
WalshPath sticky_time_change(const WalshPath& path, double gamma);

struct KilledWalsh {
  WalshPath path;
  double lifetime = kInfinity;
};

/// Kills when L exceeds an independent Exp(beta) level; the crossing time is
/// interpolated linearly inside the step.
KilledWalsh elastic_kill(const WalshPath& path, double beta, Rng& rng);
KilledWalsh elastic_kill_at_level(const WalshPath& path, double level);

/// First grid time with radius 0 (for bridge-max paths, the end of the first
/// step where the local time moved); +inf if the vertex is not reached.
double first_hit_vertex(const WalshPath& path);

/// Streaming counterpart of first_hit_vertex(sample_walsh(...)): the same law
/// on the same grid, stopping at the first hit.  While the vertex is out of
/// reach (crossing probability below 1e-15) several grid steps are merged into
/// one exact Gaussian increment.
double sample_first_hit(double x0, double T, double dt, Rng& rng, bool bridge_max = true);

}  // namespace stargraph

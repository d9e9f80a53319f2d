#include "stargraph/walsh.hpp"

#include <algorithm>
#include <cmath>

#include "stargraph/error.hpp"

namespace stargraph {

std::size_t grid_steps(double T, double dt) {
  if (!std::isfinite(T) || !std::isfinite(dt) || !(dt > 0.0) || !(T > 0.0) || dt > T)
    throw Error(ErrorCode::BadStep, "need 0 < dt <= T");
  return static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
}

double grid_time(std::size_t k, std::size_t steps, double T, double dt) {
  return k >= steps ? T : static_cast<double>(k) * dt;
}

bool ReflectingStepper::step(double h, Rng& rng) {
  const double a = b_;
  const double b = a + std::sqrt(h) * rng.normal();
  b_ = b;
  if (!bridge_max_) {
    if (b > m_) {
      m_ = b;
      return true;
    }
    return false;
  }
  // The bridge from a to b over time h exceeds level M with probability
  // exp(-2 (M - a)(M - b) / h).
  const double expo = (m_ - a) * (m_ - b) / h;
  if (b <= m_ && expo > 20.0) return false;
  const double u = rng.uniform_open();
  if (b <= m_ && u >= std::exp(-2.0 * expo)) return false;
  const double peak = 0.5 * (a + b + std::sqrt((b - a) * (b - a) - 2.0 * h * std::log(u)));
  m_ = std::max({m_, peak, b});
  return true;
}

ReflectingSample sample_reflecting_with_local_time(double x0, double T, double dt, Rng& rng,
                                                   bool bridge_max) {
  if (!(x0 >= 0.0) || !std::isfinite(x0))
    throw Error(ErrorCode::InvalidArgument, "x0 must be finite and >= 0");
  const std::size_t K = grid_steps(T, dt);
  ReflectingSample s;
  s.radius.reserve(K + 1);
  s.ltime.reserve(K + 1);
  ReflectingStepper st(x0, bridge_max);
  s.radius.push_back(st.radius());
  s.ltime.push_back(st.ltime());
  for (std::size_t k = 1; k <= K; ++k) {
    st.step(grid_time(k, K, T, dt) - grid_time(k - 1, K, T, dt), rng);
    s.radius.push_back(st.radius());
    s.ltime.push_back(st.ltime());
  }
  return s;
}

EdgeId sample_edge(std::span<const double> q, Rng& rng) {
  double u = rng.uniform();
  EdgeId last = 0;
  for (EdgeId e = 0; e < q.size(); ++e) {
    if (q[e] <= 0.0) continue;
    if (u < q[e]) return e;
    u -= q[e];
    last = e;
  }
  return last;
}

WalshPath sample_walsh(const GraphPoint& start, double T, double dt, std::span<const double> q,
                       PathStreams& streams, bool bridge_max) {
  if (start.is_cemetery()) throw Error(ErrorCode::CemeteryArg, "cannot start in the cemetery");
  const std::size_t K = grid_steps(T, dt);
  WalshPath w;
  w.start = start;
  w.times.reserve(K + 1);
  w.radius.reserve(K + 1);
  w.edge.reserve(K + 1);
  w.ltime.reserve(K + 1);
  ReflectingStepper st(start.x(), bridge_max);
  EdgeId e = start.is_vertex() ? sample_edge(q, streams.edge) : start.edge();
  w.times.push_back(0.0);
  w.radius.push_back(st.radius());
  w.edge.push_back(e);
  w.ltime.push_back(st.ltime());
  for (std::size_t k = 1; k <= K; ++k) {
    const double t = grid_time(k, K, T, dt);
    if (st.step(t - w.times.back(), streams.radius)) e = sample_edge(q, streams.edge);
    w.times.push_back(t);
    w.radius.push_back(st.radius());
    w.edge.push_back(e);
    w.ltime.push_back(st.ltime());
  }
  return w;
}

WalshPath coarsen(const WalshPath& fine) {
  WalshPath c;
  c.start = fine.start;
  const std::size_t K = fine.size() - 1;
  for (std::size_t k = 0; k <= K; k += 2) {
    c.times.push_back(fine.times[k]);
    c.radius.push_back(fine.radius[k]);
    c.edge.push_back(fine.edge[k]);
    c.ltime.push_back(fine.ltime[k]);
  }
  if (K % 2 == 1) {
    c.times.push_back(fine.times[K]);
    c.radius.push_back(fine.radius[K]);
    c.edge.push_back(fine.edge[K]);
    c.ltime.push_back(fine.ltime[K]);
  }
  return c;
}

WalshPath sticky_time_change(const WalshPath& path, double gamma) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma))
    throw Error(ErrorCode::InvalidArgument, "gamma must be finite and >= 0");
  if (gamma == 0.0 || path.size() == 0) return path;
  WalshPath out;
  out.start = path.start;
  auto push = [&](double t, double r, EdgeId e, double l) {
    out.times.push_back(t);
    out.radius.push_back(r);
    out.edge.push_back(e);
    out.ltime.push_back(l);
  };
  push(path.times[0], path.radius[0], path.edge[0], path.ltime[0]);
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    const double s0 = path.times[k] + gamma * path.ltime[k];
    const double s1 = path.times[k + 1] + gamma * path.ltime[k + 1];
    const double dl = path.ltime[k + 1] - path.ltime[k];
    if (dl > 0.0) {
      const double h = path.times[k + 1] - path.times[k];
      const double r0 = path.radius[k];
      const double r1 = path.radius[k + 1];
      const double theta = r0 + r1 > 0.0 ? r0 / (r0 + r1) : 0.0;
      const double down = s0 + theta * h;
      if (r0 > 0.0) push(down, 0.0, path.edge[k + 1], path.ltime[k]);
      push(down + gamma * dl, 0.0, path.edge[k + 1], path.ltime[k + 1]);
    }
    push(s1, path.radius[k + 1], path.edge[k + 1], path.ltime[k + 1]);
  }
  return out;
}

KilledWalsh elastic_kill_at_level(const WalshPath& path, double level) {
  KilledWalsh out{path, kInfinity};
  for (std::size_t k = 1; k < path.size(); ++k) {
    if (!(path.ltime[k] > level)) continue;
    const double l0 = path.ltime[k - 1];
    const double frac = (level - l0) / (path.ltime[k] - l0);
    const double zeta = path.times[k - 1] + frac * (path.times[k] - path.times[k - 1]);
    WalshPath& p = out.path;
    p.times.resize(k);
    p.radius.resize(k);
    p.edge.resize(k);
    p.ltime.resize(k);
    p.times.push_back(zeta);
    p.radius.push_back(0.0);
    p.edge.push_back(path.edge[k]);
    p.ltime.push_back(level);
    out.lifetime = zeta;
    break;
  }
  return out;
}

KilledWalsh elastic_kill(const WalshPath& path, double beta, Rng& rng) {
  const double s = rng.exponential(1.0);
  return elastic_kill_at_level(path, beta > 0.0 ? s / beta : kInfinity);
}

double first_hit_vertex(const WalshPath& path) {
  if (path.size() == 0) return kInfinity;
  if (path.radius[0] == 0.0) return path.times[0];
  for (std::size_t k = 1; k < path.size(); ++k)
    if (path.radius[k] == 0.0 || path.ltime[k] > path.ltime[k - 1]) return path.times[k];
  return kInfinity;
}

double sample_first_hit(double x0, double T, double dt, Rng& rng, bool bridge_max) {
  if (!(x0 >= 0.0) || !std::isfinite(x0))
    throw Error(ErrorCode::InvalidArgument, "x0 must be finite and >= 0");
  if (x0 == 0.0) return 0.0;
  const std::size_t K = grid_steps(T, dt);
  ReflectingStepper st(x0, bridge_max);
  double t_prev = 0.0;
  std::size_t k = 0;
  while (k < K) {
    // Far from the vertex, m grid steps are taken at once; the radius stays
    // more than 8 standard deviations of the increment away from 0.
    const double r = st.radius();
    const double m_fit = std::floor(r * r / (64.0 * dt));
    const std::size_t m =
        m_fit < 2.0 ? 1 : std::min<std::size_t>(K - k, static_cast<std::size_t>(std::min(m_fit, 1e12)));
    k += m;
    const double t = grid_time(k, K, T, dt);
    if (st.step(t - t_prev, rng)) return t;
    t_prev = t;
  }
  return kInfinity;
}

}  // namespace stargraph

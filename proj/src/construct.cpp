#include "stargraph/construct.hpp"

#include <algorithm>
#include <cmath>

#include "stargraph/error.hpp"

namespace stargraph {

std::string to_string(Construction c) {
  return c == Construction::ItoMcKean ? "itomckean" : "revival";
}

Construction construction_from_string(const std::string& s) {
  if (s == "itomckean") return Construction::ItoMcKean;
  if (s == "revival") return Construction::Revival;
  throw Error(ErrorCode::InvalidArgument, "unknown construction '" + s + "'");
}

GraphPath graph_path_from_walsh(const WalshPath& w, double ltime_scale) {
  GraphPath p;
  p.times = w.times;
  p.state.reserve(w.size());
  p.ltime.reserve(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) {
    p.state.push_back(w.state(k));
    p.ltime.push_back(w.ltime[k] / ltime_scale);
  }
  return p;
}

GraphPath assemble_itomckean(const WalshPath& w, const JumpSet& J, std::size_t n_edges) {
  GraphPath p;
  p.times = w.times;
  p.state.reserve(w.size());
  p.ltime.reserve(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double L = w.ltime[k];
    if (L == 0.0) {
      // before the first vertex visit X coincides with W
      p.state.push_back(w.state(k));
      p.ltime.push_back(0.0);
      continue;
    }
    const auto inv = J.locate(L);
    if (inv.jump) {
      const FlatInterval fi = J.flat_interval(*inv.jump);
      if (fi.edge >= n_edges) throw Error(ErrorCode::InvalidArgument, "jump on an unknown edge");
      p.state.push_back(GraphPoint::on_edge(fi.edge, fi.lplus - L + w.radius[k]));
    } else {
      p.state.push_back(w.state(k));
    }
    p.ltime.push_back(inv.s);
  }
  return p;
}

JumpSet covering_jumpset(const BoundaryWeights& w, double lmax, double eps, Rng& rng) {
  const double drift = w.p2_total();
  if (w.jump.is_zero()) {
    if (!(drift > 0.0))
      throw Error(ErrorCode::InadmissibleWeights, "P is constant without drift or jumps");
    return JumpSet(drift, {}, lmax / drift + 1.0, eps);
  }
  double horizon = drift > 0.0 ? lmax / drift + 1.0 : 1.0;
  JumpSet J = sample_jumpset(w.jump, drift, horizon, eps, w.n_edges(), rng);
  for (int i = 0; !(J.p_eval(J.horizon()) > lmax); ++i) {
    if (i == 200) throw Error(ErrorCode::HorizonExhausted, "jump set does not cover L_T");
    J = extend_jumpset(J, w.jump, 2.0 * J.horizon(), eps, w.n_edges(), rng);
  }
  return J;
}

namespace {

void check_itomckean(const GraphPoint& start, const BoundaryWeights& w) {
  if (start.is_cemetery()) throw Error(ErrorCode::CemeteryArg, "cannot start in the cemetery");
  w.check_admissible();
  if (!(w.p2_total() > 0.0) && w.jump.finite_mass())
    throw Error(ErrorCode::InadmissibleWeights,
                "the Ito-McKean construction needs p2 > 0 or an infinite jump measure");
}

}  // namespace

ItoMcKeanInputs sample_itomckean_inputs(const GraphPoint& start, double T, double dt,
                                        const BoundaryWeights& w, PathStreams& streams,
                                        const ConstructionOptions& opts) {
  check_itomckean(start, w);
  const auto q = w.edge_distribution();
  ItoMcKeanInputs in;
  in.walsh = sample_walsh(start, T, dt, q, streams, opts.bridge_max);
  in.jumps = covering_jumpset(w, in.walsh.ltime.back(), opts.eps, streams.jumps);
  return in;
}

GraphPath itomckean_path(const GraphPoint& start, double T, double dt, const BoundaryWeights& w,
                         PathStreams& streams, const ConstructionOptions& opts) {
  const auto in = sample_itomckean_inputs(start, T, dt, w, streams, opts);
  GraphPath p = assemble_itomckean(in.walsh, in.jumps, w.n_edges());
  p.meta = {Construction::ItoMcKean, dt, opts.eps, streams.radius.seed(), streams.radius.stream(),
            1, 0};
  return p;
}

GraphPath apply_stickiness_and_killing_at(const GraphPath& path, double p1, double p3,
                                          double exp_level) {
  if (!(p1 >= 0.0) || !(p3 >= 0.0)) throw Error(ErrorCode::InvalidArgument, "p1, p3 must be >= 0");
  if ((p1 == 0.0 && p3 == 0.0) || path.size() == 0) return path;
  const double level = p1 > 0.0 ? exp_level / p1 : kInfinity;
  GraphPath out;
  out.meta = path.meta;
  out.times.reserve(path.size());
  out.state.reserve(path.size());
  out.ltime.reserve(path.size());
  out.push(path.times[0] + p3 * path.ltime[0], path.state[0], path.ltime[0]);

  // Appends a node unless the local time crosses the killing level first.
  auto emit = [&](double t, const GraphPoint& g, double l) {
    if (l > level) {
      const double t0 = out.times.back();
      const double l0 = out.ltime.back();
      const double zeta = t0 + (level - l0) / (l - l0) * (t - t0);
      out.push(zeta, GraphPoint::cemetery(), level);
      out.lifetime = zeta;
      return false;
    }
    out.push(t, g, l);
    return true;
  };

  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    if (path.state[k + 1].is_cemetery()) {
      out.push(path.times[k + 1] + p3 * path.ltime[k + 1], path.state[k + 1], path.ltime[k + 1]);
      out.lifetime = out.times.back();
      break;
    }
    const double l0 = path.ltime[k];
    const double l1 = path.ltime[k + 1];
    const double s1 = path.times[k + 1] + p3 * l1;
    if (p3 > 0.0 && l1 > l0) {
      const double s0 = path.times[k] + p3 * l0;
      const double h = path.times[k + 1] - path.times[k];
      const double r0 = path.state[k].x();
      const double r1 = path.state[k + 1].x();
      const double theta = r0 + r1 > 0.0 ? r0 / (r0 + r1) : 0.0;
      const double down = s0 + theta * h;
      if (r0 > 0.0 && !emit(down, GraphPoint::vertex(), l0)) break;
      if (!emit(down + p3 * (l1 - l0), GraphPoint::vertex(), l1)) break;
    }
    if (!emit(s1, path.state[k + 1], l1)) break;
  }
  return out;
}

GraphPath apply_stickiness_and_killing(const GraphPath& path, double p1, double p3, Rng& rng) {
  const double s = rng.exponential(1.0);
  return apply_stickiness_and_killing_at(path, p1, p3, s);
}

GraphPath itomckean_full_path(const GraphPoint& start, double T, double dt,
                              const BoundaryWeights& w, PathStreams& streams,
                              const ConstructionOptions& opts) {
  const GraphPath p = itomckean_path(start, T, dt, w, streams, opts);
  return apply_stickiness_and_killing(p, w.p1, w.p3, streams.killing);
}

namespace {

struct Segment {
  GraphPath path;  // times and local time relative to the segment start
  bool died = false;
};

// Sticky elastic Walsh segment (p2 > 0), simulated until death or until the
// time-changed clock reaches `horizon`.
Segment sticky_elastic_segment(const GraphPoint& g, double horizon, double dt,
                               const BoundaryWeights& w, double kappa, std::span<const double> q,
                               PathStreams& streams, bool bridge_max) {
  const double p2 = w.p2_total();
  const double s = streams.killing.exponential(1.0);
  const double level = kappa > 0.0 ? s / kappa : kInfinity;
  const std::size_t K = grid_steps(horizon, dt);
  WalshPath wp;
  wp.start = g;
  ReflectingStepper st(g.x(), bridge_max);
  EdgeId e = g.is_vertex() ? sample_edge(q, streams.edge) : g.edge();
  auto push = [&](double t) {
    wp.times.push_back(t);
    wp.radius.push_back(st.radius());
    wp.edge.push_back(e);
    wp.ltime.push_back(st.ltime());
  };
  push(0.0);
  for (std::size_t k = 1; k <= K; ++k) {
    const double t = grid_time(k, K, horizon, dt);
    if (st.step(t - wp.times.back(), streams.radius)) e = sample_edge(q, streams.edge);
    push(t);
    const double lx = st.ltime() / p2;
    if (lx > level || t + w.p3 * lx >= horizon) break;
  }
  Segment seg;
  seg.path = apply_stickiness_and_killing_at(graph_path_from_walsh(wp, p2), kappa, w.p3, s);
  seg.died = std::isfinite(seg.path.lifetime);
  return seg;
}

// Walsh motion absorbed at the vertex, held there for an exponential time
// of mean p3 / kappa (p2 = 0, p3 > 0).
Segment absorbed_segment(const GraphPoint& g, double horizon, double dt, double p3, double kappa,
                         PathStreams& streams, bool bridge_max) {
  const double s = streams.killing.exponential(1.0);
  Segment seg;
  GraphPath& p = seg.path;
  double t_hit = 0.0;
  if (g.is_vertex()) {
    p.push(0.0, g, 0.0);
  } else {
    const std::size_t K = grid_steps(horizon, dt);
    ReflectingStepper st(g.x(), bridge_max);
    p.push(0.0, g, 0.0);
    t_hit = kInfinity;
    for (std::size_t k = 1; k <= K; ++k) {
      const double t = grid_time(k, K, horizon, dt);
      if (st.step(t - p.times.back(), streams.radius)) {
        p.push(t, GraphPoint::vertex(), 0.0);
        t_hit = t;
        break;
      }
      p.push(t, GraphPoint::on_edge(g.edge(), st.radius()), 0.0);
    }
    if (!std::isfinite(t_hit)) return seg;
  }
  const double hold = kappa > 0.0 ? s * p3 / kappa : kInfinity;
  if (t_hit + hold >= horizon) {
    p.push(horizon, GraphPoint::vertex(), (horizon - t_hit) / p3);
    return seg;
  }
  const double level = s / kappa;
  p.push(t_hit + hold, GraphPoint::cemetery(), level);
  p.lifetime = t_hit + hold;
  seg.died = true;
  return seg;
}

}  // namespace

GraphPath revival_path(const GraphPoint& start, double T, double dt, const BoundaryWeights& w,
                       PathStreams& streams, const RevivalOptions& opts) {
  if (start.is_cemetery()) throw Error(ErrorCode::CemeteryArg, "cannot start in the cemetery");
  w.validate();
  if (!w.jump.finite_mass())
    throw Error(ErrorCode::InfiniteP4, "the revival construction needs a finite jump measure");
  if (!(w.p2_total() > 0.0) && !(w.p3 > 0.0))
    throw Error(ErrorCode::InadmissibleWeights, "the revival construction needs p2 > 0 or p3 > 0");
  grid_steps(T, dt);

  const double mass = w.jump.is_zero() ? 0.0 : w.jump.total_mass();
  const double kappa = w.p1 + mass;
  const auto q = w.edge_distribution();
  GraphPath out;
  out.meta = {Construction::Revival, dt, 0.0, streams.radius.seed(), streams.radius.stream(), 0,
              0};
  double t0 = 0.0;
  double l0 = 0.0;
  GraphPoint g = start;
  for (;;) {
    if (out.meta.segments == opts.max_segments)
      throw Error(ErrorCode::SegmentLimit, "too many revival segments");
    ++out.meta.segments;
    const double horizon = T - t0;
    const double h = std::min(dt, horizon);
    Segment seg = w.p2_total() > 0.0
                      ? sticky_elastic_segment(g, horizon, h, w, kappa, q, streams, opts.bridge_max)
                      : absorbed_segment(g, horizon, h, w.p3, kappa, streams, opts.bridge_max);
    const GraphPath& p = seg.path;
    const std::size_t alive = seg.died ? p.size() - 1 : p.size();
    for (std::size_t k = 0; k < alive; ++k) out.push(t0 + p.times[k], p.state[k], l0 + p.ltime[k]);
    if (!seg.died) break;
    const double zeta = t0 + p.lifetime;
    const double lz = l0 + p.ltime.back();
    if (streams.revival.uniform() < w.p1 / kappa) {
      out.push(zeta, GraphPoint::cemetery(), lz);
      out.lifetime = zeta;
      break;
    }
    out.push(zeta, GraphPoint::vertex(), lz);
    g = w.jump.sample_point(streams.revival);
    ++out.meta.revivals;
    t0 = zeta;
    l0 = lz;
    if (!(T - t0 > 0.0)) {
      out.push(zeta, g, lz);
      break;
    }
  }
  return out;
}

}  // namespace stargraph

#include "stargraph/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "stargraph/error.hpp"
#include "stargraph/quadrature.hpp"

namespace stargraph::oracle {

namespace {

double root2a(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw Error(ErrorCode::InvalidArgument, "alpha must be positive");
  return std::sqrt(2.0 * alpha);
}

EdgeId edge_of(const GraphPoint& g) {
  if (g.is_cemetery()) throw Error(ErrorCode::CemeteryArg, "evaluation at the cemetery");
  return g.edge();
}

constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;

}  // namespace

double resolvent_bm(double alpha, const RealFn& f, double x) {
  const double k = root2a(alpha);
  auto g = [&](double u) { return std::exp(-k * u) * (f(x + u) + f(x - u)) / k; };
  return quad::integrate_to_infinity(g, 0.0, k, {std::abs(x)});
}

double resolvent_killed_halfline(double alpha, const RealFn& f, double x, double ub0) {
  if (!(x >= 0.0)) throw Error(ErrorCode::InvalidArgument, "x must be >= 0");
  const double k = root2a(alpha);
  if (x == 0.0) return 0.0;
  auto even = [&](double y) { return f(std::abs(y)); };
  return resolvent_bm(alpha, even, x) - std::exp(-k * x) * ub0;
}

double resolvent_killed_halfline(double alpha, const RealFn& f, double x) {
  if (!(x >= 0.0)) throw Error(ErrorCode::InvalidArgument, "x must be >= 0");
  if (x == 0.0) return 0.0;
  auto even = [&](double y) { return f(std::abs(y)); };
  return resolvent_killed_halfline(alpha, f, x, resolvent_bm(alpha, even, 0.0));
}

double halfline_laplace(double alpha, const RealFn& f) {
  const double k = root2a(alpha);
  auto g = [&](double y) { return std::exp(-k * y) * f(y); };
  return quad::integrate_to_infinity(g, 0.0, k);
}

double resolvent_killed_halfline_derivative(double alpha, const RealFn& f, double x,
                                            double image) {
  if (!(x >= 0.0)) throw Error(ErrorCode::InvalidArgument, "x must be >= 0");
  const double k = root2a(alpha);
  // d/dx of (1/k)(e^{-k|x-y|} - e^{-k(x+y)}), regrouped around y = x so that
  // the part of f that is locally constant cancels inside the integrand.
  auto odd = [&](double u) { return std::exp(-k * u) * (f(x + u) - f(x - u)); };
  auto far = [&](double u) { return std::exp(-k * u) * f(x + u); };
  const double near = x > 0.0 ? quad::integrate(odd, 0.0, x) : 0.0;
  return near + quad::integrate_to_infinity(far, x, k) + std::exp(-k * x) * image;
}

double resolvent_killed_halfline_derivative(double alpha, const RealFn& f, double x) {
  return resolvent_killed_halfline_derivative(alpha, f, x, halfline_laplace(alpha, f));
}

double resolvent_walsh_dirichlet(double alpha, const TestFunction& f, const GraphPoint& g) {
  const EdgeId e = edge_of(g);
  if (g.is_vertex()) return 0.0;
  auto fe = [&](double y) { return f.on_edge(e, y); };
  return resolvent_killed_halfline(alpha, fe, g.x());
}

double edge_laplace(double alpha, const TestFunction& f, EdgeId e) {
  const double k = root2a(alpha);
  auto g = [&](double x) { return 2.0 * std::exp(-k * x) * f.on_edge(e, x); };
  return quad::integrate_to_infinity(g, 0.0, k);
}

double resolvent_walsh_vertex(double alpha, const TestFunction& f, const BoundaryWeights& w) {
  const double k = root2a(alpha);
  const auto q = w.edge_distribution();
  double s = 0.0;
  for (EdgeId e = 0; e < q.size(); ++e)
    if (q[e] > 0.0) s += q[e] * edge_laplace(alpha, f, e) / k;
  return s;
}

double walsh_semigroup(double t, const TestFunction& f, const GraphPoint& g,
                       const BoundaryWeights& w) {
  if (g.is_cemetery()) throw Error(ErrorCode::CemeteryArg, "evaluation at the cemetery");
  if (t == 0.0) return f(g);
  if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "t must be >= 0");
  const auto q = w.edge_distribution();
  const double x = g.x();
  const double sd = std::sqrt(t);
  auto phi = [&](double z) { return kInvSqrt2Pi / sd * std::exp(-z * z / (2.0 * t)); };
  // sum_e q_e [ (phi(y-x) + phi(y+x)) f(e,y) + (phi(y-x) - phi(y+x)) (f(l,y) - f(e,y)) ]
  auto integrand = [&](double y) {
    const double pm = phi(y - x);
    const double pp = phi(y + x);
    const double fl = g.is_vertex() ? 0.0 : f.on_edge(g.edge(), y);
    double s = 0.0;
    for (EdgeId e = 0; e < q.size(); ++e) {
      if (q[e] <= 0.0) continue;
      const double fe = f.on_edge(e, y);
      s += q[e] * ((pm + pp) * fe + (g.is_vertex() ? 0.0 : (pm - pp) * (fl - fe)));
    }
    return s;
  };
  return quad::integrate_to_infinity(integrand, 0.0, 1.0 / sd, {x});
}

VertexResolventTerms resolvent_vertex_terms(double alpha, const TestFunction& f,
                                            const BoundaryWeights& w) {
  const double k = root2a(alpha);
  VertexResolventTerms r;
  for (EdgeId e = 0; e < w.n_edges(); ++e)
    if (w.p2[e] > 0.0) r.reflection += w.p2[e] * edge_laplace(alpha, f, e);
  r.sticky = w.p3 * f.at_vertex();
  r.jump = w.jump.is_zero() ? 0.0 : jump_dirichlet_integral(w.jump, alpha, f);
  r.denominator = w.p1 + k * w.p2_total() + alpha * w.p3 +
                  (w.jump.is_zero() ? 0.0 : jump_exp_integral(w.jump, k));
  return r;
}

double resolvent_vertex_full(double alpha, const TestFunction& f, const BoundaryWeights& w) {
  const auto t = resolvent_vertex_terms(alpha, f, w);
  if (!(t.denominator > 0.0))
    throw Error(ErrorCode::ZeroDenominator, "vertex resolvent denominator vanishes");
  return t.value();
}

double resolvent_full(double alpha, const TestFunction& f, const GraphPoint& g,
                      const BoundaryWeights& w) {
  edge_of(g);
  const double k = root2a(alpha);
  const double v0 = resolvent_vertex_full(alpha, f, w);
  if (g.is_vertex()) return v0;
  return resolvent_walsh_dirichlet(alpha, f, g) + std::exp(-k * g.x()) * v0;
}

TestFunction resolvent_as_function(double alpha, const TestFunction& f, const BoundaryWeights& w) {
  const double k = root2a(alpha);
  const double v0 = resolvent_vertex_full(alpha, f, w);
  auto fc = std::make_shared<const TestFunction>(f);
  auto ub0 = std::make_shared<std::vector<double>>(w.n_edges());
  for (EdgeId e = 0; e < w.n_edges(); ++e) {
    auto even = [&](double y) { return f.on_edge(e, std::abs(y)); };
    (*ub0)[e] = resolvent_bm(alpha, even, 0.0);
  }
  return {[alpha, k, v0, fc, ub0](const GraphPoint& g) {
            const EdgeId e = edge_of(g);
            if (g.is_vertex()) return v0;
            auto fe = [&](double y) { return fc->on_edge(e, y); };
            const double d = e < ub0->size()
                                 ? resolvent_killed_halfline(alpha, fe, g.x(), (*ub0)[e])
                                 : resolvent_killed_halfline(alpha, fe, g.x());
            return d + std::exp(-k * g.x()) * v0;
          },
          f.bound / alpha, "U(" + f.name + ")"};
}

namespace {

// u = U*_alpha f evaluated on edge e at x, continued analytically to x < 0
// through the Dirichlet decomposition.
double u_on_edge(double alpha, const TestFunction& f, EdgeId e, double x, double v0) {
  const double k = std::sqrt(2.0 * alpha);
  auto even = [&](double y) { return f.on_edge(e, std::abs(y)); };
  const double ub = resolvent_bm(alpha, even, x);
  const double ub0 = resolvent_bm(alpha, even, 0.0);
  return ub - std::exp(-k * x) * ub0 + std::exp(-k * x) * v0;
}

}  // namespace

double boundary_residual(double alpha, const TestFunction& f, const BoundaryWeights& wc,
                         const BoundaryWeights& wr, DerivativeMode mode) {
  const double k = root2a(alpha);
  const double u0 = resolvent_vertex_full(alpha, f, wr);
  double first = 0.0;   // sum_e p2^e u_e'(0)
  double second = 0.0;  // u''(0)
  double jump = 0.0;    // int (u(g) - u(0)) p4(dg)
  if (mode == DerivativeMode::Algebraic) {
    for (EdgeId e = 0; e < wc.n_edges(); ++e)
      if (wc.p2[e] > 0.0) first += wc.p2[e] * (edge_laplace(alpha, f, e) - k * u0);
    second = -2.0 * f.at_vertex() + 2.0 * alpha * u0;
    if (!wc.jump.is_zero())
      jump = jump_dirichlet_integral(wc.jump, alpha, f) - u0 * jump_exp_integral(wc.jump, k);
  } else {
    const double h = 1e-4;
    for (EdgeId e = 0; e < wc.n_edges(); ++e) {
      if (wc.p2[e] <= 0.0) continue;
      const double up = u_on_edge(alpha, f, e, h, u0);
      const double um = u_on_edge(alpha, f, e, -h, u0);
      first += wc.p2[e] * (up - um) / (2.0 * h);
    }
    if (wc.p3 > 0.0) {
      const double up = u_on_edge(alpha, f, 0, h, u0);
      const double um = u_on_edge(alpha, f, 0, -h, u0);
      second = (up - 2.0 * u0 + um) / (h * h);
    }
    if (!wc.jump.is_zero()) {
      if (wc.jump.is_atoms()) {
        for (const auto& a : wc.jump.atom_list())
          jump += a.mass * (u_on_edge(alpha, f, a.edge, a.height, u0) - u0);
      } else {
        for (const auto& [e, t] : wc.jump.edge_tails()) {
          const EdgeTail tail = t;
          const EdgeId edge = e;
          auto g = [&](double l) {
            const double d = (u_on_edge(alpha, f, edge, l + h, u0) -
                              u_on_edge(alpha, f, edge, l - h, u0)) / (2.0 * h);
            return d * tail.tail(l);
          };
          std::vector<double> bp;
          if (tail.cutoff > 0.0) bp.push_back(tail.cutoff);
          jump += quad::integrate(g, 0.0, std::max(tail.cutoff, 0.0) + 60.0 / k, bp);
        }
      }
    }
  }
  return wc.p1 * u0 - first + 0.5 * wc.p3 * second - jump;
}

double passage_laplace(double alpha, double x) {
  if (!(x >= 0.0)) throw Error(ErrorCode::InvalidArgument, "x must be >= 0");
  return std::exp(-root2a(alpha) * x);
}

double inv_localtime_laplace(double alpha, double x, double a) {
  if (!(x >= 0.0) || !(a >= 0.0)) throw Error(ErrorCode::InvalidArgument, "x, a must be >= 0");
  return std::exp(-root2a(alpha) * (x + a));
}

double joint_density_wl(double t, EdgeId e, double x, double y, const BoundaryWeights& w) {
  if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "t must be positive");
  if (x < 0.0 || y < 0.0) return 0.0;
  const auto q = w.edge_distribution();
  const double s = x + y;
  return q.at(e) * 2.0 * s * kInvSqrt2Pi / std::sqrt(t * t * t) * std::exp(-s * s / (2.0 * t));
}

double joint_survival_wl(double t, double x, double y) {
  if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "t must be positive");
  return std::erfc((std::max(x, 0.0) + std::max(y, 0.0)) / std::sqrt(2.0 * t));
}

double subordinator_laplace(double lambda, double t, double drift, const JumpMeasureSpec& spec,
                            double eps) {
  if (!(lambda >= 0.0) || !(t >= 0.0))
    throw Error(ErrorCode::InvalidArgument, "lambda and t must be >= 0");
  if (lambda == 0.0) return 1.0;
  const double psi = spec.is_zero() ? 0.0 : jump_exp_integral(spec.truncated(eps), lambda);
  return std::exp(-t * (lambda * drift + psi));
}

}  // namespace stargraph::oracle

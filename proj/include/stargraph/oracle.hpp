#pragma once

#include <functional>

#include "stargraph/graph.hpp"
#include "stargraph/test_function.hpp"
#include "stargraph/weights.hpp"

namespace stargraph::oracle {

using RealFn = std::function<double(double)>;

/// Resolvent of standard Brownian motion on the real line.
double resolvent_bm(double alpha, const RealFn& f, double x);

/// Resolvent of Brownian motion on [0, inf) killed at 0, via the
/// decomposition U^B f~(x) - e^{-sqrt(2 alpha) x} U^B f~(0) with f~ the even
/// extension of f.
double resolvent_killed_halfline(double alpha, const RealFn& f, double x);

/// Same, with U^B f~(0) supplied by the caller.
double resolvent_killed_halfline(double alpha, const RealFn& f, double x, double ub0);

/// x-derivative of resolvent_killed_halfline, from the derivative of its
/// Green function.
double resolvent_killed_halfline_derivative(double alpha, const RealFn& f, double x);

/// Same, with image = int_0^inf e^{-sqrt(2 alpha) y} f(y) dy supplied by the caller.
double resolvent_killed_halfline_derivative(double alpha, const RealFn& f, double x,
                                            double image);

/// int_0^inf e^{-sqrt(2 alpha) y} f(y) dy.
double halfline_laplace(double alpha, const RealFn& f);

/// Resolvent of the Walsh process killed at the vertex; 0 at the vertex.
double resolvent_walsh_dirichlet(double alpha, const TestFunction& f, const GraphPoint& g);

/// 2 * int_0^inf e^{-sqrt(2 alpha) x} f(e, x) dx.
double edge_laplace(double alpha, const TestFunction& f, EdgeId e);

/// Walsh resolvent at the vertex, sum_e q_e (2 / sqrt(2 alpha)) int e^{..} f.
double resolvent_walsh_vertex(double alpha, const TestFunction& f, const BoundaryWeights& w);

/// Walsh semigroup T^W_t f at the point (l, x) (or at the vertex).
double walsh_semigroup(double t, const TestFunction& f, const GraphPoint& g,
                       const BoundaryWeights& w);

/// Numerator and denominator of the vertex resolvent of X.
struct VertexResolventTerms {
  double reflection = 0.0;  // sum_e p2^e 2 int e^{-sqrt(2a) x} f(e, x) dx
  double sticky = 0.0;      // p3 f(0)
  double jump = 0.0;        // int U^{W,D} f dp4
  double denominator = 0.0; // p1 + sqrt(2a) p2 + a p3 + int (1 - e^{-sqrt(2a) l}) p4^Sigma
  double value() const { return (reflection + sticky + jump) / denominator; }
};

VertexResolventTerms resolvent_vertex_terms(double alpha, const TestFunction& f,
                                            const BoundaryWeights& w);

/// U*_alpha f(0).  Throws ZeroDenominator.
double resolvent_vertex_full(double alpha, const TestFunction& f, const BoundaryWeights& w);

/// U*_alpha f(g) = U^{W,D}_alpha f(g) + e^{-sqrt(2 alpha) x} U*_alpha f(0).
double resolvent_full(double alpha, const TestFunction& f, const GraphPoint& g,
                      const BoundaryWeights& w);

/// U*_alpha f as a test function on the graph (bound sup|f| / alpha), for
/// nested evaluations such as the resolvent equation.
TestFunction resolvent_as_function(double alpha, const TestFunction& f, const BoundaryWeights& w);

enum class DerivativeMode { Algebraic, FiniteDifference };

/// p1 u(0) - sum p2^e u_e'(0) + (p3/2) u''(0) - int (u(g) - u(0)) p4(dg) for
/// u = U*_alpha f computed with the weights `w_resolvent` and tested against
/// the boundary data `w_condition` (normally identical).
double boundary_residual(double alpha, const TestFunction& f, const BoundaryWeights& w_condition,
                         const BoundaryWeights& w_resolvent,
                         DerivativeMode mode = DerivativeMode::Algebraic);
inline double boundary_residual(double alpha, const TestFunction& f, const BoundaryWeights& w,
                                DerivativeMode mode = DerivativeMode::Algebraic) {
  return boundary_residual(alpha, f, w, w, mode);
}

/// E_x e^{-alpha H_0} = e^{-sqrt(2 alpha) x}.
double passage_laplace(double alpha, double x);
/// E_x e^{-alpha L^{-1}(a)} = e^{-sqrt(2 alpha) (x + a)}.
double inv_localtime_laplace(double alpha, double x, double a);

/// Density of (W_t, L_t) under P_0 at (edge e, radius x, local time y).
double joint_density_wl(double t, EdgeId e, double x, double y, const BoundaryWeights& w);
/// P_0(|W_t| > x, L_t > y) = 2 (1 - Phi((x + y) / sqrt t)); edge-free.
double joint_survival_wl(double t, double x, double y);

/// exp(-t (lambda drift + int (1 - e^{-lambda l}) nu(dl))), with nu
/// restricted to (eps, inf) when eps > 0.
double subordinator_laplace(double lambda, double t, double drift, const JumpMeasureSpec& spec,
                            double eps = 0.0);

}  // namespace stargraph::oracle

#include "stargraph/jump_measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stargraph/error.hpp"
#include "stargraph/oracle.hpp"
#include "stargraph/quadrature.hpp"
#include "stargraph/rng.hpp"
#include "stargraph/test_function.hpp"

namespace stargraph {

double EdgeTail::tail(double x) const {
  const double y = std::max(x, cutoff);
  return std::visit(
      [y](const auto& fam) -> double {
        using F = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<F, PowerTail>) {
          return y > 0.0 ? fam.c * std::pow(y, -fam.beta) : kInfinity;
        } else {
          return fam.c * std::exp(-fam.rate * y);
        }
      },
      family);
}

double EdgeTail::inverse_tail(double y) const {
  const double x = std::visit(
      [y](const auto& fam) -> double {
        using F = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<F, PowerTail>) {
          return std::pow(fam.c / y, 1.0 / fam.beta);
        } else {
          return std::log(fam.c / y) / fam.rate;
        }
      },
      family);
  return std::max(x, cutoff);
}

bool EdgeTail::finite_mass() const {
  return std::holds_alternative<ExpTail>(family) || cutoff > 0.0;
}

double EdgeTail::total_mass() const { return tail(0.0); }

EdgeTail EdgeTail::scaled(double s) const {
  EdgeTail out = *this;
  std::visit([s](auto& fam) { fam.c *= s; }, out.family);
  return out;
}

std::string EdgeTail::family_name() const {
  return std::holds_alternative<PowerTail>(family) ? "power_tail" : "exp_tail";
}

JumpMeasureSpec JumpMeasureSpec::atoms(std::vector<Atom> atoms) {
  JumpMeasureSpec s;
  s.data_ = std::move(atoms);
  return s;
}

JumpMeasureSpec JumpMeasureSpec::density(EdgeTails tails) {
  JumpMeasureSpec s;
  s.data_ = std::move(tails);
  return s;
}

bool JumpMeasureSpec::is_zero() const {
  if (is_atoms())
    return std::all_of(atom_list().begin(), atom_list().end(),
                       [](const Atom& a) { return a.mass == 0.0; });
  return std::all_of(edge_tails().begin(), edge_tails().end(),
                     [](const auto& t) { return t.second.total_mass() == 0.0; });
}

bool JumpMeasureSpec::finite_mass() const {
  if (is_atoms()) return true;
  return std::all_of(edge_tails().begin(), edge_tails().end(),
                     [](const auto& t) { return t.second.finite_mass(); });
}

double JumpMeasureSpec::total_mass() const {
  double m = 0.0;
  if (is_atoms()) {
    for (const auto& a : atom_list()) m += a.mass;
  } else {
    for (const auto& [e, t] : edge_tails()) m += t.total_mass();
  }
  return m;
}

double JumpMeasureSpec::edge_mass(EdgeId e) const { return tail(e, 0.0); }

double JumpMeasureSpec::tail(EdgeId e, double x) const {
  double m = 0.0;
  if (is_atoms()) {
    for (const auto& a : atom_list())
      if (a.edge == e && a.height > x) m += a.mass;
  } else {
    for (const auto& [edge, t] : edge_tails())
      if (edge == e) m += t.tail(x);
  }
  return m;
}

JumpMeasureSpec JumpMeasureSpec::scaled(double s) const {
  JumpMeasureSpec out = *this;
  if (is_atoms()) {
    for (auto& a : std::get<std::vector<Atom>>(out.data_)) a.mass *= s;
  } else {
    for (auto& [e, t] : std::get<EdgeTails>(out.data_)) t = t.scaled(s);
  }
  return out;
}

JumpMeasureSpec JumpMeasureSpec::truncated(double eps) const {
  if (is_atoms() || eps <= 0.0) return *this;
  JumpMeasureSpec out = *this;
  for (auto& [e, t] : std::get<EdgeTails>(out.data_))
    if (!t.finite_mass()) t.cutoff = std::max(t.cutoff, eps);
  return out;
}

void JumpMeasureSpec::validate(std::size_t n_edges) const {
  auto bad = [](const std::string& msg) { throw Error(ErrorCode::InvalidArgument, msg); };
  if (is_atoms()) {
    for (const auto& a : atom_list()) {
      if (a.edge >= n_edges) bad("atom on an unknown edge");
      if (!(a.height > 0.0) || !std::isfinite(a.height)) bad("atom heights must be positive");
      if (!(a.mass > 0.0) || !std::isfinite(a.mass)) bad("atom masses must be positive");
    }
    return;
  }
  for (const auto& [e, t] : edge_tails()) {
    if (e >= n_edges) bad("tail on an unknown edge");
    if (!(t.cutoff >= 0.0) || !std::isfinite(t.cutoff)) bad("cutoff must be finite and >= 0");
    std::visit(
        [&](const auto& fam) {
          using F = std::decay_t<decltype(fam)>;
          if (!(fam.c > 0.0) || !std::isfinite(fam.c)) bad("tail constant must be positive");
          if constexpr (std::is_same_v<F, PowerTail>) {
            if (!(fam.beta > 0.0 && fam.beta < 1.0)) bad("power_tail needs beta in (0, 1)");
          } else {
            if (!(fam.rate > 0.0) || !std::isfinite(fam.rate)) bad("exp_tail needs rate > 0");
          }
        },
        t.family);
  }
  if (!std::isfinite(jump_exp_integral(*this, 1.0)))
    throw Error(ErrorCode::Divergent, "int (1 - e^{-x}) p4 is not finite");
}

GraphPoint JumpMeasureSpec::sample_point(Rng& rng) const {
  const double mass = total_mass();
  if (!(mass > 0.0) || !std::isfinite(mass))
    throw Error(ErrorCode::InvalidArgument, "sampling needs a finite nonzero jump measure");
  double u = rng.uniform() * mass;
  if (is_atoms()) {
    const auto& as = atom_list();
    for (const auto& a : as) {
      if (u < a.mass) return GraphPoint::on_edge(a.edge, a.height);
      u -= a.mass;
    }
    return GraphPoint::on_edge(as.back().edge, as.back().height);
  }
  const auto& ts = edge_tails();
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double m = ts[i].second.total_mass();
    if (u < m || i + 1 == ts.size())
      return GraphPoint::on_edge(ts[i].first, ts[i].second.inverse_tail(m * rng.uniform_open()));
    u -= m;
  }
  return GraphPoint::vertex();  // unreachable
}

double jump_exp_integral(const JumpMeasureSpec& spec, double lambda) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda must be positive");
  if (spec.is_atoms()) {
    double s = 0.0;
    for (const auto& a : spec.atom_list()) s += -a.mass * std::expm1(-lambda * a.height);
    return s;
  }
  // int (1 - e^{-lambda l}) nu(dl) = lambda int e^{-lambda l} Lambda(l) dl
  double s = 0.0;
  for (const auto& [e, t] : spec.edge_tails()) {
    const EdgeTail tail = t;
    auto g = [&](double l) { return lambda * std::exp(-lambda * l) * tail.tail(l); };
    std::vector<double> bp;
    if (tail.cutoff > 0.0) bp.push_back(tail.cutoff);
    s += quad::integrate_to_infinity(g, 0.0, lambda, bp);
  }
  return s;
}

double jump_dirichlet_integral(const JumpMeasureSpec& spec, double alpha, const TestFunction& f) {
  if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidArgument, "alpha must be positive");
  double s = 0.0;
  if (spec.is_atoms()) {
    for (const auto& a : spec.atom_list())
      s += a.mass * oracle::resolvent_walsh_dirichlet(alpha, f, GraphPoint::on_edge(a.edge, a.height));
    return s;
  }
  // int h dnu = int h'(l) Lambda(l) dl with h = U^{W,D} f(e, .), h(0) = 0
  const double k = std::sqrt(2.0 * alpha);
  for (const auto& [e, t] : spec.edge_tails()) {
    const EdgeTail tail = t;
    const EdgeId edge = e;
    auto fe = [&](double y) { return f.on_edge(edge, y); };
    const double image = oracle::halfline_laplace(alpha, fe);
    auto g = [&](double l) {
      return oracle::resolvent_killed_halfline_derivative(alpha, fe, l, image) * tail.tail(l);
    };
    std::vector<double> bp;
    if (tail.cutoff > 0.0) bp.push_back(tail.cutoff);
    s += quad::integrate_to_infinity(g, 0.0, k, bp);
  }
  return s;
}

}  // namespace stargraph

#include "stargraph/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "stargraph/error.hpp"

namespace stargraph::quad {

namespace {

thread_local int nesting = 0;

constexpr double kDivergenceTol = 1e-6;

struct NestingGuard {
  NestingGuard() { ++nesting; }
  ~NestingGuard() { --nesting; }
  NestingGuard(const NestingGuard&) = delete;
  NestingGuard& operator=(const NestingGuard&) = delete;
  bool outer() const { return nesting == 1; }
};

double integrate_piece(const Integrand& f, double a, double b) {
  if (!(b > a)) return 0.0;
  thread_local boost::math::quadrature::tanh_sinh<double> rule;
  double err = 0.0;
  double l1 = 0.0;
  double v;
  try {
    NestingGuard guard;
    v = rule.integrate(f, a, b, guard.outer() ? kRelTol : kNestedRelTol, &err, &l1);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& ex) {
    throw Error(ErrorCode::QuadratureFail, ex.what());
  }
  if (!std::isfinite(v)) throw Error(ErrorCode::QuadratureFail, "non-finite integral");
  return v;
}

}  // namespace

double integrate(const Integrand& f, double a, double b, const std::vector<double>& breakpoints) {
  if (!std::isfinite(a) || !std::isfinite(b))
    throw Error(ErrorCode::QuadratureFail, "integrate needs finite limits");
  if (b < a) return -integrate(f, b, a, breakpoints);
  std::vector<double> cuts{a};
  for (double c : breakpoints)
    if (c > a && c < b) cuts.push_back(c);
  std::sort(cuts.begin(), cuts.end());
  cuts.push_back(b);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += integrate_piece(f, cuts[i], cuts[i + 1]);
  return total;
}

double integrate_to_infinity(const Integrand& f, double a, double rate,
                             const std::vector<double>& breakpoints) {
  if (!(rate > 0.0)) throw Error(ErrorCode::QuadratureFail, "decay rate must be positive");
  double end = a;
  for (double c : breakpoints)
    if (std::isfinite(c)) end = std::max(end, c);
  double total = end > a ? integrate(f, a, end, breakpoints) : 0.0;
  thread_local boost::math::quadrature::exp_sinh<double> tail_rule;
  auto scaled = [&](double u) { return f(end + u / rate) / rate; };
  double err = 0.0;
  double l1 = 0.0;
  double v;
  try {
    NestingGuard guard;
    v = tail_rule.integrate(scaled, guard.outer() ? kRelTol : kNestedRelTol, &err, &l1);
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    throw Error(ErrorCode::Divergent, "integrand does not decay");
  }
  if (!std::isfinite(v) || err > kDivergenceTol * std::max(l1, std::abs(total)))
    throw Error(ErrorCode::Divergent, "integrand does not decay");
  return total + v;
}

}  // namespace stargraph::quad

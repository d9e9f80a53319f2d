#pragma once

#include <functional>
#include <initializer_list>
#include <vector>

namespace stargraph::quad {

using Integrand = std::function<double(double)>;

/// Relative tolerance requested from every adaptive rule.
inline constexpr double kRelTol = 1e-10;

/// Tolerance for integrals evaluated inside the integrand of another one.
inline constexpr double kNestedRelTol = 1e-7;

/// Integral over [a, b] (finite).  Interior kinks must be passed as
/// breakpoints; endpoint singularities are fine.  Throws QuadratureFail.
double integrate(const Integrand& f, double a, double b,
                 const std::vector<double>& breakpoints = {});

/// Integral over [a, inf).  Finite pieces up to the last breakpoint, then
/// exp-sinh on the tail with `1 / rate` as the length scale.  Throws Divergent
/// if the tail does not converge.
double integrate_to_infinity(const Integrand& f, double a, double rate,
                             const std::vector<double>& breakpoints = {});

}  // namespace stargraph::quad

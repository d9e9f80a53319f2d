#include "stargraph/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

#include "stargraph/error.hpp"

namespace stargraph::stats {

double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

MeanStderr mean_stderr(std::span<const double> xs) {
  MeanStderr r;
  r.n = xs.size();
  if (r.n == 0) return r;
  r.mean = pairwise_sum(xs) / static_cast<double>(r.n);
  if (r.n < 2) return r;
  std::vector<double> sq(xs.size());
  std::transform(xs.begin(), xs.end(), sq.begin(),
                 [m = r.mean](double x) { return (x - m) * (x - m); });
  const double var = pairwise_sum(sq) / static_cast<double>(r.n - 1);
  r.stderr_ = std::sqrt(var / static_cast<double>(r.n));
  return r;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double chi_square_sf(double stat, double dof) {
  if (!(dof > 0.0)) throw Error(ErrorCode::InvalidArgument, "chi-square needs dof > 0");
  if (stat <= 0.0) return 1.0;
  return boost::math::gamma_q(dof / 2.0, stat / 2.0);
}

ChiSquareResult chi_square_gof(std::span<const double> counts, std::span<const double> probs,
                               double min_expected, std::size_t fitted_params) {
  if (counts.size() != probs.size() || counts.empty())
    throw Error(ErrorCode::InvalidArgument, "counts and probabilities differ in length");
  double n = 0.0, psum = 0.0;
  for (double c : counts) n += c;
  for (double p : probs) psum += p;
  if (std::abs(psum - 1.0) > 1e-6)
    throw Error(ErrorCode::InvalidArgument, "cell probabilities must sum to 1");

  std::vector<double> obs, expct;
  double co = 0.0, ce = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    co += counts[i];
    ce += n * probs[i];
    if (ce >= min_expected) {
      obs.push_back(co);
      expct.push_back(ce);
      co = ce = 0.0;
    }
  }
  if (ce > 0.0 || co > 0.0) {
    if (obs.empty()) {
      obs.push_back(co);
      expct.push_back(ce);
    } else {
      obs.back() += co;
      expct.back() += ce;
    }
  }
  ChiSquareResult r;
  r.bins = obs.size();
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const double d = obs[i] - expct[i];
    r.stat += d * d / expct[i];
  }
  r.dof = static_cast<double>(r.bins) - 1.0 - static_cast<double>(fitted_params);
  r.p_value = r.dof > 0.0 ? chi_square_sf(r.stat, r.dof) : 1.0;
  return r;
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double F = cdf(samples[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - F, F - static_cast<double>(i) / n});
  }
  return d;
}

double ks_pvalue(double d, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

}  // namespace stargraph::stats

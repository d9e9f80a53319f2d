#include "stargraph/weights.hpp"

#include <cmath>
#include <numeric>

#include "stargraph/error.hpp"

namespace stargraph {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, msg);
}

bool nonneg(double v) { return v >= 0.0 && std::isfinite(v); }

}  // namespace

double BoundaryWeights::p2_total() const { return std::accumulate(p2.begin(), p2.end(), 0.0); }

std::vector<double> BoundaryWeights::edge_distribution() const {
  const std::size_t n = n_edges();
  const double total = p2_total();
  std::vector<double> q(n, n ? 1.0 / static_cast<double>(n) : 0.0);
  if (total > 0.0) {
    for (std::size_t e = 0; e < n; ++e) q[e] = p2[e] / total;
  } else if (!walsh_weights_override.empty()) {
    const double s =
        std::accumulate(walsh_weights_override.begin(), walsh_weights_override.end(), 0.0);
    for (std::size_t e = 0; e < n; ++e) q[e] = walsh_weights_override[e] / s;
  }
  return q;
}

bool BoundaryWeights::admissible() const {
  return p2_total() > 0.0 || p3 > 0.0 || !jump.finite_mass();
}

void BoundaryWeights::validate() const {
  require(n_edges() >= 1, "at least one edge is required");
  require(nonneg(p1), "p1 must be finite and >= 0");
  require(nonneg(p3), "p3 must be finite and >= 0");
  for (double v : p2) require(nonneg(v), "p2 entries must be finite and >= 0");
  if (!walsh_weights_override.empty()) {
    require(walsh_weights_override.size() == n_edges(), "walsh weights need one entry per edge");
    double s = 0.0;
    for (double v : walsh_weights_override) {
      require(nonneg(v), "walsh weights must be finite and >= 0");
      s += v;
    }
    require(s > 0.0, "walsh weights must not all vanish");
  }
  jump.validate(n_edges());
}

void BoundaryWeights::check_admissible() const {
  validate();
  if (!admissible())
    throw Error(ErrorCode::InadmissibleWeights,
                "p2 = 0 and p3 = 0 require a jump measure of infinite total mass");
}

BoundaryWeights BoundaryWeights::scaled(double s) const {
  require(s > 0.0 && std::isfinite(s), "scale factor must be positive");
  BoundaryWeights out = *this;
  out.p1 *= s;
  for (double& v : out.p2) v *= s;
  out.p3 *= s;
  out.jump = jump.scaled(s);
  return out;
}

double BoundaryWeights::normalizing_sum() const {
  return p1 + p2_total() + p3 + jump_exp_integral(jump, 1.0);
}

BoundaryWeights normalize(const BoundaryWeights& w) {
  const double s = w.normalizing_sum();
  if (!(s > 0.0)) throw Error(ErrorCode::AllZero, "normalizing sum is zero");
  return w.scaled(1.0 / s);
}

}  // namespace stargraph

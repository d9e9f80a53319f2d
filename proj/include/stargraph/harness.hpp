#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "stargraph/construct.hpp"
#include "stargraph/parallel.hpp"
#include "stargraph/test_function.hpp"
#include "stargraph/weights.hpp"

namespace stargraph {

/// int_0^{min(lifetime, t_max)} e^{-alpha t} f(X_t) dt for the piecewise
/// linear interpolation of f along the path nodes; the exponential weight is
/// integrated exactly.
double discounted_integral(const GraphPath& path, const TestFunction& f, double alpha,
                           double t_max);

struct McOptions {
  std::size_t n_paths = 10000;
  double dt = 1e-3;
  double t_max = 0.0;  // 0 means 12 / alpha
  double eps = 1e-4;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  bool bridge_max = true;
  /// Also evaluate every Ito-McKean path on the coupled 2 dt grid and report
  /// the mean difference as the discretization bias estimate.
  bool estimate_dt_bias = false;
};

struct McEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  std::size_t n_paths = 0;
  double dt = 0.0;
  double t_max = 0.0;
  double eps = 0.0;
  double truncation_bound = 0.0;  // sup|f| e^{-alpha t_max} / alpha
  double dt_bias = 0.0;           // |mean(fine - coarse)| when estimated
  double cutoff_bias = 0.0;       // |U(p4) - U(p4 restricted to (eps, inf))|
  double bias_budget() const { return truncation_bound + dt_bias + cutoff_bias; }
};

/// Monte Carlo estimate of U*_alpha f(g0), one estimate per function, all
/// from the same paths.
std::vector<McEstimate> mc_resolvent_multi(const GraphPoint& g0, double alpha,
                                           std::span<const TestFunction> fs,
                                           const BoundaryWeights& w, Construction construction,
                                           const McOptions& opts);

McEstimate mc_resolvent(const GraphPoint& g0, double alpha, const TestFunction& f,
                        const BoundaryWeights& w, Construction construction, const McOptions& opts);

enum class RowKind { Statistical, Deterministic };

struct VerificationRow {
  std::string name;
  RowKind kind = RowKind::Statistical;
  double oracle = 0.0;
  double estimate = 0.0;
  double stderr_ = 0.0;
  double z = 0.0;          // statistical rows; for p-value rows, the p-value
  double tolerance = 0.0;  // deterministic tolerance or bias budget
  bool pass = false;
  std::string verdict;  // PASS, FAIL or INSUFFICIENT_SAMPLES
  std::string note;
};

struct VerificationReport {
  std::vector<VerificationRow> rows;
  double runtime_seconds = 0.0;

  /// All rows pass; rows without a verdict (INSUFFICIENT_SAMPLES) are ignored.
  bool pass() const;
  std::string to_json(bool include_runtime = false) const;
  std::string to_table() const;
};

/// One comparison: a statistical row passes when |z| < z_threshold after
/// allowing `bias` on top of 3 standard errors, i.e.
/// |estimate - oracle| < z_threshold * stderr + bias.  Deterministic rows
/// pass when |estimate - oracle| < tolerance.
struct CheckSpec {
  std::string name;
  RowKind kind = RowKind::Statistical;
  std::function<double()> oracle;
  std::function<McEstimate()> estimator;     // statistical
  std::function<double()> deterministic;     // deterministic
  double z_threshold = 3.0;
  double tolerance = 1e-8;
};

VerificationRow make_statistical_row(const std::string& name, double oracle, const McEstimate& est,
                                     double z_threshold = 3.0);
VerificationRow make_deterministic_row(const std::string& name, double oracle, double value,
                                       double tolerance);
/// Row for a goodness-of-fit test: passes when p >= significance.
VerificationRow make_pvalue_row(const std::string& name, double statistic, double p_value,
                                double significance, std::size_t n, std::size_t min_samples = 100);

VerificationReport compare_mc_oracle(const std::vector<CheckSpec>& specs);

/// Chi-square test of (edge, radius, local time) at time t from the vertex
/// against the closed-form joint law; 10 x 10 radial bins per edge with
/// quantile edges, merged to >= 5 expected counts.
VerificationRow joint_law_test(double t, const BoundaryWeights& w, std::size_t n,
                               std::uint64_t seed, double dt = 1e-3, unsigned threads = 1,
                               double significance = 1e-3);

/// Compares a revival and an Ito-McKean estimate of the same quantity: passes
/// when the difference is below z_threshold combined standard errors plus both
/// bias budgets.
VerificationRow make_cross_row(const std::string& name, const McEstimate& revival,
                               const McEstimate& itomckean, double z_threshold = 3.0);

/// Revival and Ito-McKean estimates of U*_alpha f(g0), combined z-score.
VerificationRow cross_construction_test(const BoundaryWeights& w, const GraphPoint& g0,
                                        double alpha, const TestFunction& f,
                                        const McOptions& opts);

/// MC mean of e^{-alpha H_0} from (edge 0, x) against e^{-sqrt(2 alpha) x},
/// one row per (alpha, x); the paths for a given x are shared across alphas.
std::vector<VerificationRow> passage_time_suite(std::span<const double> alphas,
                                                std::span<const double> xs, std::size_t n,
                                                double dt, std::uint64_t seed, unsigned threads);

}  // namespace stargraph

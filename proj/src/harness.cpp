#include "stargraph/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>

#include <boost/math/distributions/normal.hpp>
#include <json.hpp>

#include "stargraph/error.hpp"
#include "stargraph/oracle.hpp"
#include "stargraph/stats.hpp"

namespace stargraph {

namespace {

std::string num(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// 1 - e^{-x}(1 + x), accurate for small x.
double g1(double x) {
  if (x < 1e-2) {
    const double x2 = x * x;
    return x2 * (0.5 - x / 3.0 + x2 / 8.0 - x2 * x / 30.0 + x2 * x2 / 144.0);
  }
  return -std::expm1(-x) - x * std::exp(-x);
}

// int_a^b e^{-alpha t} (fa + (fb - fa)(t - a)/(b - a)) dt
double segment_integral(double a, double b, double fa, double fb, double alpha) {
  const double h = b - a;
  if (!(h > 0.0)) return 0.0;
  const double x = alpha * h;
  const double i0 = -std::expm1(-x) / alpha;
  const double i1_over_h = g1(x) / (alpha * x);
  return std::exp(-alpha * a) * (fa * i0 + (fb - fa) * i1_over_h);
}

// |diff| below the noise allowance plus a bias bound that may be attained exactly
bool within(double a, double b, double noise, double bias) {
  const double diff = b - a;
  if (diff == 0.0) return true;
  if (bias == 0.0) return std::abs(diff) < noise;
  const double rounding = 1e-13 * (std::abs(a) + std::abs(b));
  return std::abs(diff) <= noise + bias + rounding;
}

}  // namespace

double discounted_integral(const GraphPath& path, const TestFunction& f, double alpha,
                           double t_max) {
  const double end = std::min(path.lifetime, t_max);
  double total = 0.0;
  if (path.size() == 0) return 0.0;
  double fa = f(path.state[0]);
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    const double a = path.times[k];
    if (a >= end) break;
    double b = path.times[k + 1];
    // last alive piece before death keeps its left value
    double fb = path.state[k + 1].is_cemetery() ? fa : f(path.state[k + 1]);
    if (b > end) {
      fb = fa + (fb - fa) * (end - a) / (b - a);
      b = end;
    }
    total += segment_integral(a, b, fa, fb, alpha);
    fa = path.state[k + 1].is_cemetery() ? 0.0 : f(path.state[k + 1]);
  }
  return total;
}

std::vector<McEstimate> mc_resolvent_multi(const GraphPoint& g0, double alpha,
                                           std::span<const TestFunction> fs,
                                           const BoundaryWeights& w, Construction construction,
                                           const McOptions& opts) {
  if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidArgument, "alpha must be positive");
  if (opts.n_paths == 0) throw Error(ErrorCode::InvalidArgument, "n_paths must be positive");
  const double t_max = opts.t_max > 0.0 ? opts.t_max : 12.0 / alpha;
  const std::size_t nf = fs.size();
  const bool bias = opts.estimate_dt_bias && construction == Construction::ItoMcKean;
  const ConstructionOptions copts{opts.eps, opts.bridge_max};
  const RevivalOptions ropts{opts.bridge_max};

  struct PathValues {
    std::vector<double> v;
    std::vector<double> d;
  };
  auto one = [&](std::size_t i) {
    PathStreams st = PathStreams::for_path(opts.seed, i);
    PathValues r;
    r.v.resize(nf);
    if (construction == Construction::ItoMcKean) {
      const auto in = sample_itomckean_inputs(g0, t_max, opts.dt, w, st, copts);
      const double s = st.killing.exponential(1.0);
      const GraphPath fine = apply_stickiness_and_killing_at(
          assemble_itomckean(in.walsh, in.jumps, w.n_edges()), w.p1, w.p3, s);
      for (std::size_t j = 0; j < nf; ++j) r.v[j] = discounted_integral(fine, fs[j], alpha, t_max);
      if (bias) {
        const GraphPath coarse = apply_stickiness_and_killing_at(
            assemble_itomckean(coarsen(in.walsh), in.jumps, w.n_edges()), w.p1, w.p3, s);
        r.d.resize(nf);
        for (std::size_t j = 0; j < nf; ++j)
          r.d[j] = r.v[j] - discounted_integral(coarse, fs[j], alpha, t_max);
      }
    } else {
      const GraphPath p = revival_path(g0, t_max, opts.dt, w, st, ropts);
      for (std::size_t j = 0; j < nf; ++j) r.v[j] = discounted_integral(p, fs[j], alpha, t_max);
    }
    return r;
  };
  const auto values = parallel_map<PathValues>(opts.n_paths, opts.threads, one);

  BoundaryWeights truncated = w;
  const bool cutoff = construction == Construction::ItoMcKean && !w.jump.finite_mass();
  if (cutoff) truncated.jump = w.jump.truncated(opts.eps);

  std::vector<McEstimate> out(nf);
  std::vector<double> col(opts.n_paths);
  for (std::size_t j = 0; j < nf; ++j) {
    for (std::size_t i = 0; i < opts.n_paths; ++i) col[i] = values[i].v[j];
    const auto ms = stats::mean_stderr(col);
    McEstimate& e = out[j];
    e.value = ms.mean;
    e.stderr_ = ms.stderr_;
    e.n_paths = opts.n_paths;
    e.dt = opts.dt;
    e.t_max = t_max;
    e.eps = opts.eps;
    e.truncation_bound = fs[j].bound * std::exp(-alpha * t_max) / alpha;
    if (bias) {
      for (std::size_t i = 0; i < opts.n_paths; ++i) col[i] = values[i].d[j];
      // Richardson estimate assuming an error of order sqrt(dt)
      e.dt_bias = std::abs(stats::mean_stderr(col).mean) / (std::sqrt(2.0) - 1.0);
    }
    if (cutoff)
      e.cutoff_bias = std::abs(oracle::resolvent_full(alpha, fs[j], g0, w) -
                               oracle::resolvent_full(alpha, fs[j], g0, truncated));
  }
  return out;
}

McEstimate mc_resolvent(const GraphPoint& g0, double alpha, const TestFunction& f,
                        const BoundaryWeights& w, Construction construction, const McOptions& opts) {
  return mc_resolvent_multi(g0, alpha, std::span<const TestFunction>(&f, 1), w, construction,
                            opts)
      .front();
}

VerificationRow make_statistical_row(const std::string& name, double oracle, const McEstimate& est,
                                     double z_threshold) {
  VerificationRow r;
  r.name = name;
  r.kind = RowKind::Statistical;
  r.oracle = oracle;
  r.estimate = est.value;
  r.stderr_ = est.stderr_;
  r.tolerance = est.bias_budget();
  const double diff = est.value - oracle;
  r.z = est.stderr_ > 0.0 ? diff / est.stderr_ : (diff == 0.0 ? 0.0 : std::copysign(kInfinity, diff));
  r.pass = within(oracle, est.value, z_threshold * est.stderr_, r.tolerance);
  r.verdict = r.pass ? "PASS" : "FAIL";
  r.note = "n=" + std::to_string(est.n_paths) + " dt=" + num(est.dt) + " bias_budget=" +
           num(r.tolerance);
  return r;
}

VerificationRow make_deterministic_row(const std::string& name, double oracle, double value,
                                       double tolerance) {
  VerificationRow r;
  r.name = name;
  r.kind = RowKind::Deterministic;
  r.oracle = oracle;
  r.estimate = value;
  r.z = value - oracle;
  r.tolerance = tolerance;
  r.pass = std::abs(value - oracle) < tolerance;
  r.verdict = r.pass ? "PASS" : "FAIL";
  return r;
}

VerificationRow make_pvalue_row(const std::string& name, double statistic, double p_value,
                                double significance, std::size_t n, std::size_t min_samples) {
  VerificationRow r;
  r.name = name;
  r.kind = RowKind::Statistical;
  r.oracle = significance;
  r.estimate = statistic;
  r.z = p_value;
  r.tolerance = significance;
  r.note = "n=" + std::to_string(n) + " p=" + num(p_value);
  if (n < min_samples) {
    r.pass = true;
    r.verdict = "INSUFFICIENT_SAMPLES";
    return r;
  }
  r.pass = p_value >= significance;
  r.verdict = r.pass ? "PASS" : "FAIL";
  return r;
}

bool VerificationReport::pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const VerificationRow& r) {
    return r.verdict == "INSUFFICIENT_SAMPLES" || r.pass;
  });
}

std::string VerificationReport::to_json(bool include_runtime) const {
  nlohmann::ordered_json j;
  j["pass"] = pass();
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json o;
    o["name"] = r.name;
    o["kind"] = r.kind == RowKind::Statistical ? "statistical" : "deterministic";
    o["oracle"] = r.oracle;
    o["estimate"] = r.estimate;
    o["stderr"] = r.stderr_;
    o["z"] = r.z;
    o["tolerance"] = r.tolerance;
    o["pass"] = r.pass;
    o["verdict"] = r.verdict;
    o["note"] = r.note;
    j["rows"].push_back(std::move(o));
  }
  if (include_runtime) j["runtime_seconds"] = runtime_seconds;
  return j.dump(2) + "\n";
}

std::string VerificationReport::to_table() const {
  std::string out;
  char line[512];
  std::snprintf(line, sizeof line, "%-44s %16s %16s %12s %10s  %s\n", "test", "oracle", "estimate",
                "stderr", "z/p", "verdict");
  out += line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-44s %16.10g %16.10g %12.4g %10.3g  %s\n", r.name.c_str(),
                  r.oracle, r.estimate, r.stderr_, r.z, r.verdict.c_str());
    out += line;
  }
  std::snprintf(line, sizeof line, "overall: %s (%zu rows)\n", pass() ? "PASS" : "FAIL",
                rows.size());
  out += line;
  return out;
}

VerificationReport compare_mc_oracle(const std::vector<CheckSpec>& specs) {
  const auto t0 = std::chrono::steady_clock::now();
  VerificationReport rep;
  for (const auto& s : specs) {
    const double o = s.oracle();
    if (s.kind == RowKind::Deterministic)
      rep.rows.push_back(make_deterministic_row(s.name, o, s.deterministic(), s.tolerance));
    else
      rep.rows.push_back(make_statistical_row(s.name, o, s.estimator(), s.z_threshold));
  }
  rep.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

VerificationRow joint_law_test(double t, const BoundaryWeights& w, std::size_t n,
                               std::uint64_t seed, double dt, unsigned threads,
                               double significance) {
  const auto q = w.edge_distribution();
  const std::size_t ne = q.size();
  struct Final {
    EdgeId e;
    double r, l;
  };
  const auto finals = parallel_map<Final>(n, threads, [&](std::size_t i) {
    PathStreams st = PathStreams::for_path(seed, i);
    const WalshPath p = sample_walsh(GraphPoint::vertex(), t, dt, q, st);
    return Final{p.edge.back(), p.radius.back(), p.ltime.back()};
  });

  // both marginals are half-normal with variance t; decile cut points
  constexpr std::size_t kBins = 10;
  const boost::math::normal_distribution<> nd;
  std::vector<double> cuts(kBins + 1);
  cuts[0] = 0.0;
  for (std::size_t i = 1; i < kBins; ++i)
    cuts[i] = std::sqrt(t) * boost::math::quantile(nd, 0.5 + 0.5 * static_cast<double>(i) / kBins);
  cuts[kBins] = kInfinity;
  auto bin = [&](double v) {
    const auto it = std::upper_bound(cuts.begin() + 1, cuts.end() - 1, v);
    return static_cast<std::size_t>(it - cuts.begin() - 1);
  };
  std::vector<double> counts(ne * kBins * kBins, 0.0);
  for (const auto& f : finals) counts[(f.e * kBins + bin(f.r)) * kBins + bin(f.l)] += 1.0;
  std::vector<double> probs(counts.size(), 0.0);
  for (EdgeId e = 0; e < ne; ++e)
    for (std::size_t i = 0; i < kBins; ++i)
      for (std::size_t j = 0; j < kBins; ++j) {
        auto S = [&](double x, double y) { return oracle::joint_survival_wl(t, x, y); };
        const double cell = S(cuts[i], cuts[j]) - S(cuts[i + 1], cuts[j]) -
                            S(cuts[i], cuts[j + 1]) + S(cuts[i + 1], cuts[j + 1]);
        probs[(e * kBins + i) * kBins + j] = q[e] * cell;
      }
  const auto chi = stats::chi_square_gof(counts, probs);
  auto row = make_pvalue_row("joint (W,L) law t=" + num(t), chi.stat, chi.p_value, significance, n);
  row.note += " bins=" + std::to_string(chi.bins);
  return row;
}

VerificationRow make_cross_row(const std::string& name, const McEstimate& revival,
                               const McEstimate& itomckean, double z_threshold) {
  VerificationRow r;
  r.name = name;
  r.kind = RowKind::Statistical;
  r.oracle = revival.value;
  r.estimate = itomckean.value;
  r.stderr_ = std::hypot(revival.stderr_, itomckean.stderr_);
  r.tolerance = revival.bias_budget() + itomckean.bias_budget();
  const double diff = itomckean.value - revival.value;
  r.z = r.stderr_ > 0.0 ? diff / r.stderr_ : (diff == 0.0 ? 0.0 : std::copysign(kInfinity, diff));
  r.pass = within(revival.value, itomckean.value, z_threshold * r.stderr_, r.tolerance);
  r.verdict = r.pass ? "PASS" : "FAIL";
  r.note = "revival=" + num(revival.value) + "+-" + num(revival.stderr_) +
           " itomckean=" + num(itomckean.value) + "+-" + num(itomckean.stderr_) +
           " bias_budget=" + num(r.tolerance);
  return r;
}

VerificationRow cross_construction_test(const BoundaryWeights& w, const GraphPoint& g0,
                                        double alpha, const TestFunction& f,
                                        const McOptions& opts) {
  McOptions o = opts;
  o.estimate_dt_bias = false;
  const McEstimate rv = mc_resolvent(g0, alpha, f, w, Construction::Revival, o);
  o.estimate_dt_bias = true;
  const McEstimate im = mc_resolvent(g0, alpha, f, w, Construction::ItoMcKean, o);
  return make_cross_row("cross-construction " + f.name, rv, im);
}

std::vector<VerificationRow> passage_time_suite(std::span<const double> alphas,
                                                std::span<const double> xs, std::size_t n,
                                                double dt, std::uint64_t seed, unsigned threads) {
  if (alphas.empty()) return {};
  const double a_min = *std::min_element(alphas.begin(), alphas.end());
  const double T = 12.0 / a_min;
  std::vector<VerificationRow> rows;
  for (std::size_t xi = 0; xi < xs.size(); ++xi) {
    const double x = xs[xi];
    const auto hits = parallel_map<double>(n, threads, [&](std::size_t i) {
      Rng rng(seed, (static_cast<std::uint64_t>(xi) << 40) | i, Substream::Radius);
      return sample_first_hit(x, T, dt, rng);
    });
    for (double a : alphas) {
      std::vector<double> v(n);
      for (std::size_t i = 0; i < n; ++i) v[i] = std::isfinite(hits[i]) ? std::exp(-a * hits[i]) : 0.0;
      const auto ms = stats::mean_stderr(v);
      McEstimate est;
      est.value = ms.mean;
      est.stderr_ = ms.stderr_;
      est.n_paths = n;
      est.dt = dt;
      est.t_max = T;
      est.truncation_bound = std::exp(-a * T);
      rows.push_back(make_statistical_row("passage alpha=" + num(a) + " x=" + num(x),
                                          oracle::passage_laplace(a, x), est));
    }
  }
  return rows;
}

}  // namespace stargraph

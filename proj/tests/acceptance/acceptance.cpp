// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "../support/jumpset_oracle.hpp"
#include "stargraph/config.hpp"
#include "stargraph/construct.hpp"
#include "stargraph/harness.hpp"
#include "stargraph/jumpset.hpp"
#include "stargraph/oracle.hpp"
#include "stargraph/stats.hpp"

using namespace stargraph;

namespace {

bool verbose = false;

void detail(const std::string& s) {
  if (verbose) std::printf("    %s\n", s.c_str());
}

void detail_rows(const std::vector<VerificationRow>& rows) {
  if (!verbose) return;
  VerificationReport r;
  r.rows = rows;
  std::istringstream in(r.to_table());
  for (std::string line; std::getline(in, line);) detail(line);
}

BoundaryWeights weights(double p1, std::vector<double> p2, double p3, JumpMeasureSpec j = {}) {
  BoundaryWeights w;
  w.p1 = p1;
  w.p2 = std::move(p2);
  w.p3 = p3;
  w.jump = std::move(j);
  return w;
}

// the three weight sets of the flagship resolvent test
std::vector<BoundaryWeights> flagship_panel() {
  return {weights(0, {.5, .5}, 0, JumpMeasureSpec::atoms({{0, 1, 1}})),
          weights(0.1, {.3, .2}, 0.1, JumpMeasureSpec::atoms({{0, 1, .5}, {1, 2, .5}})),
          weights(0, {.2, .2}, 0, JumpMeasureSpec::density({{0, EdgeTail{PowerTail{1, .5}}}}))};
}

// flagship panel plus an exponential tail with stickiness and a plain elastic case
std::vector<BoundaryWeights> full_panel() {
  auto p = flagship_panel();
  p.push_back(weights(0.4, {0, 0}, 0.3, JumpMeasureSpec::density({{1, EdgeTail{ExpTail{2, 1.5}}}})));
  p.push_back(weights(0.2, {1, 0}, 0));
  return p;
}

std::vector<TestFunction> flagship_functions() {
  return {functions::constant(1), functions::edge_indicator(0, "a"), functions::exp_bump(0, 1.0, "a")};
}

std::vector<TestFunction> catalog() {
  return {functions::constant(1), functions::edge_indicator(0, "a"), functions::exp_bump(0, 1.0, "a"),
          functions::edge_indicator(1, "b"),
          functions::product({functions::constant(0.5), functions::exp_bump(1, 2.0, "b")})};
}

std::string fmt(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3g", v);
  return b;
}

struct Outcome {
  bool pass = false;
  std::string summary;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& ex) {
    o = {false, std::string("exception: ") + ex.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s criterion %d: %s (%s; %.1fs)\n", o.pass ? "PASS" : "FAIL", id, title.c_str(),
              o.summary.c_str(), secs);
  std::fflush(stdout);
}

Outcome rows_outcome(const std::vector<VerificationRow>& rows) {
  detail_rows(rows);
  std::size_t bad = 0;
  double worst = 0.0;
  for (const auto& r : rows) {
    bad += !r.pass;
    // a path-independent estimate has a stderr at rounding level and a meaningless z
    const bool degenerate = r.stderr_ <= 1e-12 * (1.0 + std::abs(r.oracle));
    if (r.kind == RowKind::Statistical && !degenerate) worst = std::max(worst, std::abs(r.z));
  }
  return {bad == 0, std::to_string(rows.size() - bad) + "/" + std::to_string(rows.size()) +
                        " rows pass, max |z| " + fmt(worst)};
}

// per weight set of the flagship panel, one estimate per flagship function
std::vector<std::vector<McEstimate>> flagship_estimates;

McOptions flagship_options() {
  McOptions o;
  o.n_paths = 20000;
  o.dt = 1e-3;
  o.t_max = 12.0;
  o.eps = 1e-4;
  o.seed = 31;
  o.threads = 1;
  o.estimate_dt_bias = true;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance suite"};
  std::string default_config = STARGRAPH_SOURCE_DIR "/configs/default.json";
  app.add_flag("-v,--verbose", verbose, "print the rows behind every criterion");
  app.add_option("--config", default_config, "configuration used for the determinism check");
  CLI11_PARSE(app, argc, argv);

  report(1, "passage-time law", [] {
    const std::vector<double> alphas{0.5, 1, 2}, xs{0.5, 1, 2};
    return rows_outcome(passage_time_suite(alphas, xs, 100000, 1e-3, 101, 1));
  });

  report(2, "joint (W,L) law", [] {
    const auto row = joint_law_test(1.0, weights(0, {.6, .4}, 0), 100000, 102, 1e-3, 1, 1e-3);
    detail_rows({row});
    return Outcome{row.verdict == "PASS", "chi2 " + fmt(row.estimate) + ", " + row.note};
  });

  report(3, "flagship Ito-McKean resolvent", [] {
    std::vector<VerificationRow> rows;
    const auto fs = flagship_functions();
    const auto panel = flagship_panel();
    for (std::size_t i = 0; i < panel.size(); ++i) {
      const auto est = mc_resolvent_multi(GraphPoint::vertex(), 1.0, fs, panel[i],
                                          Construction::ItoMcKean, flagship_options());
      flagship_estimates.push_back(est);
      for (std::size_t j = 0; j < fs.size(); ++j)
        rows.push_back(make_statistical_row("w" + std::to_string(i) + " " + fs[j].name,
                                            oracle::resolvent_vertex_full(1.0, fs[j], panel[i]),
                                            est[j]));
    }
    return rows_outcome(rows);
  });

  report(4, "conservativity", [] {
    std::vector<VerificationRow> rows;
    for (const double a : {0.5, 1.0, 2.0}) {
      for (auto w : full_panel()) {
        w.p1 = 0.0;
        rows.push_back(make_deterministic_row(
            "algebraic alpha=" + fmt(a), 1.0 / a,
            oracle::resolvent_vertex_full(a, functions::constant(1), w), 1e-12));
      }
    }
    // Monte Carlo: the p1 = 0 entries of the flagship panel, f = 1
    const auto panel = flagship_panel();
    for (std::size_t i = 0; i < panel.size() && i < flagship_estimates.size(); ++i)
      if (panel[i].p1 == 0.0)
        rows.push_back(make_statistical_row("mc w" + std::to_string(i), 1.0, flagship_estimates[i][0]));
    if (flagship_estimates.size() != panel.size()) return Outcome{false, "flagship estimates missing"};
    return rows_outcome(rows);
  });

  report(5, "boundary residual", [] {
    std::vector<VerificationRow> rows;
    const auto panel = full_panel();
    for (std::size_t i = 0; i < panel.size(); ++i)
      for (const auto& f : catalog())
        rows.push_back(make_deterministic_row("w" + std::to_string(i) + " " + f.name, 0.0,
                                              oracle::boundary_residual(1.0, f, panel[i]), 1e-8));
    auto o = rows_outcome(rows);
    double worst = 0.0;
    for (const auto& r : rows) worst = std::max(worst, std::abs(r.estimate));
    o.summary += ", max residual " + fmt(worst);
    return o;
  });

  report(6, "resolvent equation", [] {
    std::vector<VerificationRow> rows;
    const double a = 1.0, b = 2.0;
    const auto panel = full_panel();
    for (std::size_t i = 0; i < panel.size(); ++i)
      for (const auto& f : catalog()) {
        const auto& w = panel[i];
        const double lhs = oracle::resolvent_vertex_full(a, f, w) - oracle::resolvent_vertex_full(b, f, w);
        const double nested = oracle::resolvent_vertex_full(a, oracle::resolvent_as_function(b, f, w), w);
        rows.push_back(make_deterministic_row("w" + std::to_string(i) + " " + f.name, 0.0,
                                              lhs + (a - b) * nested, 1e-6));
      }
    auto o = rows_outcome(rows);
    double worst = 0.0;
    for (const auto& r : rows) worst = std::max(worst, std::abs(r.estimate));
    o.summary += ", max defect " + fmt(worst);
    return o;
  });

  report(7, "cross-construction equivalence", [] {
    std::vector<VerificationRow> rows;
    const auto fs = flagship_functions();
    const auto panel = flagship_panel();
    if (flagship_estimates.size() != panel.size()) return Outcome{false, "flagship estimates missing"};
    for (std::size_t i = 0; i < panel.size(); ++i) {
      if (!panel[i].jump.finite_mass()) continue;
      McOptions o = flagship_options();
      o.estimate_dt_bias = false;
      const auto rv = mc_resolvent_multi(GraphPoint::vertex(), 1.0, fs, panel[i],
                                         Construction::Revival, o);
      for (std::size_t j = 0; j < fs.size(); ++j)
        rows.push_back(make_cross_row("w" + std::to_string(i) + " " + fs[j].name, rv[j],
                                      flagship_estimates[i][j]));
    }
    return rows_outcome(rows);
  });

  report(8, "pseudo-inverse algebra", [] {
    Rng rng(108, 0);
    std::size_t violations = 0, grid_checked = 0, grid_bad = 0;
    const std::size_t n = 100000;
    auto near = [](double x, double y, double scale) { return std::abs(x - y) <= 1e-12 * (1.0 + scale); };
    for (std::size_t k = 0; k < n; ++k) {
      const auto J = testsupport::random_jumpset(rng, 3, false);
      const double H = J.horizon();
      const double top = J.p_eval(H);
      const double t = H * rng.uniform();
      const double u = top * rng.uniform();
      bool ok = true;
      // P^{-1} P(t) = P^{-1}(P(t-)) = t
      ok = ok && near(J.p_inverse(J.p_eval(t)), t, H);
      ok = ok && near(J.p_inverse(J.p_left(t)), t, H);
      // at an event time as well
      if (!J.events().empty()) {
        const auto& ev = J.events()[static_cast<std::size_t>(rng.uniform() * J.events().size())];
        if (ev.time < H) {
          ok = ok && near(J.p_inverse(J.p_eval(ev.time)), ev.time, H);
          ok = ok && near(J.p_inverse(J.p_left(ev.time)), ev.time, H);
        }
      }
      // duality: P^{-1}(u) < t implies P(t) > u implies P^{-1}(u) <= t
      const double s = J.p_inverse(u);
      const double tol = 1e-12 * (1.0 + top);
      if (s < t - 1e-12 * (1.0 + H)) ok = ok && J.p_eval(t) > u - tol;
      if (J.p_eval(t) > u + tol) ok = ok && s <= t + 1e-12 * (1.0 + H);
      ok = ok && J.p_eval(s) >= u - tol && J.p_left(s) <= u + tol;
      // flat intervals correspond to jumps
      const auto fi = J.flat_intervals();
      ok = ok && fi.size() == J.events().size();
      const auto loc = J.locate(u);
      std::optional<std::size_t> inside;
      for (std::size_t i = 0; i < fi.size(); ++i) {
        ok = ok && fi[i].t_jump == J.events()[i].time && fi[i].edge == J.events()[i].edge &&
             near(fi[i].lplus - fi[i].lminus, J.events()[i].height, top);
        if (u >= fi[i].lminus && u < fi[i].lplus) inside = i;
      }
      ok = ok && loc.jump == inside;
      if (inside) ok = ok && loc.s == fi[*inside].t_jump;
      else ok = ok && near(J.p_eval(loc.s), u, top);
      violations += !ok;
      // brute-force grid oracle
      const double g = testsupport::grid_inverse(J, u);
      if (g >= 0.0) {
        ++grid_checked;
        const double d = g - s;
        grid_bad += !(d >= -1e-12 && d <= 1e-6 + 1e-12);
      }
    }
    return Outcome{violations == 0 && grid_bad == 0 && grid_checked > n * 9 / 10,
                   std::to_string(n) + " checks, " + std::to_string(violations) + " violations; grid " +
                       std::to_string(grid_checked) + " checks, " + std::to_string(grid_bad) +
                       " off by more than one step"};
  });

  report(9, "eta exclusivity", [] {
    Rng rng(109, 0);
    const std::size_t n = 100000, edges = 3;
    std::size_t violations = 0, evaluated = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const auto J = testsupport::random_jumpset(rng, edges, k % 2 == 0);
      const double l = J.p_eval(J.horizon()) * rng.uniform();
      if (!(l < J.p_eval(J.horizon()))) continue;  // P identically 0
      ++evaluated;
      const double s = J.p_inverse(l);
      // eta^e = P_e(P^{-1}(l)) - l from the definition
      std::size_t positive = 0;
      for (EdgeId e = 0; e < edges; ++e) positive += J.p_e_eval(e, s) - l > 1e-12 * (1.0 + l);
      const auto v = eta(J, l, edges);
      std::size_t positive_lib = 0;
      for (double x : v.per_edge) positive_lib += x > 0.0;
      violations += positive > 1 || positive_lib > 1 || positive != positive_lib;
    }
    return Outcome{violations == 0 && evaluated > n * 9 / 10, std::to_string(evaluated) + " evaluations, " +
                                        std::to_string(violations) + " violations"};
  });

  report(10, "stickiness and killing laws", [] {
    // p1 L^X at death ~ Exp(1)
    const auto w = weights(1.0, {1e-4, 1e-4}, 0.1, JumpMeasureSpec::atoms({{0, 1e-3, 0.2}}));
    std::vector<double> levels;
    for (std::uint64_t i = 0; i < 10000; ++i) {
      PathStreams st = PathStreams::for_path(110, i);
      const auto x = itomckean_full_path(GraphPoint::vertex(), 1.0, 1e-3, w, st);
      if (std::isfinite(x.lifetime)) levels.push_back(w.p1 * x.ltime.back());
    }
    const double d = stats::ks_statistic(levels, [](double v) { return -std::expm1(-v); });
    const double p_ks = stats::ks_pvalue(d, levels.size());
    const bool ks_ok = levels.size() > 9980 && p_ks >= 1e-3;

    // revival count ~ Geometric(p1 / (p1 + |p4|))
    const auto wr = weights(1.0, {0.05}, 0, JumpMeasureSpec::atoms({{0, 0.05, 1.0}}));
    const double success = wr.p1 / (wr.p1 + wr.jump.total_mass());
    constexpr std::size_t kCells = 10;
    std::vector<double> counts(kCells + 1, 0.0);
    std::size_t censored = 0;
    for (std::uint64_t i = 0; i < 10000; ++i) {
      PathStreams st = PathStreams::for_path(111, i);
      const auto x = revival_path(GraphPoint::vertex(), 400.0, 0.01, wr, st);
      if (!std::isfinite(x.lifetime)) {
        ++censored;
        continue;
      }
      counts[std::min(x.meta.revivals, kCells)] += 1.0;
    }
    std::vector<double> probs(kCells + 1);
    for (std::size_t k = 0; k < kCells; ++k) probs[k] = std::pow(1 - success, double(k)) * success;
    probs[kCells] = std::pow(1 - success, double(kCells));
    const auto chi = stats::chi_square_gof(counts, probs);
    const bool geo_ok = censored < 100 && chi.p_value >= 1e-3;
    return Outcome{ks_ok && geo_ok, "KS n=" + std::to_string(levels.size()) + " p=" + fmt(p_ks) +
                                        "; geometric chi2 p=" + fmt(chi.p_value) + " censored=" +
                                        std::to_string(censored)};
  });

  report(11, "determinism of verify", [&] {
    std::ifstream in(default_config);
    if (!in) return Outcome{false, "cannot open " + default_config};
    std::stringstream buf;
    buf << in.rdbuf();
    auto doc = nlohmann::json::parse(buf.str());
    doc["task"] = "verify";
    doc["numerics"]["threads"] = 1;
    const RunConfig c = parse_config(doc);
    const std::string a = run_verify_panel(c).to_json();
    const std::string b = run_verify_panel(c).to_json();
    return Outcome{a == b, std::to_string(a.size()) + " bytes, " + (a == b ? "identical" : "differ")};
  });

  std::printf("summary: %d of 11 criteria failed\n", failures);
  return failures ? 1 : 0;
}

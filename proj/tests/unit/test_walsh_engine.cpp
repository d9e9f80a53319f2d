#include <doctest.h>

#include <cmath>
#include <numbers>

#include "../support/check.hpp"
#include "../support/gauss.hpp"
#include "stargraph/oracle.hpp"
#include "stargraph/rng.hpp"
#include "stargraph/stats.hpp"
#include "stargraph/test_function.hpp"
#include "stargraph/walsh.hpp"

using namespace stargraph;
using doctest::Approx;

namespace {

struct Moments {
  double sum = 0, sum2 = 0;
  std::size_t n = 0;
  void add(double v) {
    sum += v;
    sum2 += v * v;
    ++n;
  }
  double mean() const { return sum / n; }
  double se() const { return std::sqrt((sum2 / n - mean() * mean()) / (n - 1)); }
};

double vertex_occupation(const WalshPath& p) {
  double t = 0.0;
  for (std::size_t k = 0; k + 1 < p.size(); ++k)
    if (p.radius[k] < 1e-6 && p.radius[k + 1] < 1e-6) t += p.times[k + 1] - p.times[k];
  return t;
}

const std::vector<double> kHalf{0.5, 0.5};

}  // namespace

TEST_SUITE("walsh_engine") {
  TEST_CASE("grid") {
    CHECK(grid_steps(1.0, 0.3) == 4);
    CHECK(grid_steps(1.0, 1e-3) == 1000);
    CHECK(grid_time(4, 4, 1.0, 0.3) == 1.0);
    CHECK(grid_time(2, 4, 1.0, 0.3) == Approx(0.6));
    CHECK_ERROR_CODE(grid_steps(1.0, 2.0), ErrorCode::BadStep);
    CHECK_ERROR_CODE(grid_steps(1.0, 0.0), ErrorCode::BadStep);
    CHECK_ERROR_CODE(grid_steps(NAN, 0.1), ErrorCode::BadStep);
  }

  TEST_CASE("far start: free Brownian motion and no local time") {
    for (std::uint64_t i = 0; i < 200; ++i) {
      Rng rng(11, i, Substream::Radius), copy(11, i, Substream::Radius);
      const auto s = sample_reflecting_with_local_time(5.0, 1.0, 0.01, rng);
      double b = -5.0;
      for (std::size_t k = 1; k < s.radius.size(); ++k) {
        b = b + std::sqrt(0.01) * copy.normal();
        if (s.ltime.back() == 0.0) CHECK(s.radius[k] == Approx(-b).epsilon(1e-12));
      }
      CHECK(s.ltime.back() == 0.0);
    }
  }

  TEST_CASE("local time and radius invariants") {
    for (std::uint64_t i = 0; i < 50; ++i) {
      Rng rng(12, i, Substream::Radius);
      const auto s = sample_reflecting_with_local_time(0.3, 2.0, 1e-3, rng, i % 2 == 0);
      for (std::size_t k = 1; k < s.radius.size(); ++k) {
        CHECK(s.radius[k] >= 0.0);
        CHECK(s.ltime[k] >= s.ltime[k - 1]);
      }
    }
  }

  TEST_CASE("mean local time at t = 1 from the vertex") {
    Moments m;
    for (std::uint64_t i = 0; i < 100000; ++i) {
      Rng rng(13, i, Substream::Radius);
      m.add(sample_reflecting_with_local_time(0.0, 1.0, 1e-3, rng).ltime.back());
    }
    CHECK(std::abs(m.mean() - std::sqrt(2.0 / std::numbers::pi)) < 3 * m.se());
  }

  TEST_CASE("joint law of radius and local time at t = 1") {
    constexpr int kBins = 10;
    const std::size_t n = 40000;
    // cut points: deciles of the half-normal marginal
    std::vector<double> cuts{0.0, 0.1257, 0.2533, 0.3853, 0.5244, 0.6745, 0.8416, 1.0364,
                             1.2816, 1.6449, 12.0};
    std::vector<double> counts(kBins * kBins, 0.0);
    auto bin = [&](double v) {
      int b = 0;
      while (b + 1 < kBins && v >= cuts[b + 1]) ++b;
      return b;
    };
    for (std::uint64_t i = 0; i < n; ++i) {
      Rng rng(14, i, Substream::Radius);
      const auto s = sample_reflecting_with_local_time(0.0, 1.0, 1e-3, rng);
      counts[bin(s.radius.back()) * kBins + bin(s.ltime.back())] += 1.0;
    }
    std::vector<double> probs(kBins * kBins);
    auto density = [](double x, double y) {
      return 2.0 * (x + y) / std::sqrt(2.0 * std::numbers::pi) * std::exp(-0.5 * (x + y) * (x + y));
    };
    double total = 0.0;
    for (int i = 0; i < kBins; ++i)
      for (int j = 0; j < kBins; ++j) {
        probs[i * kBins + j] = testsupport::gauss_legendre(
            [&](double x) {
              return testsupport::gauss_legendre([&](double y) { return density(x, y); }, cuts[j],
                                                 cuts[j + 1], 20);
            },
            cuts[i], cuts[i + 1], 20);
        total += probs[i * kBins + j];
      }
    CHECK(total == Approx(1.0).epsilon(1e-9));
    for (auto& p : probs) p /= total;
    const auto chi = stats::chi_square_gof(counts, probs);
    CHECK(chi.p_value > 1e-3);
  }

  TEST_CASE("a far start keeps its edge") {
    for (std::uint64_t i = 0; i < 500; ++i) {
      PathStreams st = PathStreams::for_path(15, i);
      const auto w = sample_walsh(GraphPoint::on_edge(0, 10.0), 0.01, 1e-4, kHalf, st);
      for (EdgeId e : w.edge) CHECK(e == 0);
    }
  }

  TEST_CASE("edge marginal and semigroup at t = 1") {
    const std::vector<double> q{0.3, 0.7};
    BoundaryWeights w;
    w.p2 = q;
    const auto f = functions::edge_indicator(0);
    const double oracle = oracle::walsh_semigroup(1.0, f, GraphPoint::vertex(), w);
    CHECK(oracle == Approx(0.3).epsilon(1e-9));
    Moments m;
    for (std::uint64_t i = 0; i < 20000; ++i) {
      PathStreams st = PathStreams::for_path(16, i);
      const auto p = sample_walsh(GraphPoint::vertex(), 1.0, 1e-3, q, st);
      m.add(f(p.state(p.size() - 1)));
    }
    CHECK(std::abs(m.mean() - oracle) < 3 * m.se());
  }

  TEST_CASE("edge labels are resampled only when the local time moves") {
    for (std::uint64_t i = 0; i < 100; ++i) {
      PathStreams st = PathStreams::for_path(17, i);
      const auto p = sample_walsh(GraphPoint::on_edge(1, 0.2), 1.0, 1e-3, kHalf, st);
      for (std::size_t k = 1; k < p.size(); ++k)
        if (p.ltime[k] == p.ltime[k - 1]) CHECK(p.edge[k] == p.edge[k - 1]);
    }
  }

  TEST_CASE("coarsen keeps every other node and the final node") {
    PathStreams st = PathStreams::for_path(18, 0);
    const auto fine = sample_walsh(GraphPoint::vertex(), 1.0, 0.3, kHalf, st);
    const auto c = coarsen(fine);
    REQUIRE(fine.size() == 5);
    REQUIRE(c.size() == 3);
    CHECK(c.times[1] == fine.times[2]);
    CHECK(c.times[2] == 1.0);
    CHECK(c.ltime[2] == fine.ltime[4]);
  }

  TEST_CASE("sticky time change") {
    for (std::uint64_t i = 0; i < 200; ++i) {
      PathStreams st = PathStreams::for_path(19, i);
      const auto p = sample_walsh(GraphPoint::on_edge(0, 0.05), 1.0, 1e-3, kHalf, st);
      const auto same = sticky_time_change(p, 0.0);
      CHECK(same.times == p.times);
      CHECK(same.radius == p.radius);
      const auto s = sticky_time_change(p, 0.5);
      CHECK(s.duration() == Approx(1.0 + 0.5 * p.ltime.back()).epsilon(1e-12));
      CHECK(s.duration() >= p.duration());
      CHECK((s.duration() == p.duration()) == (p.ltime.back() == 0.0));
      for (std::size_t k = 1; k < s.size(); ++k) CHECK(s.times[k] >= s.times[k - 1]);
      if (p.ltime.back() > 0.0) CHECK(vertex_occupation(s) > vertex_occupation(p));
    }
  }

  TEST_CASE("sticky occupation fraction grows on average") {
    Moments base, sticky;
    for (std::uint64_t i = 0; i < 10000; ++i) {
      PathStreams st = PathStreams::for_path(20, i);
      const auto p = sample_walsh(GraphPoint::vertex(), 0.5, 1e-3, kHalf, st);
      const auto s = sticky_time_change(p, 1.0);
      base.add(vertex_occupation(p) / p.duration());
      sticky.add(vertex_occupation(s) / s.duration());
    }
    CHECK(sticky.mean() > base.mean() + 3 * sticky.se());
  }

  TEST_CASE("elastic killing") {
    PathStreams st = PathStreams::for_path(21, 0);
    const auto p = sample_walsh(GraphPoint::vertex(), 1.0, 1e-3, kHalf, st);
    Rng r(1, 1);
    const auto none = elastic_kill(p, 0.0, r);
    CHECK(std::isinf(none.lifetime));
    CHECK(none.path.times == p.times);
    const auto k = elastic_kill_at_level(p, 0.5 * p.ltime.back());
    REQUIRE(std::isfinite(k.lifetime));
    CHECK(k.path.ltime.back() == 0.5 * p.ltime.back());
    CHECK(k.path.times.back() == k.lifetime);
  }

  TEST_CASE("elastic killing is monotone in beta under a shared level") {
    for (std::uint64_t i = 0; i < 200; ++i) {
      PathStreams st = PathStreams::for_path(22, i);
      const auto p = sample_walsh(GraphPoint::vertex(), 1.0, 1e-3, kHalf, st);
      double prev = kInfinity;
      for (double beta : {0.5, 1.0, 2.0, 4.0}) {
        Rng r(5, i);
        const double z = elastic_kill(p, beta, r).lifetime;
        CHECK(z <= prev);
        prev = z;
      }
    }
  }

  TEST_CASE("elastic lifetime Laplace transform") {
    // E_0 e^{-alpha zeta} = beta / (beta + sqrt(2 alpha)) with beta = alpha = 1
    Moments m;
    for (std::uint64_t i = 0; i < 10000; ++i) {
      PathStreams st = PathStreams::for_path(23, i);
      const auto p = sample_walsh(GraphPoint::vertex(), 12.0, 1e-3, kHalf, st);
      const auto k = elastic_kill(p, 1.0, st.killing);
      m.add(std::isfinite(k.lifetime) ? std::exp(-k.lifetime) : 0.0);
    }
    const double oracle = 1.0 / (1.0 + std::sqrt(2.0));
    CHECK(std::abs(m.mean() - oracle) < 3 * m.se() + std::exp(-12.0));
  }

  TEST_CASE("first hit of the vertex") {
    PathStreams st = PathStreams::for_path(24, 0);
    CHECK(first_hit_vertex(sample_walsh(GraphPoint::vertex(), 1.0, 1e-3, kHalf, st)) == 0.0);
    Rng r(1, 0);
    CHECK(sample_first_hit(0.0, 1.0, 1e-3, r) == 0.0);
    Moments m;
    for (std::uint64_t i = 0; i < 100000; ++i) {
      Rng rng(25, i, Substream::Radius);
      const double h = sample_first_hit(1.0, 12.0, 1e-3, rng);
      m.add(std::isfinite(h) ? std::exp(-h) : 0.0);
    }
    CHECK(std::exp(-std::sqrt(2.0)) == Approx(0.24312).epsilon(1e-4));
    CHECK(std::abs(m.mean() - oracle::passage_laplace(1.0, 1.0)) < 3 * m.se() + std::exp(-12.0));
  }

  TEST_CASE("first hit agrees with the path-based hit time in law") {
    Moments stream, path;
    for (std::uint64_t i = 0; i < 4000; ++i) {
      Rng rng(26, i, Substream::Radius);
      const double h = sample_first_hit(0.5, 4.0, 1e-3, rng);
      stream.add(std::isfinite(h) ? std::exp(-h) : 0.0);
      PathStreams st = PathStreams::for_path(27, i);
      const double g = first_hit_vertex(sample_walsh(GraphPoint::on_edge(0, 0.5), 4.0, 1e-3, kHalf, st));
      path.add(std::isfinite(g) ? std::exp(-g) : 0.0);
    }
    CHECK(std::abs(stream.mean() - path.mean()) < 3 * std::hypot(stream.se(), path.se()));
  }

  TEST_CASE("halving dt moves the passage estimate monotonically toward the oracle") {
    // Coarse grids are derived from the fine path, so the coarse hit time is the
    // fine one rounded up to the coarse grid.
    const int levels = 4;
    std::vector<Moments> m(levels);
    for (std::uint64_t i = 0; i < 3000; ++i) {
      PathStreams st = PathStreams::for_path(28, i);
      auto p = sample_walsh(GraphPoint::on_edge(0, 1.0), 12.0, 1e-3, kHalf, st);
      for (int l = 0; l < levels; ++l) {
        const double h = first_hit_vertex(p);
        m[l].add(std::isfinite(h) ? std::exp(-h) : 0.0);
        p = coarsen(p);
      }
    }
    const double oracle = oracle::passage_laplace(1.0, 1.0);
    for (int l = 0; l + 1 < levels; ++l) {
      CHECK(m[l].mean() > m[l + 1].mean());
      const bool closer = std::abs(m[l].mean() - oracle) < std::abs(m[l + 1].mean() - oracle);
      CHECK((closer || std::abs(m[l].mean() - oracle) < 3 * m[l].se()));
    }
    CHECK(std::abs(m[0].mean() - oracle) < 3 * m[0].se() + 1e-3 * oracle);
  }
}

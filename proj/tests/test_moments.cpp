#include <doctest.h>

#include <bit>
#include <cmath>
#include <vector>

#include "trinorm/errors.hpp"
#include "trinorm/graph.hpp"
#include "trinorm/moments.hpp"

using namespace trinorm;

namespace {

// Mean and variance of T by summing over all 2^C(n,2) graphs.
std::pair<double, double> brute_moments(int n, double p) {
  const int e = static_cast<int>(num_edges(n));
  double m1 = 0.0, m2 = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << e); ++mask) {
    const int k = std::popcount(mask);
    const double w = std::pow(p, k) * std::pow(1.0 - p, e - k);
    const double t = static_cast<double>(triangle_count(Graph::from_mask(n, mask)));
    m1 += w * t;
    m2 += w * t * t;
  }
  return {m1, m2 - m1 * m1};
}

// Literal proxy: pair bits for the C(n,2) pairs, triple bits Be(p^2), Y sums
// I_{ab} I_{abc} over a < b < c.
std::pair<double, double> brute_proxy(int n, double p) {
  const auto triples = all_triples(n);
  const int ne = static_cast<int>(num_edges(n));
  const int nt = static_cast<int>(triples.size());
  const double q = p * p;
  double m1 = 0.0, m2 = 0.0;
  for (std::uint64_t pm = 0; pm < (std::uint64_t{1} << ne); ++pm) {
    const double wp = std::pow(p, std::popcount(pm)) * std::pow(1.0 - p, ne - std::popcount(pm));
    for (std::uint64_t tm = 0; tm < (std::uint64_t{1} << nt); ++tm) {
      const double w = wp * std::pow(q, std::popcount(tm)) * std::pow(1.0 - q, nt - std::popcount(tm));
      double y = 0.0;
      for (int k = 0; k < nt; ++k) {
        const auto& t = triples[k];
        const auto r = edge_rank(EdgeId::of(t.v[0], t.v[1]), n);
        y += ((pm >> r) & 1u) * ((tm >> k) & 1u);
      }
      m1 += w * y;
      m2 += w * y * y;
    }
  }
  return {m1, m2 - m1 * m1};
}

// E|I sum_k J_k - (n-2) p^3|^3 by enumerating I and the n-2 bits J_k ~ Be(p^2).
double brute_gamma(int n, double p) {
  const int k = n - 2;
  const double q = p * p;
  const double center = k * p * p * p;
  double g = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << k); ++m) {
      const int s = std::popcount(m);
      const double w = (i ? p : 1.0 - p) * std::pow(q, s) * std::pow(1.0 - q, k - s);
      g += w * std::pow(std::abs(i * s - center), 3);
    }
  }
  return g;
}

}  // namespace

TEST_SUITE("moments") {
  TEST_CASE("examples") {
    const auto r4 = exact_moments(4, 0.5);
    CHECK(r4.var_T == doctest::Approx(0.625).epsilon(1e-15));
    CHECK(r4.mean_T == doctest::Approx(0.5).epsilon(1e-15));
    for (double p : {0.1, 0.5, 0.9}) {
      CHECK(exact_moments(3, p).var_T == doctest::Approx(p * p * p * (1 - p * p * p)).epsilon(1e-14));
    }
    CHECK_THROWS_AS(exact_moments(5, 0.0), InputError);
    CHECK_THROWS_AS(exact_moments(5, 1.0), InputError);
  }

  TEST_CASE("moments agree with enumeration") {
    for (int n : {3, 4, 5, 6}) {
      for (int k = 1; k <= 9; ++k) {
        const double p = 0.1 * k;
        const auto [mean, var] = brute_moments(n, p);
        const auto r = exact_moments(n, p);
        CHECK(std::abs(r.mean_T - mean) < 1e-10);
        CHECK(std::abs(r.var_T - var) < 1e-10);
        // C(n,3) Var X + C(n,3) 3(n-3) Cov_2 decomposition
        const double tri = static_cast<double>(num_triples(n));
        CHECK(r.var_T == doctest::Approx(tri * (r.var_X + 3.0 * (n - 3) * r.cov_overlap2)).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("regimes and rates") {
    const auto sparse = regime_rates(100, 0.05);
    CHECK(sparse.regime == Regime::Sparse);
    CHECK(sparse.thm1_rate == doctest::Approx(std::pow(5.0, -1.5)).epsilon(1e-12));
    CHECK(sparse.thm1_rate == doctest::Approx(0.0894427191).epsilon(1e-9));
    const auto dense = regime_rates(100, 0.7);
    CHECK(dense.regime == Regime::Dense);
    CHECK(dense.thm1_rate == doctest::Approx(0.0182574186).epsilon(1e-9));
    CHECK(classify_regime(100, 0.2) == Regime::Middle);
    CHECK(classify_regime(100, 0.5) == Regime::Middle);
    CHECK(classify_regime(100, 0.1) == Regime::Sparse);
    CHECK(to_string(Regime::Middle) == "middle");
    // blows up at both ends
    CHECK(regime_rates(100, 1 - 1e-10).thm1_rate > 1e2);
    CHECK(regime_rates(10000, 1e-4).thm1_rate == doctest::Approx(1.0));
    // continuous inside a regime
    const double a = regime_rates(200, 0.3).thm1_rate, b = regime_rates(200, 0.3 + 1e-9).thm1_rate;
    CHECK(std::abs(a - b) < 1e-8);
  }

  TEST_CASE("dk from dw") {
    CHECK(dk_from_dw(0.0) == 0.0);
    CHECK(dk_from_dw(0.04) == doctest::Approx(0.2));
    CHECK(dk_from_dw(1.0) == 1.0);
    CHECK_THROWS_AS(dk_from_dw(-1e-3), InputError);
  }

  TEST_CASE("proxy model") {
    const auto r = proxy_exact(4, 0.5);
    CHECK(std::abs(r.gamma - 0.2587890625) < 1e-12);
    CHECK(std::abs(r.gamma - brute_gamma(4, 0.5)) < 1e-12);
    for (double p : {0.3, 0.8}) {
      CHECK(proxy_exact(7, p).gamma == doctest::Approx(brute_gamma(7, p)).epsilon(1e-12));
    }
    for (int n : {4, 5}) {
      for (double p : {0.3, 0.5}) {
        const auto [mean, var] = brute_proxy(n, p);
        const auto rep = proxy_exact(n, p);
        CHECK(rep.mean_Y == doctest::Approx(mean).epsilon(1e-12));
        CHECK(rep.var_Y == doctest::Approx(var).epsilon(1e-12));
      }
    }
    CHECK(r.be_bound == doctest::Approx(16.0 * r.gamma / std::pow(r.var_Y_iid, 1.5)));
    CHECK_THROWS_AS(proxy_exact(3, 0.5), InputError);
  }
}

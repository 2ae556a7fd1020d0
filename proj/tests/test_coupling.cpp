#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "trinorm/coupling.hpp"
#include "trinorm/errors.hpp"
#include "trinorm/oracle.hpp"

using namespace trinorm;

namespace {

const Complex I{0.0, 1.0};

// Per-graph averages straight from the definitions: neighbourhoods by
// filtering all triples, local sums by direct lookup.
struct Naive {
  double W = 0, a1 = 0, a32 = 0, a33 = 0, gd = 0;
  Complex z2, z41, z42, z43;
};

Naive naive_values(const Graph& g, double p, double t) {
  const int n = g.n();
  const auto mom = exact_moments(n, p);
  const double s = mom.sigma;
  const auto all = all_triples(n);
  Naive r;
  r.W = w_statistic(g, p, s);
  for (const auto& v : all) {
    const double x = centered_indicator(g, p, v);
    const double y = local_sum(g, p, v);
    r.a1 += std::abs(x) * y * y / (s * s * s);
    r.gd += x * y / (s * s);
    const Complex e = std::exp(-I * t * y / s);
    r.z2 += -x / s * (e - 1.0);
    r.z41 += -x / s * (e - 1.0 + I * t * y / s);
    for (const auto& w : all) {
      if (v.overlap(w) < 2) continue;
      const double xw = centered_indicator(g, p, w);
      const double yvw = local_sum(g, p, v, w);
      const double svw = v == w ? mom.var_X : mom.cov_overlap2;
      r.a32 += std::abs(x * xw * yvw) / (s * s * s);
      r.a33 += svw * std::abs(yvw) / (s * s * s);
      const Complex f = std::exp(-I * t * yvw / s) - 1.0;
      r.z42 += x * xw / (s * s) * f;
      r.z43 += svw / (s * s) * f;
    }
  }
  return r;
}

}  // namespace

TEST_SUITE("coupling") {
  TEST_CASE("kernels") {
    CHECK(kernel_phi(0.0) == Complex{});
    CHECK(std::abs(kernel_psi(std::numbers::pi) - Complex(-2.0, 0.0)) < 1e-15);
    for (double x : {1e-6, 9e-5, 1.1e-4, 0.3, -2.0, 7.5}) {
      const Complex direct = (std::exp(I * x) - 1.0 - I * x) / x;
      CHECK(std::abs(kernel_phi(x) - direct) < 1e-9 * std::max(1.0, std::abs(direct)) + 1e-12);
    }
    // continuity across the series switch
    CHECK(std::abs(kernel_phi(0.99999e-4) - kernel_phi(1.00001e-4)) < 1e-9);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    for (int i = 0; i < 10000; ++i) {
      const double x = u(rng), y = u(rng);
      CHECK(std::abs(kernel_phi(x) - kernel_phi(y)) <= 0.5 * std::abs(x - y) + 1e-12);
      CHECK(std::abs(kernel_psi(x) - kernel_psi(y)) <= std::abs(x - y) + 1e-12);
    }
  }

  TEST_CASE("local sum profile counts closed triples") {
    for (std::uint64_t i = 0; i < 6; ++i) {
      const int n = 6 + static_cast<int>(i);
      const double p = 0.2 + 0.1 * i;
      const Graph g = sample_gnp({n, p, 77, 0}, i);
      const auto prof = local_sum_profile(g);
      CHECK(prof.nu == 3 * (n - 3) + 1);
      CHECK(prof.pair_size == 2 * prof.nu - n);
      CHECK(prof.triangles == triangle_count(g));

      std::array<std::vector<std::int64_t>, 2> single;
      std::array<std::vector<std::int64_t>, 3> cross;
      for (auto& h : single) h.assign(prof.single[0].size(), 0);
      for (auto& h : cross) h.assign(prof.cross[0].size(), 0);
      const double p3 = p * p * p;
      const auto all = all_triples(n);
      for (const auto& v : all) {
        const int cv = centered_indicator(g, p, v) > 0;
        const auto cnt = std::llround(local_sum(g, p, v) + prof.nu * p3);
        ++single[cv].at(cnt);
        for (const auto& w : all) {
          if (w == v || v.overlap(w) < 2) continue;
          const int cw = centered_indicator(g, p, w) > 0;
          const auto cvw = std::llround(local_sum(g, p, v, w) + prof.pair_size * p3);
          ++cross[cv + cw].at(cvw);
        }
      }
      CHECK(single == prof.single);
      CHECK(cross == prof.cross);
    }
  }

  TEST_CASE("conditional values agree with the naive sums") {
    const std::vector<double> grid{0.3, 1.0, 4.0};
    for (std::uint64_t i = 0; i < 4; ++i) {
      const int n = 7;
      const double p = i % 2 ? 0.3 : 0.75;
      const Graph g = sample_gnp({n, p, 5, 0}, i);
      const auto mom = exact_moments(n, p);
      const auto fast = conditional_values(g, mom, grid);
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto ref = naive_values(g, p, grid[k]);
        CHECK(fast.W == doctest::Approx(ref.W).epsilon(1e-12));
        CHECK(fast.a1 == doctest::Approx(ref.a1).epsilon(1e-11));
        CHECK(fast.a32 == doctest::Approx(ref.a32).epsilon(1e-11));
        CHECK(fast.a33 == doctest::Approx(ref.a33).epsilon(1e-11));
        CHECK(fast.gd == doctest::Approx(ref.gd).epsilon(1e-11));
        CHECK(std::abs(fast.z2[k] - ref.z2) < 1e-11);
        CHECK(std::abs(fast.z41[k] - ref.z41) < 1e-11);
        CHECK(std::abs(fast.z42[k] - ref.z42) < 1e-10);
        CHECK(std::abs(fast.z43[k] - ref.z43) < 1e-10);
        CHECK(std::abs(graph_conditional(g, p, mom.sigma, grid[k], ConditionalTerm::R43) - ref.z43) < 1e-10);
      }
    }
  }

  TEST_CASE("empty graph closed forms") {
    const int n = 9;
    const double p = 0.4, p3 = p * p * p;
    const auto mom = exact_moments(n, p);
    const Graph g(n);
    CounterRng rng(sample_key(1, 0, 0));
    const double N = static_cast<double>(num_triples(n));
    for (int i = 0; i < 20; ++i) {
      const auto d = draw_coupling(g, p, mom.sigma, rng);
      CHECK(d.G == doctest::Approx(N * p3 / mom.sigma));
    }
    const double nu = 3 * (n - 3) + 1;
    const Complex z = graph_conditional(g, p, mom.sigma, 1.0, ConditionalTerm::R2);
    const Complex expect = N * p3 / mom.sigma * (std::exp(I * nu * p3 / mom.sigma) - 1.0);
    CHECK(std::abs(z - expect) < 1e-12);
  }

  TEST_CASE("draws") {
    const int n = 5;
    const double p = 0.3;
    const auto mom = exact_moments(n, p);
    const std::uint64_t m = 200000;
    double same = 0.0, s1 = 0.0, s2 = 0.0, g1 = 0.0, g2 = 0.0;
    for (std::uint64_t i = 0; i < m; ++i) {
      const Graph g = sample_gnp({n, p, 21, 0}, i);
      CounterRng rng(sample_key(21, 0, i, 9));
      const auto d = draw_coupling(g, p, mom.sigma, rng);
      REQUIRE(d.V.overlap(d.Vp) >= 2);
      CHECK(std::abs((d.Wp - d.W) - d.D) < 1e-12);
      CHECK(std::abs((d.Wpp - d.W) - d.Dprime) < 1e-12);
      same += d.V == d.Vp;
      s1 += d.S;
      s2 += d.S * d.S;
      const double gd = d.G * d.D;
      g1 += gd;
      g2 += gd * gd;
    }
    const double q = 1.0 / 7.0;
    CHECK(std::abs(same / m - q) < 3.0 * std::sqrt(q * (1 - q) / m));
    const double se_s = std::sqrt((s2 / m - (s1 / m) * (s1 / m)) / m);
    CHECK(std::abs(s1 / m - 1.0) < 3.0 * se_s);
    const double se_g = std::sqrt((g2 / m - (g1 / m) * (g1 / m)) / m);
    CHECK(std::abs(g1 / m - 1.0) < 3.0 * se_g);
    CounterRng r0(1);
    CHECK_THROWS_AS(draw_coupling(Graph(5), p, 0.0, r0), InputError);
  }

  TEST_CASE("r41 is second order in t") {
    const Graph g = sample_gnp({8, 0.5, 3, 0}, 0);
    const double s = exact_moments(8, 0.5).sigma;
    const double a = std::abs(graph_conditional(g, 0.5, s, 1e-2, ConditionalTerm::R41));
    const double b = std::abs(graph_conditional(g, 0.5, s, 1e-3, ConditionalTerm::R41));
    CHECK(a / b == doctest::Approx(100.0).epsilon(0.02));
  }

  TEST_CASE("estimates") {
    EstimateConfig cfg{5, 0.3, 20000, 8, 0, {0.5, 1.0, 2.0}};
    const auto est = estimate_r(cfg);
    const auto ex = exact_r_terms(5, 0.3, cfg.t_grid);
    CHECK(std::abs(est.r1.value - ex.r1) < 4.0 * est.r1.std_error);
    CHECK(std::abs(est.r32.value - ex.r32) < 4.0 * est.r32.std_error);
    CHECK(std::abs(est.r33.value - ex.r33) < 4.0 * est.r33.std_error);
    CHECK(est.r31.value == est.r1.value);
    CHECK(est.w_samples.size() == 20000);

    const auto again = estimate_r(cfg);
    CHECK(again.r1.value == est.r1.value);
    CHECK(again.r4.value == est.r4.value);
    CHECK(again.w_samples == est.w_samples);

    cfg.samples = 40000;
    const auto more = estimate_r(cfg);
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(est.r2_t[k].value >= 0.0);
      const double ratio = more.r2_t[k].value / est.r2_t[k].value;
      CHECK(ratio > 0.8);
      CHECK(ratio < 1.2);
    }

    cfg.samples = 0;
    CHECK_THROWS_AS(estimate_r(cfg), InputError);
    cfg.samples = 5000;
    cfg.n = 49;
    CHECK_THROWS_AS(estimate_r(cfg), CapacityError);
  }

  TEST_CASE("order agreement at n = 16") {
    const EstimateConfig cfg{16, 0.5, 2000, 2, 0, {1.0}};
    const auto est = estimate_r(cfg);
    const double ratio = est.r3.value / r3_theoretical(16, 0.5, exact_moments(16, 0.5).sigma);
    CHECK(ratio > 0.0);
    CHECK(ratio < 10.0);
    const auto rep = assemble_bound(16, 0.5, est, RTildePolicy::Estimate);
    CHECK(std::isfinite(rep.extended_bound));
    CHECK(rep.extended_bound > 0.0);
    REQUIRE(rep.simple_bound.has_value());
    CHECK(*rep.simple_bound > 0.0);
  }

  TEST_CASE("bound assembly") {
    REstimates zero;
    const auto rep = assemble_bound(16, 0.5, zero, RTildePolicy::Theoretical, 1e-3);
    CHECK(std::abs(rep.extended_bound - 6.10e-3) < 1e-15);
    CHECK_FALSE(rep.simple_bound.has_value());
    CHECK_FALSE(rep.warning.has_value());

    REstimates some;
    some.r1.value = 0.01;
    some.r2.value = 0.001;
    some.r3.value = 0.01;
    some.r4.value = 1e-4;
    const auto raised = assemble_bound(16, 0.5, some, RTildePolicy::Theoretical, 1e-3);
    CHECK(raised.warning.has_value());
    CHECK(raised.inputs.r3_tilde == 0.01);
    CHECK(raised.extended_bound == doctest::Approx(0.075));
    REQUIRE(raised.simple_bound.has_value());
    CHECK(*raised.simple_bound == doctest::Approx(0.03994738944695).epsilon(1e-12));
    CHECK(to_string(RTildePolicy::Theoretical) == "theoretical");
  }

  TEST_CASE("default grid") {
    const auto g = default_t_grid();
    REQUIRE(g.size() == 24);
    CHECK(g.front() == doctest::Approx(1e-2));
    CHECK(g.back() == doctest::Approx(10.0));
    for (std::size_t i = 2; i < g.size(); ++i) {
      CHECK(g[i] / g[i - 1] == doctest::Approx(g[1] / g[0]));
    }
  }
}

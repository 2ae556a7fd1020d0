#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "trinorm/errors.hpp"
#include "trinorm/patterns.hpp"

using namespace trinorm;

namespace {

TripleId relabel(const TripleId& t, const std::array<int, 10>& perm) {
  return TripleId::of(perm[t.v[0]], perm[t.v[1]], perm[t.v[2]]);
}

std::vector<int> sorted(std::vector<int> x) {
  std::sort(x.begin(), x.end());
  return x;
}

}  // namespace

TEST_SUITE("patterns") {
  TEST_CASE("classification examples") {
    const auto t = [](int a, int b, int c) { return TripleId::of(a, b, c); };
    const auto same = classify_pattern({t(0, 1, 2), t(0, 1, 2), t(0, 1, 2), t(0, 1, 2)});
    CHECK(same.lemma_tag == LemmaTag::L9);
    CHECK(same.m == 3);
    CHECK(same.multiplicity_order == 0);

    // |v ∩ v'| = 1 but w ∩ w' = {3} outside it: tagged L9. Edges 01 02 12 13 23 03 04 34 35 45.
    const auto mixed = classify_pattern({t(0, 1, 2), t(1, 2, 3), t(0, 3, 4), t(3, 4, 5)});
    CHECK(mixed.lemma_tag == LemmaTag::L9);
    CHECK(mixed.m == 10);

    // Two disjoint doubled triangles sharing an edge each: 5 + 5 edges.
    const auto apart = classify_pattern({t(0, 1, 2), t(0, 1, 6), t(3, 4, 5), t(3, 4, 7)});
    CHECK(apart.lemma_tag == LemmaTag::L11);
    CHECK(apart.m == 10);
    CHECK(apart.small_p_exponent() == 13);

    const auto l10 = classify_pattern({t(0, 1, 2), t(0, 1, 3), t(0, 4, 5), t(0, 4, 6)});
    CHECK(l10.lemma_tag == LemmaTag::L10);
    const auto l12 = classify_pattern({t(0, 1, 2), t(0, 1, 3), t(3, 4, 5), t(3, 4, 6)});
    CHECK(l12.lemma_tag == LemmaTag::L12);

    CHECK_THROWS_AS(classify_pattern({t(0, 1, 2), t(0, 3, 4), t(0, 1, 2), t(0, 1, 2)}), InputError);
    CHECK(to_string(LemmaTag::L11) == "L11");
  }

  TEST_CASE("classification is invariant under relabelling") {
    std::mt19937_64 rng(3);
    std::array<int, 10> perm;
    for (Anchor a : {Anchor::R411, Anchor::R412, Anchor::R413, Anchor::R414}) {
      for (const auto& cls : enumerate_classes(a)) {
        for (int rep = 0; rep < 10; ++rep) {
          std::iota(perm.begin(), perm.end(), 0);
          std::shuffle(perm.begin(), perm.end(), rng);
          const auto& r = cls.representative;
          const auto img = classify_pattern(
              {relabel(r.v, perm), relabel(r.w, perm), relabel(r.vp, perm), relabel(r.wp, perm)});
          CHECK(img.canonical == cls.canonical);
          CHECK(img.m == cls.m);
          CHECK(img.lemma_tag == cls.lemma_tag);
          CHECK(img.multiplicity_order == cls.multiplicity_order);
        }
        // swapping the two sides is the same pattern
        const auto& r = cls.representative;
        const auto sw = classify_pattern({r.vp, r.wp, r.v, r.w});
        CHECK(sw.m == cls.m);
        CHECK(sw.lemma_tag == cls.lemma_tag);
      }
    }
  }

  TEST_CASE("anchors") {
    CHECK(parse_anchor("r411") == Anchor::R411);
    CHECK(parse_anchor("r424") == Anchor::R414);
    CHECK(to_string(Anchor::R413) == "r413");
    CHECK_THROWS_AS(parse_anchor("r415"), InputError);
    const auto [v, vp] = anchor_base(Anchor::R413);
    CHECK(v.overlap(vp) == 1);
  }

  TEST_CASE("diagonal base classes") {
    const auto cls = enumerate_classes(Anchor::R411);
    REQUIRE(cls.size() == 6);
    std::vector<int> mult, m;
    for (const auto& c : cls) {
      mult.push_back(c.multiplicity_order);
      m.push_back(c.m);
      CHECK(c.lemma_tag == LemmaTag::L9);
      CHECK(c.small_p_exponent() == c.m);
    }
    CHECK(sorted(mult) == std::vector<int>{0, 1, 1, 1, 2, 2});
    // u = 013, u' = 024 on base 012 covers 01 02 12 03 13 04 24: seven edges.
    CHECK(sorted(m) == std::vector<int>{3, 5, 5, 6, 7, 7});
  }

  TEST_CASE("disjoint base classes") {
    const auto cls = enumerate_classes(Anchor::R414);
    REQUIRE(cls.size() == 11);
    std::vector<int> exps;
    int l9 = 0, l11 = 0, l12 = 0;
    for (const auto& c : cls) {
      exps.push_back(c.small_p_exponent());
      l9 += c.lemma_tag == LemmaTag::L9;
      l11 += c.lemma_tag == LemmaTag::L11;
      l12 += c.lemma_tag == LemmaTag::L12;
      CHECK(c.lemma_tag != LemmaTag::L10);
    }
    CHECK(sorted(exps) == std::vector<int>{9, 9, 9, 10, 10, 10, 11, 11, 11, 11, 13});
    CHECK(l9 == 4);
    CHECK(l11 == 3);
    CHECK(l12 == 4);
    // enumeration is sorted by (order, exponent)
    for (std::size_t i = 1; i < cls.size(); ++i) {
      CHECK(std::pair(cls[i - 1].multiplicity_order, cls[i - 1].small_p_exponent()) <=
            std::pair(cls[i].multiplicity_order, cls[i].small_p_exponent()));
    }
  }

  TEST_CASE("remaining anchors are lemma-consistent") {
    for (Anchor a : {Anchor::R412, Anchor::R413}) {
      const auto cls = enumerate_classes(a);
      CHECK_FALSE(cls.empty());
      for (const auto& c : cls) {
        const auto& r = c.representative;
        CHECK(c.m == edge_union_size(std::vector<TripleId>{r.v, r.w, r.vp, r.wp}));
        if (a == Anchor::R412) CHECK(c.lemma_tag == LemmaTag::L9);
      }
    }
    // u = 234, u' = 456 on base (123, 145), 0-based: the L9 family with m = 9.
    const auto c = classify_pattern({TripleId::of(0, 1, 2), TripleId::of(1, 2, 3),
                                     TripleId::of(0, 3, 4), TripleId::of(3, 4, 5)});
    CHECK(c.lemma_tag == LemmaTag::L9);
  }

  TEST_CASE("product moments") {
    for (double p : {0.1, 0.5, 0.9}) {
      const std::vector<TripleId> one{TripleId::of(0, 1, 2)};
      CHECK(abs_product_moment(one, p) ==
            doctest::Approx(2 * (1 - p) * p * p * p * (1 + p + p * p)).epsilon(1e-14));
    }
    const std::vector<TripleId> two{TripleId::of(0, 1, 2), TripleId::of(0, 1, 3)};
    CHECK(abs_product_moment(two, 0.5) <= 0.125);
    // k = 2 sharing one edge: |X_v X_w| expanded over the 5 edges by hand.
    double hand = 0.0;
    const double p = 0.5, p3 = 0.125;
    for (int mask = 0; mask < 32; ++mask) {
      const int e01 = mask & 1, a = (mask >> 1) & 1, b = (mask >> 2) & 1, c = (mask >> 3) & 1,
                d = (mask >> 4) & 1;
      const double x = (e01 && a && b) - p3, y = (e01 && c && d) - p3;
      hand += std::pow(p, __builtin_popcount(mask)) * std::pow(1 - p, 5 - __builtin_popcount(mask)) *
              std::abs(x * y);
    }
    CHECK(abs_product_moment(two, 0.5) == doctest::Approx(hand).epsilon(1e-14));

    std::vector<TripleId> seven(7, TripleId::of(0, 1, 2));
    CHECK_THROWS_AS(abs_product_moment(seven, 0.5), CapacityError);
    const std::vector<TripleId> wide{TripleId::of(0, 1, 2), TripleId::of(3, 4, 5),
                                     TripleId::of(6, 7, 8), TripleId::of(9, 10, 11)};
    CHECK_THROWS_AS(abs_product_moment(wide, 0.5), CapacityError);
  }

  TEST_CASE("moment bound holds for every class") {
    std::vector<double> grid;
    for (int k = 1; k <= 19; ++k) grid.push_back(0.05 * k);
    for (Anchor a : {Anchor::R411, Anchor::R412, Anchor::R413, Anchor::R414}) {
      for (const auto& c : enumerate_classes(a)) {
        const auto& r = c.representative;
        const std::vector<TripleId> ts{r.v, r.w, r.vp, r.wp};
        const auto rep = moment_bound_check(ts, grid);
        CHECK(rep.all_hold());
        CHECK(rep.m == c.m);
      }
    }
    const std::vector<TripleId> near1{TripleId::of(0, 1, 2), TripleId::of(0, 1, 3)};
    const std::vector<double> top{1 - 1e-6};
    const auto e = moment_bound_check(near1, top).entries.at(0);
    CHECK(e.exact < 1e-5);
    CHECK(e.bound == doctest::Approx(6e-6).epsilon(1e-6));
  }

  TEST_CASE("bound families") {
    CHECK(lemma_bound_family(LemmaTag::L11, 6, 10, 0.5) == doctest::Approx(std::min(0.5, std::pow(0.5, 9))));
    CHECK(lemma_bound_family(LemmaTag::L9, 3, 10, 0.99) == doctest::Approx(100 * 0.01));
    CHECK(lemma_bound_family(LemmaTag::L12, 8, 10, 0.1) ==
          doctest::Approx(std::pow(0.1, 9) + 10 * std::pow(0.1, 11)));
  }

  TEST_CASE("covariance checks") {
    const auto cls = enumerate_classes(Anchor::R414);
    const auto doubled = std::find_if(cls.begin(), cls.end(), [](const PatternClass& c) {
      return c.lemma_tag == LemmaTag::L11 && c.multiplicity_order == 0;
    });
    REQUIRE(doubled != cls.end());
    const auto exact = pattern_cov_check(*doubled, 6, 0.5, 1.0, {});
    REQUIRE(exact.kernels.size() == 2);
    const auto mc = pattern_cov_check(*doubled, 6, 0.5, 1.0, {CovMode::MonteCarlo, 200000, 11});
    for (std::size_t k = 0; k < 2; ++k) {
      CHECK(std::isfinite(exact.kernels[k].ratio));
      CHECK(exact.kernels[k].std_error == 0.0);
      CHECK(std::abs(mc.kernels[k].cov - exact.kernels[k].cov) < 5.0 * mc.kernels[k].std_error + 1e-12);
    }
    CHECK(exact.kernels[0].lipschitz * 2 == doctest::Approx(exact.kernels[1].lipschitz));

    CHECK_THROWS_AS(pattern_cov_check(cls.back(), 6, 0.5, 1.0, {}), InputError);
    CHECK_THROWS_AS(pattern_cov_check(*doubled, 8, 0.5, 1.0, {}), CapacityError);
    CHECK_THROWS_AS(pattern_cov_check(*doubled, 8, 0.5, 1.0, {CovMode::MonteCarlo, 100, 0}), InputError);
  }
}

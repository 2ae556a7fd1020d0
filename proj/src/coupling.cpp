#include "trinorm/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "trinorm/errors.hpp"
#include "trinorm/special.hpp"

namespace trinorm {

namespace {


std::int64_t choose2(std::int64_t x) { return x * (x - 1) / 2; }
std::int64_t choose3(std::int64_t x) { return x * (x - 1) * (x - 2) / 6; }

// sin(u) - u without cancellation near 0.
double sin_minus_id(double u) {
  if (std::abs(u) < 1e-2) {
    const double u2 = u * u;
    return -u * u2 / 6.0 * (1.0 - u2 / 20.0 * (1.0 - u2 / 42.0 * (1.0 - u2 / 72.0)));
  }
  return std::sin(u) - u;
}

// cos(u) - 1 = -2 sin^2(u/2).
double cos_minus_one(double u) {
  const double s = std::sin(0.5 * u);
  return -2.0 * s * s;
}

// e^{iu} - 1 - iu.
Complex expm1i_linear(double u) { return {cos_minus_one(u), sin_minus_id(u)}; }

struct Ranker {
  std::vector<std::int64_t> c2, c3;
  explicit Ranker(int n) : c2(static_cast<std::size_t>(n) + 1), c3(static_cast<std::size_t>(n) + 1) {
    for (int i = 0; i <= n; ++i) {
      c2[static_cast<std::size_t>(i)] = choose2(i);
      c3[static_cast<std::size_t>(i)] = choose3(i);
    }
  }
  std::size_t edge(int a, int b) const {  // a < b
    return static_cast<std::size_t>(c2[static_cast<std::size_t>(b)] + a);
  }
  std::size_t triple(int a, int b, int c) const {
    if (a > b) std::swap(a, b);
    if (b > c) std::swap(b, c);
    if (a > b) std::swap(a, b);
    return static_cast<std::size_t>(c3[static_cast<std::size_t>(c)] +
                                    c2[static_cast<std::size_t>(b)] + a);
  }
};

class ComplexMoments {
 public:
  void add(Complex x) {
    ++count_;
    const Complex d = x - mean_;
    mean_ += d / static_cast<double>(count_);
    m2_ += (d * std::conj(x - mean_)).real();
  }
  void merge(const ComplexMoments& o) {
    if (o.count_ == 0) return;
    if (count_ == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(count_);
    const double nb = static_cast<double>(o.count_);
    const Complex d = o.mean_ - mean_;
    mean_ += d * (nb / (na + nb));
    m2_ += o.m2_ + std::norm(d) * na * nb / (na + nb);
    count_ += o.count_;
  }
  double variance() const { return count_ ? std::max(0.0, m2_ / static_cast<double>(count_)) : 0.0; }

 private:
  std::uint64_t count_ = 0;
  Complex mean_{};
  double m2_ = 0.0;
};

struct BatchState {
  std::uint64_t count = 0;
  CompensatedSum a1, a32, a33;
  std::vector<ComplexMoments> z2, z41, z42, z43;
};

struct SupTerms {
  std::vector<double> r2_t;
  double r2 = 0.0;
  std::size_t r2_arg = 0;
  double s41 = 0.0, s42 = 0.0, s43 = 0.0;
};

SupTerms sup_terms(const BatchState& b, std::span<const double> grid) {
  SupTerms s;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double t = grid[g];
    s.r2_t.push_back(std::sqrt(b.z2[g].variance()) / t);
    if (s.r2_t.back() > s.r2 || g == 0) {
      s.r2 = s.r2_t.back();
      s.r2_arg = g;
    }
    s.s41 = std::max(s.s41, std::sqrt(b.z41[g].variance()) / (t * t));
    s.s42 = std::max(s.s42, std::sqrt(b.z42[g].variance()) / t);
    s.s43 = std::max(s.s43, std::sqrt(b.z43[g].variance()) / t);
  }
  return s;
}

RTermEstimate batch_estimate(double pooled, const std::vector<double>& per_batch,
                             std::uint64_t samples) {
  const double B = static_cast<double>(per_batch.size());
  double mean = 0.0;
  for (double x : per_batch) mean += x;
  mean /= B;
  double ss = 0.0;
  for (double x : per_batch) ss += (x - mean) * (x - mean);
  RTermEstimate e;
  e.value = pooled;
  e.std_error = std::sqrt(ss / (B - 1.0) / B);
  e.samples = samples;
  return e;
}

}  // namespace

Complex kernel_psi(double x) { return {cos_minus_one(x), std::sin(x)}; }

Complex kernel_phi(double x) {
  if (std::abs(x) < 1e-4) {
    return {-x / 2.0 + x * x * x / 24.0, -x * x / 6.0};
  }
  return expm1i_linear(x) / x;
}

std::vector<double> default_t_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi > lo) || points < 2) throw InputError("default_t_grid: bad range");
  std::vector<double> g;
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < points; ++i) g.push_back(std::exp(a + (b - a) * i / (points - 1)));
  return g;
}

CouplingDraw draw_coupling(const Graph& g, double p, double sigma, CounterRng& rng) {
  if (!(sigma > 0.0)) throw InputError("draw_coupling: sigma must be positive");
  require_probability(p);
  const int n = g.n();
  const double N = static_cast<double>(num_triples(n));
  const std::uint64_t nu = 3 * static_cast<std::uint64_t>(n - 3) + 1;

  CouplingDraw d{g, triple_from_rank(rng.below(num_triples(n))), TripleId{}};
  std::uint64_t j = rng.below(nu);
  if (j == 0) {
    d.Vp = d.V;
  } else {
    --j;
    const auto& v = d.V.v;
    const std::uint64_t outside = static_cast<std::uint64_t>(n - 3);
    const int pair = static_cast<int>(j / outside);
    auto xi = static_cast<int>(j % outside);
    int x = 0;
    for (;; ++x) {
      if (d.V.contains(x)) continue;
      if (xi-- == 0) break;
    }
    const int keep_a = pair == 2 ? v[1] : v[0];
    const int keep_b = pair == 0 ? v[1] : v[2];
    d.Vp = TripleId::of(keep_a, keep_b, x);
  }

  const double var_X = p * p * p * (1.0 - p * p * p);
  const double cov2 = std::pow(p, 5) * (1.0 - p);
  d.W = w_statistic(g, p, sigma);
  d.G = -N * centered_indicator(g, p, d.V) / sigma;
  d.D = -local_sum(g, p, d.V) / sigma;
  d.Wp = d.W + d.D;
  d.Dtilde = -static_cast<double>(nu) * centered_indicator(g, p, d.Vp) / sigma;
  d.Dprime = -local_sum(g, p, d.V, d.Vp) / sigma;
  d.Wpp = d.W + d.Dprime;
  d.S = N * static_cast<double>(nu) / (sigma * sigma) * (d.Vp == d.V ? var_X : cov2);
  return d;
}

LocalSumProfile local_sum_profile(const Graph& g) {
  const int n = g.n();
  const Ranker rk(n);
  const Adjacency adj(g);
  LocalSumProfile prof;
  prof.n = n;
  prof.nu = 3 * static_cast<std::int64_t>(n - 3) + 1;
  prof.pair_size = 2 * prof.nu - n;

  std::vector<std::uint8_t> closed(num_triples(n), 0);
  std::vector<std::int64_t> pair_closed(num_edges(n), 0);
  for (int b = 1; b < n; ++b) {
    for (int a = 0; a < b; ++a) {
      if (adj.edge(a, b)) pair_closed[rk.edge(a, b)] = adj.codegree(a, b);
    }
  }
  for (int c = 2; c < n; ++c) {
    for (int b = 1; b < c; ++b) {
      if (!adj.edge(b, c)) continue;
      for (int a = 0; a < b; ++a) {
        if (adj.edge(a, b) && adj.edge(a, c)) {
          closed[rk.triple(a, b, c)] = 1;
          ++prof.triangles;
        }
      }
    }
  }

  std::vector<std::int64_t> count(closed.size());
  for (int c = 2; c < n; ++c) {
    for (int b = 1; b < c; ++b) {
      for (int a = 0; a < b; ++a) {
        const std::size_t r = rk.triple(a, b, c);
        count[r] = pair_closed[rk.edge(a, b)] + pair_closed[rk.edge(a, c)] +
                   pair_closed[rk.edge(b, c)] - 2 * closed[r];
      }
    }
  }

  prof.single[0].assign(static_cast<std::size_t>(prof.nu) + 1, 0);
  prof.single[1].assign(static_cast<std::size_t>(prof.nu) + 1, 0);
  for (auto& h : prof.cross) h.assign(static_cast<std::size_t>(std::max<std::int64_t>(prof.pair_size, 0)) + 1, 0);

  for (int c = 2; c < n; ++c) {
    for (int b = 1; b < c; ++b) {
      for (int a = 0; a < b; ++a) {
        const std::size_t rv = rk.triple(a, b, c);
        const int cv = closed[rv];
        ++prof.single[static_cast<std::size_t>(cv)][static_cast<std::size_t>(count[rv])];
        // w = {i, j, x} shares the pair {i, j} with v; o is the third vertex of v.
        const std::array<std::array<int, 3>, 3> splits{{{a, b, c}, {a, c, b}, {b, c, a}}};
        for (const auto& [i, j, o] : splits) {
          const std::int64_t shared = pair_closed[rk.edge(i, j)];
          for (int x = 0; x < n; ++x) {
            if (x == a || x == b || x == c) continue;
            const std::size_t rw = rk.triple(i, j, x);
            const std::int64_t k = count[rv] + count[rw] - shared - closed[rk.triple(i, o, x)] -
                                   closed[rk.triple(j, o, x)];
            ++prof.cross[static_cast<std::size_t>(cv + closed[rw])][static_cast<std::size_t>(k)];
          }
        }
      }
    }
  }
  return prof;
}

ConditionalValues conditional_values(const Graph& g, const MomentReport& mom,
                                     std::span<const double> t_grid) {
  const double p = mom.p;
  const double p3 = p * p * p;
  const double sg = mom.sigma;
  const double s2 = sg * sg;
  const double s3 = s2 * sg;
  const auto prof = local_sum_profile(g);

  ConditionalValues out;
  out.W = (static_cast<double>(prof.triangles) - mom.mean_T) / sg;

  // Coefficients per distinct local-sum value.
  const std::size_t ks = prof.single[0].size();
  const std::size_t kc = prof.cross[0].size();
  std::vector<double> c2(ks, 0.0), s42(ks, 0.0), s43(ks, 0.0), ys(ks);
  std::vector<double> c42(kc, 0.0), c43(kc, 0.0), yc(kc);
  CompensatedSum a1, a32, a33, gd;
  for (std::size_t k = 0; k < ks; ++k) {
    const double y = static_cast<double>(k) - static_cast<double>(prof.nu) * p3;
    ys[k] = y;
    for (int c = 0; c < 2; ++c) {
      const auto h = static_cast<double>(prof.single[static_cast<std::size_t>(c)][k]);
      if (h == 0.0) continue;
      const double x = c - p3;
      c2[k] += h * x;
      s42[k] += h * x * x;
      s43[k] += h * mom.var_X;
      a1 += h * std::abs(x) * y * y;
      gd += h * x * y;
      a32 += h * x * x * std::abs(y);
      a33 += h * mom.var_X * std::abs(y);
    }
  }
  const std::array<double, 3> prod{p3 * p3, -p3 * (1.0 - p3), (1.0 - p3) * (1.0 - p3)};
  for (std::size_t k = 0; k < kc; ++k) {
    const double y = static_cast<double>(k) - static_cast<double>(prof.pair_size) * p3;
    yc[k] = y;
    for (std::size_t c = 0; c < 3; ++c) {
      const auto h = static_cast<double>(prof.cross[c][k]);
      if (h == 0.0) continue;
      c42[k] += h * prod[c];
      c43[k] += h * mom.cov_overlap2;
      a32 += h * std::abs(prod[c] * y);
      a33 += h * mom.cov_overlap2 * std::abs(y);
    }
  }
  out.a1 = a1.value() / s3;
  out.a32 = a32.value() / s3;
  out.a33 = a33.value() / s3;
  out.gd = gd.value() / s2;

  for (double t : t_grid) {
    CompensatedComplexSum z2, z41, z42, z43;
    for (std::size_t k = 0; k < ks; ++k) {
      const double u = -t * ys[k] / sg;
      if (c2[k] != 0.0) {
        z2 += c2[k] * kernel_psi(u);
        z41 += c2[k] * expm1i_linear(u);
      }
      if (s42[k] != 0.0 || s43[k] != 0.0) {
        const Complex e = kernel_psi(u);
        z42 += s42[k] * e;
        z43 += s43[k] * e;
      }
    }
    for (std::size_t k = 0; k < kc; ++k) {
      if (c42[k] == 0.0 && c43[k] == 0.0) continue;
      const Complex e = kernel_psi(-t * yc[k] / sg);
      z42 += c42[k] * e;
      z43 += c43[k] * e;
    }
    out.z2.push_back(-z2.value() / sg);
    out.z41.push_back(-z41.value() / sg);
    out.z42.push_back(z42.value() / s2);
    out.z43.push_back(z43.value() / s2);
  }
  return out;
}

Complex graph_conditional(const Graph& g, double p, double sigma, double t, ConditionalTerm which) {
  if (!(sigma > 0.0)) throw InputError("graph_conditional: sigma must be positive");
  MomentReport mom = exact_moments(g.n(), p);
  mom.sigma = sigma;
  const double grid[] = {t};
  const auto v = conditional_values(g, mom, grid);
  switch (which) {
    case ConditionalTerm::R2: return v.z2[0];
    case ConditionalTerm::R41: return v.z41[0];
    case ConditionalTerm::R42: return v.z42[0];
    case ConditionalTerm::R43: return v.z43[0];
  }
  return {};
}

REstimates estimate_r(const EstimateConfig& cfg) {
  if (cfg.n < 4) throw InputError("estimate_r: n must be at least 4");
  if (cfg.n > kCouplingMaxN) {
    throw CapacityError("estimate_r: per-graph inner sums are supported up to n = " +
                        std::to_string(kCouplingMaxN));
  }
  require_probability(cfg.p);
  if (cfg.samples < 1000) throw InputError("estimate_r: need at least 1000 samples");
  if (cfg.batches < 2) throw InputError("estimate_r: need at least 2 batches");
  const std::vector<double> grid = cfg.t_grid.empty() ? default_t_grid() : cfg.t_grid;
  for (double t : grid) {
    if (!(t > 0.0)) throw InputError("estimate_r: t grid must be positive");
  }

  const auto mom = exact_moments(cfg.n, cfg.p);
  const SamplerConfig sc{cfg.n, cfg.p, cfg.seed, cfg.stream};
  const auto B = static_cast<std::uint64_t>(cfg.batches);
  const std::size_t G = grid.size();

  REstimates out;
  out.n = cfg.n;
  out.p = cfg.p;
  out.t_grid = grid;
  out.w_samples.assign(cfg.samples, 0.0);
  std::vector<BatchState> batches(B);
  parallel_for(B, [&](std::uint64_t b) {
    BatchState& st = batches[b];
    st.z2.resize(G);
    st.z41.resize(G);
    st.z42.resize(G);
    st.z43.resize(G);
    const std::uint64_t lo = b * cfg.samples / B;
    const std::uint64_t hi = (b + 1) * cfg.samples / B;
    for (std::uint64_t i = lo; i < hi; ++i) {
      const auto v = conditional_values(sample_gnp(sc, i), mom, grid);
      out.w_samples[i] = v.W;
      st.a1 += v.a1;
      st.a32 += v.a32;
      st.a33 += v.a33;
      for (std::size_t g = 0; g < G; ++g) {
        st.z2[g].add(v.z2[g]);
        st.z41[g].add(v.z41[g]);
        st.z42[g].add(v.z42[g]);
        st.z43[g].add(v.z43[g]);
      }
      ++st.count;
    }
  });

  BatchState pooled;
  pooled.z2.resize(G);
  pooled.z41.resize(G);
  pooled.z42.resize(G);
  pooled.z43.resize(G);
  CompensatedSum a1, a32, a33;
  std::vector<double> b1, b32, b33, b3, b41, b42, b43, b4;
  std::vector<std::vector<double>> b2t(G);
  std::vector<SupTerms> bsup;
  for (const auto& st : batches) {
    const double c = static_cast<double>(st.count);
    a1 += st.a1.value();
    a32 += st.a32.value();
    a33 += st.a33.value();
    b1.push_back(st.a1.value() / c);
    b32.push_back(st.a32.value() / c);
    b33.push_back(st.a33.value() / c);
    b3.push_back(0.5 * b1.back() + b32.back() + b33.back());
    for (std::size_t g = 0; g < G; ++g) {
      pooled.z2[g].merge(st.z2[g]);
      pooled.z41[g].merge(st.z41[g]);
      pooled.z42[g].merge(st.z42[g]);
      pooled.z43[g].merge(st.z43[g]);
    }
    const auto s = sup_terms(st, grid);
    for (std::size_t g = 0; g < G; ++g) b2t[g].push_back(s.r2_t[g]);
    b41.push_back(s.s41);
    b42.push_back(s.s42);
    b43.push_back(s.s43);
    b4.push_back(s.s41 + s.s42 + s.s43);
  }

  const auto S = cfg.samples;
  const double m = static_cast<double>(S);
  out.r1 = batch_estimate(a1.value() / m, b1, S);
  out.r31 = out.r1;
  out.r32 = batch_estimate(a32.value() / m, b32, S);
  out.r33 = batch_estimate(a33.value() / m, b33, S);
  out.r3 = batch_estimate(0.5 * out.r1.value + out.r32.value + out.r33.value, b3, S);

  const auto ps = sup_terms(pooled, grid);
  for (std::size_t g = 0; g < G; ++g) {
    out.r2_t.push_back(batch_estimate(ps.r2_t[g], b2t[g], S));
    out.r2_t.back().t = grid[g];
  }
  out.r2 = out.r2_t[ps.r2_arg];
  out.r41 = batch_estimate(ps.s41, b41, S);
  out.r42 = batch_estimate(ps.s42, b42, S);
  out.r43 = batch_estimate(ps.s43, b43, S);
  out.r4 = batch_estimate(ps.s41 + ps.s42 + ps.s43, b4, S);
  return out;
}

std::string to_string(RTildePolicy p) {
  return p == RTildePolicy::Estimate ? "estimate" : "theoretical";
}

BoundReport assemble_bound(int n, double p, const REstimates& est, RTildePolicy policy,
                           std::optional<double> r3_tilde) {
  const auto mom = exact_moments(n, p);
  BoundReport rep;
  rep.n = n;
  rep.p = p;
  rep.rates = regime_rates(n, p);
  rep.policy = policy;
  rep.r3_theory = r3_theoretical(n, p, mom.sigma);
  rep.r4_theory = r4_theoretical(n, p, mom.sigma);

  BoundInputs& in = rep.inputs;
  in.r1 = est.r1.value;
  in.r1_tilde = est.r1.value;
  in.r2 = est.r2.value;
  in.r3 = est.r3.value;
  in.r4 = est.r4.value;
  double tilde = r3_tilde.value_or(policy == RTildePolicy::Theoretical ? rep.r3_theory : in.r3);
  if (tilde < in.r3) {
    rep.warning = "r3~ = " + std::to_string(tilde) + " is below the r3 estimate " +
                  std::to_string(in.r3) + "; using the estimate";
    tilde = in.r3;
  }
  in.r3_tilde = tilde;
  rep.extended_bound = theorem2_bound(in, BoundForm::Extended);
  if (in.r1 > 0.0) rep.simple_bound = theorem2_bound(in, BoundForm::Simple);
  return rep;
}

}  // namespace trinorm

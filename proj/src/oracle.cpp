#include "trinorm/oracle.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <iterator>
#include <cmath>
#include <map>
#include <string>

#include "trinorm/errors.hpp"
#include "trinorm/moments.hpp"
#include "trinorm/special.hpp"

namespace trinorm {

namespace {

void require_oracle_size(int n, const char* who, int ceiling = kOracleMaxN) {
  if (n < 3) throw InputError(std::string(who) + ": n must be at least 3");
  if (n > ceiling) {
    throw CapacityError(std::string(who) + ": exhaustive enumeration supports n <= " +
                        std::to_string(ceiling) + ", got " + std::to_string(n));
  }
}

// Probability of a graph with k edges out of m, for k = 0..m.
std::vector<double> popcount_weights(int m, double p) {
  std::vector<double> w(static_cast<std::size_t>(m) + 1);
  for (int k = 0; k <= m; ++k) {
    double lw = 0.0;
    if (k > 0) lw += k * std::log(p);
    if (m - k > 0) lw += (m - k) * std::log1p(-p);
    w[static_cast<std::size_t>(k)] = std::exp(lw);
  }
  return w;
}

template <class Fn>
void enumerate_masks(int n, double p, Fn&& fn) {
  const int m = static_cast<int>(num_edges(n));
  const auto weights = popcount_weights(m, p);
  const std::uint64_t total = std::uint64_t{1} << m;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    fn(mask, weights[static_cast<std::size_t>(std::popcount(mask))]);
  }
}

// Index sets straight from the definitions, independent of neighborhood().
struct Structure {
  int n = 0;
  double p = 0.0;
  std::vector<TripleId> triples;
  std::vector<std::array<std::uint64_t, 3>> edge_ranks;
  std::vector<std::vector<std::size_t>> nbr;  // nu_v as indices into `triples`
  // Pairs (v, w) with w in nu_v, and the index set of nu_v ∪ nu_w.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<std::vector<std::size_t>> pair_union;
  double var_X = 0.0;
  double cov2 = 0.0;
  double sigma = 0.0;
  double p3 = 0.0;

  Structure(int n_, double p_, bool with_pairs) : n(n_), p(p_) {
    triples = all_triples(n);
    for (const auto& t : triples) {
      const auto e = t.edges();
      edge_ranks.push_back({edge_rank(e[0], n), edge_rank(e[1], n), edge_rank(e[2], n)});
    }
    nbr.resize(triples.size());
    for (std::size_t i = 0; i < triples.size(); ++i) {
      for (std::size_t j = 0; j < triples.size(); ++j) {
        if (triples[i].overlap(triples[j]) >= 2) nbr[i].push_back(j);
      }
    }
    if (with_pairs) {
      for (std::size_t i = 0; i < triples.size(); ++i) {
        for (std::size_t j : nbr[i]) {
          pairs.emplace_back(i, j);
          std::vector<std::size_t> u;
          std::set_union(nbr[i].begin(), nbr[i].end(), nbr[j].begin(), nbr[j].end(),
                         std::back_inserter(u));
          pair_union.push_back(std::move(u));
        }
      }
    }
    const auto mom = exact_moments(n, p);
    var_X = mom.var_X;
    cov2 = mom.cov_overlap2;
    sigma = mom.sigma;
    p3 = p * p * p;
  }

  double pair_sigma(std::size_t k) const {
    return pairs[k].first == pairs[k].second ? var_X : cov2;
  }
};

// Per-graph centred indicators and local sums by direct summation.
struct Field {
  std::vector<double> X;
  std::vector<double> Y;      // Y_v
  std::vector<double> Ypair;  // Y_{v,w}, aligned with Structure::pairs
  double W = 0.0;

  void fill(const Structure& s, std::uint64_t mask, bool with_pairs) {
    const std::size_t N = s.triples.size();
    X.resize(N);
    CompensatedSum total;
    for (std::size_t i = 0; i < N; ++i) {
      const auto& r = s.edge_ranks[i];
      const bool closed = ((mask >> r[0]) & 1u) && ((mask >> r[1]) & 1u) && ((mask >> r[2]) & 1u);
      X[i] = (closed ? 1.0 : 0.0) - s.p3;
      total += X[i];
    }
    W = total.value() / s.sigma;
    Y.assign(N, 0.0);
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t j : s.nbr[i]) Y[i] += X[j];
    }
    if (with_pairs) {
      Ypair.assign(s.pairs.size(), 0.0);
      for (std::size_t k = 0; k < s.pairs.size(); ++k) {
        for (std::size_t j : s.pair_union[k]) Ypair[k] += X[j];
      }
    }
  }
};

// Weighted mean and central second moment of a complex variable (West).
class WeightedMoments {
 public:
  void add(double w, Complex x) {
    if (w <= 0.0) return;
    wsum_ += w;
    const Complex d = x - mean_;
    mean_ += (w / wsum_) * d;
    m2_ += w * (d * std::conj(x - mean_)).real();
  }
  Complex mean() const { return mean_; }
  double variance() const { return wsum_ > 0.0 ? std::max(0.0, m2_ / wsum_) : 0.0; }

 private:
  double wsum_ = 0.0;
  Complex mean_{};
  double m2_ = 0.0;
};

Complex cis(double x) { return {std::cos(x), std::sin(x)}; }

}  // namespace

void for_each_graph(int n, double p, const std::function<void(const Graph&, double)>& fn) {
  require_oracle_size(n, "for_each_graph");
  require_probability(p);
  enumerate_masks(n, p, [&](std::uint64_t mask, double w) { fn(Graph::from_mask(n, mask), w); });
}

double ExactDistribution::mean() const {
  CompensatedSum s;
  for (const auto& [k, pr] : atoms) s += static_cast<double>(k) * pr;
  return s.value();
}

double ExactDistribution::variance() const {
  const double mu = mean();
  CompensatedSum s;
  for (const auto& [k, pr] : atoms) {
    const double d = static_cast<double>(k) - mu;
    s += d * d * pr;
  }
  return s.value();
}

ExactDistribution enumerate_distribution(int n, double p) {
  require_oracle_size(n, "enumerate_distribution");
  require_probability(p);
  const Structure s(n, p, false);
  std::map<std::int64_t, CompensatedSum> mass;
  enumerate_masks(n, p, [&](std::uint64_t mask, double w) {
    std::int64_t t = 0;
    for (const auto& r : s.edge_ranks) {
      t += ((mask >> r[0]) & (mask >> r[1]) & (mask >> r[2]) & 1u) ? 1 : 0;
    }
    mass[t] += w;
  });
  ExactDistribution d;
  d.n = n;
  d.p = p;
  for (const auto& [k, acc] : mass) d.atoms.emplace_back(k, acc.value());
  return d;
}

Complex exact_expectation(int n, double p, const std::function<Complex(const Graph&)>& h) {
  CompensatedComplexSum acc;
  for_each_graph(n, p, [&](const Graph& g, double w) { acc += w * h(g); });
  return acc.value();
}

double kolmogorov_distance_discrete(std::span<const std::pair<double, double>> atoms) {
  if (atoms.empty()) throw InputError("kolmogorov_distance_discrete: no atoms");
  double cdf = 0.0;
  double worst = 0.0;
  for (const auto& [x, pr] : atoms) {
    const double phi = normal_cdf(x);
    worst = std::max(worst, std::abs(phi - cdf));  // left limit
    cdf += pr;
    worst = std::max(worst, std::abs(cdf - phi));
  }
  return worst;
}

double exact_dk(int n, double p) {
  const auto dist = enumerate_distribution(n, p);
  const auto mom = exact_moments(n, p);
  std::vector<std::pair<double, double>> atoms;
  for (const auto& [k, pr] : dist.atoms) {
    atoms.emplace_back((static_cast<double>(k) - mom.mean_T) / mom.sigma, pr);
  }
  return kolmogorov_distance_discrete(atoms);
}

OdeCheck exact_chf_ode(int n, double p, double t, BoundForm form) {
  require_oracle_size(n, "exact_chf_ode");
  require_probability(p);
  const bool extended = form == BoundForm::Extended;
  const Structure s(n, p, extended);
  const double sg = s.sigma;
  Field f;

  // First pass: means of the graph-conditional terms.
  CompensatedComplexSum phi, wphi, z2m, z41m, z42m, z43m;
  const auto conditional = [&](const Field& fd, Complex& c2, Complex& c41, Complex& c42,
                               Complex& c43) {
    CompensatedComplexSum a2, a41;
    for (std::size_t i = 0; i < fd.X.size(); ++i) {
      const double u = -t * fd.Y[i] / sg;
      const Complex e = cis(u) - 1.0;
      a2 += fd.X[i] * e;
      a41 += fd.X[i] * (e - Complex(0.0, u));
    }
    c2 = -a2.value() / sg;
    c41 = -a41.value() / sg;
    if (extended) {
      CompensatedComplexSum a42, a43;
      for (std::size_t k = 0; k < s.pairs.size(); ++k) {
        const Complex e = cis(-t * fd.Ypair[k] / sg) - 1.0;
        a42 += fd.X[s.pairs[k].first] * fd.X[s.pairs[k].second] * e;
        a43 += s.pair_sigma(k) * e;
      }
      c42 = a42.value() / (sg * sg);
      c43 = a43.value() / (sg * sg);
    }
  };

  enumerate_masks(n, p, [&](std::uint64_t mask, double w) {
    f.fill(s, mask, extended);
    const Complex e = cis(t * f.W);
    phi += w * e;
    wphi += w * f.W * e;
    Complex c2, c41, c42, c43;
    conditional(f, c2, c41, c42, c43);
    z2m += w * c2;
    z41m += w * c41;
    z42m += w * c42;
    z43m += w * c43;
  });
  const Complex m2 = z2m.value();
  const Complex m41 = z41m.value();
  const Complex m42 = z42m.value();
  const Complex m43 = z43m.value();

  // Second pass: centred covariances with e^{itW}.
  CompensatedComplexSum b2, b41, b42, b43;
  enumerate_masks(n, p, [&](std::uint64_t mask, double w) {
    f.fill(s, mask, extended);
    const Complex e = cis(t * f.W);
    Complex c2, c41, c42, c43;
    conditional(f, c2, c41, c42, c43);
    b2 += w * (c2 - m2) * e;
    if (extended) {
      b41 += w * (c41 - m41) * e;
      b42 += w * (c42 - m42) * e;
      b43 += w * (c43 - m43) * e;
    }
  });

  OdeCheck out;
  out.t = t;
  out.phi = phi.value();
  out.phi_prime = Complex(0.0, 1.0) * wphi.value();
  const Complex I(0.0, 1.0);
  if (t == 0.0) {
    out.a_t = 0.0;
    out.b_t = 0.0;
  } else if (!extended) {
    out.a_t = m41 / (I * t);
    out.b_t = I * b2.value();
  } else {
    // G D is traded for G D~ and S, so only the remainder term keeps its
    // covariance with e^{itW}.
    out.a_t = m41 / (I * t) - m42 + m43;
    out.b_t = I * b41.value() + t * b42.value() - t * b43.value();
  }
  // limiting convention at t = 0, where phi' = i E W vanishes exactly
  out.residual = t == 0.0 ? 0.0 : std::abs(out.phi_prime + t * (1.0 + out.a_t) * out.phi - out.b_t);
  return out;
}

std::vector<TestFunction> test_function_family(std::span<const double> fourier_t) {
  std::vector<TestFunction> fam{
      {"1", [](double) { return Complex(1.0); }},
      {"x", [](double x) { return Complex(x); }},
      {"x^2", [](double x) { return Complex(x * x); }},
      {"sin", [](double x) { return Complex(std::sin(x)); }},
  };
  for (double t : fourier_t) {
    fam.push_back({"exp(i*" + std::to_string(t) + "*x)", [t](double x) { return cis(t * x); }});
  }
  return fam;
}

double CouplingResiduals::max_residual() const {
  double m = std::max({conditional_gd, std::abs(mean_S - 1.0), std::abs(mean_S_analytic - 1.0),
                       std::abs(mean_GD - 1.0)});
  for (const auto& [name, r] : stein) m = std::max(m, r);
  for (const auto& [name, r] : weak_extended) m = std::max(m, r);
  return m;
}

CouplingResiduals verify_couplings(int n, double p, std::span<const TestFunction> family) {
  require_oracle_size(n, "verify_couplings", kOracleCouplingMaxN);
  require_probability(p);
  const Structure s(n, p, true);
  const double sg = s.sigma;
  const double s2 = sg * sg;
  Field f;

  std::vector<CompensatedComplexSum> lhs(family.size()), rhs(family.size()), weak(family.size());
  CompensatedSum gd;
  double worst_gd = 0.0;

  enumerate_masks(n, p, [&](std::uint64_t mask, double w) {
    f.fill(s, mask, true);
    // E[G D | g] over V and E[G D~ | g] over (V, V').
    CompensatedSum cgd, cgdt;
    for (std::size_t i = 0; i < f.X.size(); ++i) cgd += f.X[i] * f.Y[i];
    for (const auto& [i, j] : s.pairs) cgdt += f.X[i] * f.X[j];
    worst_gd = std::max(worst_gd, std::abs(cgdt.value() - cgd.value()) / s2);
    gd += w * cgd.value() / s2;

    for (std::size_t q = 0; q < family.size(); ++q) {
      const auto& h = family[q].f;
      const Complex fw = h(f.W);
      CompensatedComplexSum st;
      for (std::size_t i = 0; i < f.X.size(); ++i) st += f.X[i] * (h(f.W - f.Y[i] / sg) - fw);
      lhs[q] += w * (-st.value() / sg);
      rhs[q] += w * f.W * fw;
      CompensatedComplexSum wk;
      for (std::size_t k = 0; k < s.pairs.size(); ++k) {
        const double xx = f.X[s.pairs[k].first] * f.X[s.pairs[k].second];
        wk += (xx - s.pair_sigma(k)) * h(f.W - f.Ypair[k] / sg);
      }
      weak[q] += w * wk.value() / s2;
    }
  });

  CouplingResiduals out;
  for (std::size_t q = 0; q < family.size(); ++q) {
    out.stein.emplace_back(family[q].name, std::abs(lhs[q].value() - rhs[q].value()));
    out.weak_extended.emplace_back(family[q].name, std::abs(weak[q].value()));
  }
  out.conditional_gd = worst_gd;
  out.mean_GD = gd.value();

  // E S: S = C(n,3)|nu| sigma_{V,V'} / sigma^2 averaged over V and V' in nu_V.
  const double N = static_cast<double>(s.triples.size());
  CompensatedSum es;
  for (std::size_t k = 0; k < s.pairs.size(); ++k) {
    const double nu = static_cast<double>(s.nbr[s.pairs[k].first].size());
    es += (1.0 / N) * (1.0 / nu) * N * nu * s.pair_sigma(k) / s2;
  }
  out.mean_S = es.value();
  out.mean_S_analytic = N * (s.var_X + 3.0 * (n - 3) * s.cov2) / s2;
  return out;
}

ExactRTerms exact_r_terms(int n, double p, std::span<const double> t_grid) {
  require_oracle_size(n, "exact_r_terms", kOracleCouplingMaxN);
  require_probability(p);
  for (double t : t_grid) {
    if (!(t > 0.0)) throw InputError("exact_r_terms: t grid must be positive");
  }
  const Structure s(n, p, true);
  const double sg = s.sigma;
  const double s2 = sg * sg;
  const double s3 = s2 * sg;
  const std::size_t G = t_grid.size();
  Field f;

  CompensatedSum r1, r32, r33;
  std::vector<WeightedMoments> v2(G), v41(G), v42(G), v43(G);

  enumerate_masks(n, p, [&](std::uint64_t mask, double w) {
    f.fill(s, mask, true);
    CompensatedSum a1, a32, a33;
    for (std::size_t i = 0; i < f.X.size(); ++i) a1 += std::abs(f.X[i]) * f.Y[i] * f.Y[i];
    for (std::size_t k = 0; k < s.pairs.size(); ++k) {
      const double y = std::abs(f.Ypair[k]);
      a32 += std::abs(f.X[s.pairs[k].first] * f.X[s.pairs[k].second]) * y;
      a33 += s.pair_sigma(k) * y;
    }
    r1 += w * a1.value() / s3;
    r32 += w * a32.value() / s3;
    r33 += w * a33.value() / s3;

    for (std::size_t g = 0; g < G; ++g) {
      const double t = t_grid[g];
      CompensatedComplexSum c2, c41, c42, c43;
      for (std::size_t i = 0; i < f.X.size(); ++i) {
        const double u = -t * f.Y[i] / sg;
        const Complex e = cis(u) - 1.0;
        c2 += f.X[i] * e;
        c41 += f.X[i] * (e - Complex(0.0, u));
      }
      for (std::size_t k = 0; k < s.pairs.size(); ++k) {
        const Complex e = cis(-t * f.Ypair[k] / sg) - 1.0;
        c42 += f.X[s.pairs[k].first] * f.X[s.pairs[k].second] * e;
        c43 += s.pair_sigma(k) * e;
      }
      v2[g].add(w, -c2.value() / sg);
      v41[g].add(w, -c41.value() / sg);
      v42[g].add(w, c42.value() / s2);
      v43[g].add(w, c43.value() / s2);
    }
  });

  ExactRTerms out;
  out.n = n;
  out.p = p;
  out.r1 = r1.value();
  out.r32 = r32.value();
  out.r33 = r33.value();
  out.r3 = 0.5 * out.r1 + out.r32 + out.r33;
  out.t_grid.assign(t_grid.begin(), t_grid.end());
  double sup41 = 0.0, sup42 = 0.0, sup43 = 0.0;
  for (std::size_t g = 0; g < G; ++g) {
    const double t = t_grid[g];
    out.var2.push_back(v2[g].variance());
    out.var41.push_back(v41[g].variance());
    out.var42.push_back(v42[g].variance());
    out.var43.push_back(v43[g].variance());
    out.r2_t.push_back(std::sqrt(out.var2.back()) / t);
    out.r2 = std::max(out.r2, out.r2_t.back());
    sup41 = std::max(sup41, std::sqrt(out.var41.back()) / (t * t));
    sup42 = std::max(sup42, std::sqrt(out.var42.back()) / t);
    sup43 = std::max(sup43, std::sqrt(out.var43.back()) / t);
  }
  out.r4 = sup41 + sup42 + sup43;
  return out;
}

}  // namespace trinorm

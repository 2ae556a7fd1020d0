#include "trinorm/moments.hpp"

#include <cmath>

#include "trinorm/errors.hpp"
#include "trinorm/graph.hpp"

namespace trinorm {

MomentReport exact_moments(int n, double p) {
  if (n < 3) throw InputError("exact_moments: n must be at least 3");
  require_probability(p);
  const double triples = static_cast<double>(num_triples(n));
  const double p3 = p * p * p;
  MomentReport r;
  r.n = n;
  r.p = p;
  r.mean_T = triples * p3;
  r.var_X = p3 * (1.0 - p3);
  r.cov_overlap2 = p3 * p * p * (1.0 - p);
  // Factored form keeps full relative precision as p -> 1.
  r.var_T = triples * p3 * (1.0 - p) * (1.0 + p + p * p + 3.0 * (n - 3) * p * p);
  r.sigma = std::sqrt(r.var_T);
  return r;
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::Dense: return "dense";
    case Regime::Middle: return "middle";
    case Regime::Sparse: return "sparse";
  }
  return "unknown";
}

Regime classify_regime(int n, double p) {
  if (p > 0.5) return Regime::Dense;
  if (p > 1.0 / std::sqrt(static_cast<double>(n))) return Regime::Middle;
  return Regime::Sparse;
}

RegimeRates regime_rates(int n, double p) {
  if (n < 3) throw InputError("regime_rates: n must be at least 3");
  require_probability(p);
  const double nn = n;
  RegimeRates r;
  r.regime = classify_regime(n, p);
  switch (r.regime) {
    case Regime::Dense:
      r.s2 = std::pow(nn, 4) * (1.0 - p);
      r.thm1_rate = 1.0 / (nn * std::sqrt(1.0 - p));
      break;
    case Regime::Middle:
      r.s2 = std::pow(nn, 4) * std::pow(p, 5);
      r.thm1_rate = 1.0 / (nn * std::sqrt(p));
      break;
    case Regime::Sparse:
      r.s2 = std::pow(nn * p, 3);
      r.thm1_rate = std::pow(nn * p, -1.5);
      break;
  }
  r.wasserstein_rate = r.thm1_rate;
  return r;
}

double dk_from_dw(double dw) {
  if (!(dw >= 0.0)) throw InputError("dk_from_dw: Wasserstein distance must be nonnegative");
  return std::sqrt(dw);
}

ProxyReport proxy_exact(int n, double p) {
  if (n < 4) throw InputError("proxy_exact: n must be at least 4");
  require_probability(p);
  const double p3 = p * p * p;
  const double q = p * p;
  const double triples = static_cast<double>(num_triples(n));
  const double pairs = static_cast<double>(num_edges(n));
  ProxyReport r;
  r.n = n;
  r.p = p;
  r.mean_Y = triples * p3;

  // Ordered pairs of distinct triples owning the same pair indicator: the pair
  // (i,j) owns the n-1-j triples {i,j,k} with k > j.
  double shared = 0.0;
  for (int j = 1; j < n; ++j) {
    const double c = n - 1 - j;
    shared += j * c * (c - 1.0);
  }
  r.var_Y = triples * p3 * (1.0 - p3) + shared * q * p3 * (1.0 - p);
  r.var_Y_display = triples * (p3 * std::pow(1.0 - p, 3) + (n - 3) * q * p3 * (1.0 - p));

  const int k = n - 2;
  const double center = k * p3;
  r.mean_Y_iid = pairs * center;
  const double mean_s = k * q;
  const double second_s = k * q * (1.0 - q) + mean_s * mean_s;
  r.var_Y_iid = pairs * (p * second_s - p * p * mean_s * mean_s);

  double moment = 0.0;
  for (int j = 0; j <= k; ++j) {
    const double log_pmf = std::lgamma(k + 1.0) - std::lgamma(j + 1.0) - std::lgamma(k - j + 1.0) +
                           j * std::log(q) + (k - j) * std::log1p(-q);
    moment += std::exp(log_pmf) * std::pow(std::abs(j - center), 3);
  }
  r.gamma = (1.0 - p) * center * center * center + p * moment;
  r.be_bound = static_cast<double>(n) * n * r.gamma / std::pow(r.var_Y_iid, 1.5);
  return r;
}

}  // namespace trinorm

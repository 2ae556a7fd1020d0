#pragma once

#include <string>

namespace trinorm {

// Exact first and second moments of the triangle count T in G(n,p).
struct MomentReport {
  int n = 0;
  double p = 0.0;
  double mean_T = 0.0;
  double var_T = 0.0;
  double sigma = 0.0;
  double var_X = 0.0;         // Var X_v = p^3 (1 - p^3)
  double cov_overlap2 = 0.0;  // Cov(X_v, X_w) for |v ∩ w| = 2, = p^5 (1 - p)
};

MomentReport exact_moments(int n, double p);

enum class Regime { Dense, Middle, Sparse };

std::string to_string(Regime r);

// Regime boundaries: dense p > 1/2, middle n^{-1/2} < p <= 1/2, sparse otherwise.
Regime classify_regime(int n, double p);

// Rates with the universal constant set to 1.
struct RegimeRates {
  Regime regime = Regime::Dense;
  double s2 = 0.0;                // order of Var T
  double thm1_rate = 0.0;         // Kolmogorov rate
  double wasserstein_rate = 0.0;  // same shape as the Kolmogorov rate
};

RegimeRates regime_rates(int n, double p);

// d_K <= sqrt(d_W).
double dk_from_dw(double dw);

// Independent proxy model with the same mean and variance order as T.
struct ProxyReport {
  int n = 0;
  double p = 0.0;
  double mean_Y = 0.0;           // literal model: C(n,3) p^3
  double var_Y = 0.0;            // literal model, exact pair counting
  double var_Y_display = 0.0;    // C(n,3)(p^3(1-p)^3 + (n-3) p^5 (1-p)), for comparison
  double mean_Y_iid = 0.0;       // i.i.d.-decomposable model: C(n,2)(n-2) p^3
  double var_Y_iid = 0.0;        // C(n,2) * Var(I_12 * Bin(n-2, p^2))
  double gamma = 0.0;            // E|I_12 sum_k I_12k - (n-2) p^3|^3
  double be_bound = 0.0;         // n^2 gamma / s^3 with s^2 = var_Y_iid
};

ProxyReport proxy_exact(int n, double p);

}  // namespace trinorm

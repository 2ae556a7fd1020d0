#pragma once

// Exhaustive enumeration of all 2^C(n,2) graphs on n <= 7 vertices with their
// exact G(n,p) weights. Every quantity here is computed from definitions
// (neighbourhoods by filtering all triples, indicators by direct edge lookup)
// so it can serve as an independent oracle for the fast Monte Carlo paths.

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "trinorm/bounds.hpp"
#include "trinorm/graph.hpp"

namespace trinorm {

using Complex = std::complex<double>;

inline constexpr int kOracleMaxN = 7;
// Ceiling for the pair-level checks, which cost O(n^5) per graph.
inline constexpr int kOracleCouplingMaxN = 6;

struct ExactDistribution {
  int n = 0;
  double p = 0.0;
  std::vector<std::pair<std::int64_t, double>> atoms;  // (triangle count, probability), sorted

  double mean() const;
  double variance() const;
};

// Calls fn(g, weight) for every graph on n vertices; weights sum to one.
void for_each_graph(int n, double p, const std::function<void(const Graph&, double)>& fn);

ExactDistribution enumerate_distribution(int n, double p);

Complex exact_expectation(int n, double p, const std::function<Complex(const Graph&)>& h);

// sup_x |F(x) - Phi(x)| for a discrete law given as (location, probability)
// atoms sorted by location.
double kolmogorov_distance_discrete(std::span<const std::pair<double, double>> atoms);

// Exact d_K between the standardised triangle count and the standard normal.
double exact_dk(int n, double p);

// phi' = -t(1 + a) phi + b, decomposed with the Stein coupling.
struct OdeCheck {
  double t = 0.0;
  Complex phi;
  Complex phi_prime;
  Complex a_t;
  Complex b_t;
  double residual = 0.0;  // |phi' + t(1 + a) phi - b|
};

// form = Simple uses (G, D); Extended additionally uses (D~, S, D').
OdeCheck exact_chf_ode(int n, double p, double t, BoundForm form = BoundForm::Simple);

struct TestFunction {
  std::string name;
  std::function<Complex(double)> f;
};

// {1, x, x^2, sin x} followed by e^{itx} for each t.
std::vector<TestFunction> test_function_family(std::span<const double> fourier_t = {});

struct CouplingResiduals {
  // E{G f(W') - G f(W)} - E{W f(W)} per test function.
  std::vector<std::pair<std::string, double>> stein;
  // max over graphs of |E[G D~ | g] - E[G D | g]|.
  double conditional_gd = 0.0;
  double mean_S = 0.0;           // by enumeration over (V, V')
  double mean_S_analytic = 0.0;  // C(n,3)(Var X + 3(n-3) Cov_2) / sigma^2
  double mean_GD = 0.0;          // E[G D], equals E W^2 = 1
  // E[(G D~ - S) h(W'')] per test function.
  std::vector<std::pair<std::string, double>> weak_extended;

  double max_residual() const;
};

CouplingResiduals verify_couplings(int n, double p, std::span<const TestFunction> family);

struct ExactRTerms {
  int n = 0;
  double p = 0.0;
  double r1 = 0.0;   // E|G D^2|, also r_{3,1}
  double r32 = 0.0;  // E|G D~ D'|
  double r33 = 0.0;  // E|S D'|
  double r3 = 0.0;   // r1/2 + r32 + r33
  std::vector<double> t_grid;
  // Graph-conditional variances of G(e^{itD}-1), G(e^{itD}-1-itD),
  // G D~(e^{itD'}-1) and S(e^{itD'}-1), one entry per t.
  std::vector<double> var2, var41, var42, var43;
  std::vector<double> r2_t;  // sqrt(var2)/|t|
  double r2 = 0.0;           // sup over the grid
  double r4 = 0.0;           // sup sqrt(var41)/t^2 + sup sqrt(var42)/|t| + sup sqrt(var43)/|t|
};

ExactRTerms exact_r_terms(int n, double p, std::span<const double> t_grid);

}  // namespace trinorm

#include "trinorm/special.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "trinorm/errors.hpp"

namespace trinorm {

namespace {

// exp(-x^2) * sum_k x^(2k+1) / (k! (2k+1)); every term is positive, so the
// sum is accurate to a few ulps wherever exp(x^2) is representable.
double dawson_series(double x) {
  const double x2 = x * x;
  double term = x;  // x^(2k+1) / k!
  double sum = x;
  for (int k = 1; k < 2000; ++k) {
    term *= x2 / k;
    const double add = term / (2 * k + 1);
    sum += add;
    if (add < sum * 1e-17) break;
  }
  return std::exp(-x2) * sum;
}

// F(x) ~ 1/(2x) * sum_k (2k-1)!! / (2x^2)^k, truncated at its smallest term.
double dawson_asymptotic(double x) {
  const double y = 1.0 / (2.0 * x * x);
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double next = term * (2 * k - 1) * y;
    if (next >= term) break;
    term = next;
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum / (2.0 * x);
}

}  // namespace

double dawson(double x) {
  if (!std::isfinite(x)) {
    if (std::isnan(x)) return x;
    return 0.0;
  }
  const double ax = std::abs(x);
  const double f = ax < 6.5 ? dawson_series(ax) : dawson_asymptotic(ax);
  return x < 0 ? -f : f;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double log_plus(double x) {
  if (!(x > 0.0)) throw InputError("log_plus requires a positive argument, got " + std::to_string(x));
  return std::max(std::log(x), 0.0);
}

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  if (a == b) return 0.0;
  double err = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, 20, rel_tol, &err);
  if (!std::isfinite(v)) throw NumericError("quadrature produced a non-finite value");
  return v;
}

}  // namespace trinorm

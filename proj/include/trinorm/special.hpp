#pragma once

#include <cmath>
#include <complex>
#include <functional>

namespace trinorm {

// Dawson's function F(x) = exp(-x^2) * integral_0^x exp(u^2) du.
double dawson(double x);

// Standard normal distribution function, via erfc for tail accuracy.
double normal_cdf(double x);

// max(ln x, 0); throws InputError for x <= 0.
double log_plus(double x);

// Adaptive Gauss-Kronrod quadrature of a real integrand on [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-12);

// Neumaier-compensated running sum of doubles; error stays O(eps) regardless
// of the number of terms.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    comp_ += (std::abs(sum_) >= std::abs(x)) ? (sum_ - t) + x : (x - t) + sum_;
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

class CompensatedComplexSum {
 public:
  CompensatedComplexSum& operator+=(std::complex<double> z) {
    re_.add(z.real());
    im_.add(z.imag());
    return *this;
  }
  std::complex<double> value() const { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum re_;
  CompensatedSum im_;
};

}  // namespace trinorm

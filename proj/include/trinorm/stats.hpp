#pragma once

// Complex variance and covariance with the conjugate-linear convention
// Var X = E{(X - EX)(X - EX)*}, Cov(X, Y) = E{(X - EX)(Y - EY)*}.

#include <complex>
#include <span>
#include <utility>

namespace trinorm {

using Complex = std::complex<double>;

struct ComplexStats {
  double var_U = 0.0;
  Complex cov_UV{};
};

// Population (1/m) moments of the empirical law of the pairs.
ComplexStats complex_stats(std::span<const std::pair<Complex, Complex>> samples);

// Same moments for a finite probability space; weights must sum to one.
ComplexStats complex_stats(std::span<const std::pair<Complex, Complex>> values,
                           std::span<const double> weights);

}  // namespace trinorm

#include "trinorm/stats.hpp"

#include <cmath>
#include <vector>

#include "trinorm/errors.hpp"
#include "trinorm/special.hpp"

namespace trinorm {

ComplexStats complex_stats(std::span<const std::pair<Complex, Complex>> samples) {
  if (samples.empty()) throw InputError("complex_stats: empty sample");
  const std::vector<double> w(samples.size(), 1.0 / static_cast<double>(samples.size()));
  return complex_stats(samples, w);
}

ComplexStats complex_stats(std::span<const std::pair<Complex, Complex>> values,
                           std::span<const double> weights) {
  if (values.empty()) throw InputError("complex_stats: empty sample");
  if (values.size() != weights.size()) throw InputError("complex_stats: weight count mismatch");
  CompensatedComplexSum mu, mv;
  for (std::size_t i = 0; i < values.size(); ++i) {
    mu += weights[i] * values[i].first;
    mv += weights[i] * values[i].second;
  }
  const Complex eu = mu.value();
  const Complex ev = mv.value();
  CompensatedSum var;
  CompensatedComplexSum cov;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const Complex du = values[i].first - eu;
    const Complex dv = values[i].second - ev;
    var += weights[i] * std::norm(du);
    cov += weights[i] * du * std::conj(dv);
  }
  return {var.value(), cov.value()};
}

}  // namespace trinorm

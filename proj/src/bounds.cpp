#include "trinorm/bounds.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "trinorm/errors.hpp"
#include "trinorm/graph.hpp"
#include "trinorm/moments.hpp"
#include "trinorm/special.hpp"

namespace trinorm {

namespace {

constexpr double kPi = std::numbers::pi;

void require_nonnegative(double x, const char* name) {
  if (!(x >= 0.0)) throw PreconditionError(std::string(name) + " must be nonnegative");
}

}  // namespace

double esseen_tail_constant() { return 24.0 / (kPi * std::sqrt(2.0 * kPi)); }

double lemma2_bound(const Lemma2Params& q) {
  require_nonnegative(q.A0, "A0");
  require_nonnegative(q.A1, "A1");
  require_nonnegative(q.B0, "B0");
  require_nonnegative(q.B1, "B1");
  require_nonnegative(q.B2, "B2");
  if (!(q.A0 < 0.5)) throw PreconditionError("lemma2_bound: A0 must be below 1/2");
  if (!(q.t > 0.0)) throw PreconditionError("lemma2_bound: t must be positive");
  const double threshold = 2.0 * q.A1 / (1.0 - 2.0 * q.A0);
  if (q.t < threshold) {
    throw PreconditionError("lemma2_bound: t = " + std::to_string(q.t) +
                            " is below the threshold 2 A1 / (1 - 2 A0) = " +
                            std::to_string(threshold));
  }
  return 2.0 / kPi * q.A0 + 4.0 / (3.0 * std::sqrt(kPi)) * q.A1 + std::sqrt(kPi) / 2.0 * q.B0 +
         2.0 / kPi * q.B1 * (1.0 + 2.0 * log_plus(1.0 / (2.0 * q.t))) + 4.0 / kPi * q.B2 / q.t +
         esseen_tail_constant() * q.t;
}

double theorem2_bound(const BoundInputs& in, BoundForm form) {
  if (form == BoundForm::Simple) {
    require_nonnegative(in.r1, "r1");
    require_nonnegative(in.r2, "r2");
    if (!(in.r1_tilde > 0.0)) throw PreconditionError("theorem2_bound: r1~ must be positive");
    if (in.r1_tilde < in.r1) throw PreconditionError("theorem2_bound: r1~ must be at least r1");
    return 0.38 * in.r1 + 3.05 * in.r1_tilde +
           0.64 * in.r2 * (1.0 + 2.0 * log_plus(1.0 / (2.0 * in.r1_tilde)));
  }
  require_nonnegative(in.r3, "r3");
  require_nonnegative(in.r4, "r4");
  if (!(in.r3_tilde > 0.0)) throw PreconditionError("theorem2_bound: r3~ must be positive");
  if (in.r3_tilde < in.r3) throw PreconditionError("theorem2_bound: r3~ must be at least r3");
  return 0.76 * in.r3 + 6.10 * in.r3_tilde + 0.64 * in.r4 / in.r3_tilde;
}

double esseen_rhs(const std::function<std::complex<double>(double)>& chf, double T, int panels) {
  if (!(T > 0.0)) throw InputError("esseen_rhs: T must be positive");
  if (panels < 1) throw InputError("esseen_rhs: need at least one panel");
  constexpr double kWindow = 1e-6;
  const auto integrand = [&chf](double t) {
    const std::complex<double> z = chf(t);
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw NumericError("esseen_rhs: characteristic function is not finite at t = " +
                         std::to_string(t));
    }
    return std::abs(z - std::exp(-0.5 * t * t)) / std::abs(t);
  };
  double integral = 0.0;
  if (T > kWindow) {
    const double h = (T - kWindow) / panels;
    for (int k = 0; k < panels; ++k) {
      const double a = kWindow + k * h;
      const double b = k + 1 == panels ? T : a + h;
      integral += integrate(integrand, a, b);
      integral += integrate(integrand, -b, -a);
    }
  }
  return integral / kPi + esseen_tail_constant() / T;
}

double r3_theoretical(int n, double p, double sigma) {
  const double nn = n;
  const double s3 = sigma * sigma * sigma;
  switch (classify_regime(n, p)) {
    case Regime::Dense: return std::pow(nn, 5) * (1.0 - p) / s3;
    case Regime::Middle: return std::pow(nn, 5) * std::pow(p, 7) / s3;
    case Regime::Sparse: return std::pow(nn * p, 3) / s3;
  }
  return 0.0;
}

double r4_theoretical(int n, double p, double sigma) {
  const double nn = n;
  const double s3 = sigma * sigma * sigma;
  switch (classify_regime(n, p)) {
    case Regime::Dense: return std::pow(nn, 4) * std::sqrt(1.0 - p) / s3;
    case Regime::Middle: return std::pow(nn, 4) * std::pow(p, 6.5) / s3;
    case Regime::Sparse: return std::pow(nn * p, 1.5) / s3;
  }
  return 0.0;
}

}  // namespace trinorm

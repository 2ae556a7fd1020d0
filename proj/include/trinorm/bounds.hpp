#pragma once

// Explicit Kolmogorov-distance bound evaluators: the Esseen smoothing
// inequality, the characteristic-function ODE bound, and the two Stein
// coupling bounds (simple and extended form) built on it.

#include <complex>
#include <functional>

namespace trinorm {

// Constants of |a(t)| <= A0 + A1|t| and |b(t)| <= B0 + B1|t| + B2 t^2 for a
// characteristic function solving phi' = -t(1 + a) phi + b.
struct Lemma2Params {
  double A0 = 0.0;  // < 1/2
  double A1 = 0.0;
  double B0 = 0.0;
  double B1 = 0.0;
  double B2 = 0.0;
  double t = 1.0;  // >= 2 A1 / (1 - 2 A0)
};

double lemma2_bound(const Lemma2Params& params);

struct BoundInputs {
  double r1 = 0.0;
  double r1_tilde = 0.0;  // any value >= r1
  double r2 = 0.0;
  double r3 = 0.0;
  double r3_tilde = 0.0;  // any value >= r3
  double r4 = 0.0;
};

enum class BoundForm { Simple, Extended };

// Simple:   0.38 r1 + 3.05 r1~ + 0.64 r2 (1 + 2 log+(1 / (2 r1~)))
// Extended: 0.76 r3 + 6.10 r3~ + 0.64 r4 / r3~
double theorem2_bound(const BoundInputs& in, BoundForm form);

// (1/pi) int_{-T}^{T} |chf(t) - exp(-t^2/2)| / |t| dt + 24 / (pi sqrt(2 pi) T).
// The removable singularity at 0 is skipped with a symmetric 1e-6 window;
// `panels` equal sub-intervals per side are each integrated adaptively.
double esseen_rhs(const std::function<std::complex<double>(double)>& chf, double T,
                  int panels = 16);

// 24 / (pi sqrt(2 pi)): tail constant of the smoothing inequality.
double esseen_tail_constant();

// Right-hand sides of the r3 and r4 regime bounds for the triangle coupling,
// constant set to 1. sigma is the exact standard deviation of T.
double r3_theoretical(int n, double p, double sigma);
double r4_theoretical(int n, double p, double sigma);

}  // namespace trinorm

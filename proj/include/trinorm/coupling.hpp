#pragma once

// Monte Carlo Stein coupling for the triangle count: single draws of
// (V, V', G, D, D~, D', S), exact per-graph inner expectations over (V, V'),
// batch-means estimators for the r-terms and assembly of the Kolmogorov bound.

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trinorm/bounds.hpp"
#include "trinorm/graph.hpp"
#include "trinorm/moments.hpp"
#include "trinorm/sampler.hpp"

namespace trinorm {

using Complex = std::complex<double>;

struct CouplingDraw {
  Graph graph;
  TripleId V;
  TripleId Vp;
  double W = 0.0, Wp = 0.0, Wpp = 0.0;
  double G = 0.0, D = 0.0, Dtilde = 0.0, Dprime = 0.0, S = 0.0;
};

// V uniform on all triples, V' uniform on nu_V (V included).
CouplingDraw draw_coupling(const Graph& g, double p, double sigma, CounterRng& rng);

// (e^{ix} - 1 - ix)/x with value 0 at 0; Lipschitz constant 1/2.
Complex kernel_phi(double x);
// e^{ix} - 1; Lipschitz constant 1.
Complex kernel_psi(double x);

// Counts of closed triples in nu_v and nu_v ∪ nu_w for every v and w in nu_v,
// bucketed by the count and by how many of v, w are closed. Y values are
// count - size * p^3, so these histograms determine every per-graph average.
struct LocalSumProfile {
  int n = 0;
  std::int64_t nu = 0;          // |nu_v| = 3(n-3) + 1
  std::int64_t pair_size = 0;   // |nu_v ∪ nu_w| = 2|nu| - n for w != v
  std::uint64_t triangles = 0;
  std::array<std::vector<std::int64_t>, 2> single;  // [closed(v)][count in nu_v]
  std::array<std::vector<std::int64_t>, 3> cross;   // [closed(v)+closed(w)][count in union], w != v
};

LocalSumProfile local_sum_profile(const Graph& g);

enum class ConditionalTerm { R2, R41, R42, R43 };

// Graph-conditional inner expectations, all t of the grid at once.
struct ConditionalValues {
  double W = 0.0;
  double a1 = 0.0;   // sum_v |X_v| Y_v^2 / sigma^3
  double a32 = 0.0;  // sum_v sum_{w in nu_v} |X_v X_w Y_{v,w}| / sigma^3
  double a33 = 0.0;  // sum_v sum_{w in nu_v} sigma_{v,w} |Y_{v,w}| / sigma^3
  double gd = 0.0;   // E[G D | g]
  std::vector<Complex> z2, z41, z42, z43;
};

ConditionalValues conditional_values(const Graph& g, const MomentReport& mom,
                                     std::span<const double> t_grid);

Complex graph_conditional(const Graph& g, double p, double sigma, double t, ConditionalTerm which);

struct RTermEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
  std::optional<double> t;
};

struct EstimateConfig {
  int n = 16;
  double p = 0.5;
  std::uint64_t samples = 10000;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::vector<double> t_grid;  // empty: default_t_grid()
  int batches = 16;
};

// 24 log-spaced points in [1e-2, 10].
std::vector<double> default_t_grid(double lo = 1e-2, double hi = 10.0, int points = 24);

inline constexpr int kCouplingMaxN = 48;

struct REstimates {
  int n = 0;
  double p = 0.0;
  std::vector<double> t_grid;
  RTermEstimate r1, r2, r31, r32, r33, r3;
  RTermEstimate r41, r42, r43, r4;  // sup terms and their sum
  std::vector<RTermEstimate> r2_t;
  std::vector<double> w_samples;  // W of every sampled graph, in index order
};

REstimates estimate_r(const EstimateConfig& cfg);

enum class RTildePolicy { Estimate, Theoretical };
std::string to_string(RTildePolicy p);

struct BoundReport {
  int n = 0;
  double p = 0.0;
  RegimeRates rates;
  RTildePolicy policy = RTildePolicy::Estimate;
  BoundInputs inputs;
  std::optional<double> simple_bound;  // needs r1 > 0 so that r1~ = r1 is admissible
  double extended_bound = 0.0;
  double r3_theory = 0.0;
  double r4_theory = 0.0;
  std::optional<std::string> warning;
};

// Theoretical policy takes r3~ from r3_theoretical unless an explicit value is
// supplied. An r3~ below the r3 estimate is raised to it and flagged.
BoundReport assemble_bound(int n, double p, const REstimates& est, RTildePolicy policy,
                           std::optional<double> r3_tilde = std::nullopt);

}  // namespace trinorm

#pragma once

// Overlap patterns of four triangles (v, w, v', w') with w in nu_v and w' in
// nu_{v'}: isomorphism classes, edge-union sizes, occurrence orders, the
// moment bound for products of centred indicators, and exact or Monte Carlo
// covariance checks against the lemma bound families.

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trinorm/graph.hpp"

namespace trinorm {

struct PatternConfig {
  TripleId v, w, vp, wp;
};

enum class LemmaTag { L9, L10, L11, L12 };
std::string to_string(LemmaTag t);

struct PatternClass {
  // Sorted per-vertex role masks (bit 0: v, 1: w, 2: v', 3: w'). Two
  // configurations are isomorphic exactly when these agree.
  std::vector<std::uint8_t> canonical;
  PatternConfig representative;
  int m = 0;                   // |M(v, w, v', w')|
  int multiplicity_order = 0;  // vertices of w ∪ w' outside v ∪ v'
  LemmaTag lemma_tag = LemmaTag::L9;

  // m plus the lemma offset (0 for L9, 1 for L10/L12, 3 for L11): the
  // exponent of the leading small-p term of the bound.
  int small_p_exponent() const;
  std::string label() const;  // e.g. "012|013|345|346"
};

PatternClass classify_pattern(const PatternConfig& cfg);

// Base pairs (v, v'): equal, sharing two, one or no vertices. The r42x
// anchors expand into the same classes.
enum class Anchor { R411, R412, R413, R414 };
Anchor parse_anchor(const std::string& name);
std::string to_string(Anchor a);
std::pair<TripleId, TripleId> anchor_base(Anchor a);

// One class per isomorphism type of (u, u') in nu_v x nu_{v'}, listing each
// unordered pair of completion types once (the completion of v at least as
// far from v' as that of v' from v).
std::vector<PatternClass> enumerate_classes(Anchor a);

struct MomentCheckEntry {
  double p = 0.0;
  double exact = 0.0;  // E|X_{v1} ... X_{vk}|
  double bound = 0.0;  // min{6(1 - p), 2^k p^m}
  bool holds = false;
};

struct MomentCheckReport {
  int k = 0;
  int m = 0;
  std::vector<MomentCheckEntry> entries;
  bool all_hold() const;
};

// Exact expansion over the 2^m states of the induced edges.
double abs_product_moment(std::span<const TripleId> triples, double p);
MomentCheckReport moment_bound_check(std::span<const TripleId> triples,
                                     std::span<const double> p_grid);

// min{n^2(1-p), p^m + n p^{m+2} + n^2 p^{m+4}} for L9,
// min{n(1-p), p^{m+1} + n p^{m+3}} for L10/L12, min{1-p, p^{m+3}} for L11.
double lemma_bound_family(LemmaTag tag, int m, int n, double p);

enum class CovMode { Exact, MonteCarlo };

struct KernelCov {
  std::string kernel;  // "phi" or "psi"
  std::complex<double> cov;
  double abs_cov = 0.0;
  double std_error = 0.0;    // 0 in exact mode
  double lipschitz = 0.0;    // ||f'|| = ||g'||
  double family = 0.0;
  double ratio = 0.0;        // |Cov| / (||f'|| ||g'|| family)
};

struct CovCheckReport {
  PatternClass cls;
  int n = 0;
  double p = 0.0;
  double t = 0.0;
  CovMode mode = CovMode::Exact;
  std::uint64_t samples = 0;
  std::vector<KernelCov> kernels;
};

struct CovCheckOptions {
  CovMode mode = CovMode::Exact;
  std::uint64_t samples = 0;  // Monte Carlo only, >= 1e4
  std::uint64_t seed = 0;
};

// |Cov(X_v X_w f(t Y_{v,w}/sigma), X_{v'} X_{w'} f(t Y_{v',w'}/sigma))| for
// f = phi and f = psi, with the representative configuration of cls.
CovCheckReport pattern_cov_check(const PatternClass& cls, int n, double p, double t,
                                 const CovCheckOptions& opt);

}  // namespace trinorm

#include "trinorm/patterns.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "trinorm/coupling.hpp"
#include "trinorm/errors.hpp"
#include "trinorm/moments.hpp"
#include "trinorm/sampler.hpp"
#include "trinorm/special.hpp"

namespace trinorm {

namespace {

constexpr int kMaxLabels = 9;
constexpr int kMaxFactors = 6;
constexpr int kEnumLabels = 8;

std::set<int> vertex_set(std::initializer_list<TripleId> ts) {
  std::set<int> s;
  for (const auto& t : ts) s.insert(t.v.begin(), t.v.end());
  return s;
}

std::size_t intersection_size(const std::set<int>& a, const std::set<int>& b) {
  std::size_t k = 0;
  for (int x : a) k += b.count(x);
  return k;
}

// 0: u = base; 1: the vertex u adds to base lies in `other`; 2: it is fresh.
int completion_type(const TripleId& u, const TripleId& base, const TripleId& other) {
  if (u == base) return 0;
  for (int x : u.v) {
    if (!base.contains(x)) return other.contains(x) ? 1 : 2;
  }
  return 0;
}

std::vector<TripleId> completions(const TripleId& base) {
  std::vector<TripleId> out{base};
  const auto& b = base.v;
  const std::array<std::array<int, 2>, 3> pairs{{{b[0], b[1]}, {b[0], b[2]}, {b[1], b[2]}}};
  for (const auto& [i, j] : pairs) {
    for (int x = 0; x < kEnumLabels; ++x) {
      if (!base.contains(x)) out.push_back(TripleId::of(i, j, x));
    }
  }
  return out;
}

double pow_int(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

}  // namespace

std::string to_string(LemmaTag t) {
  switch (t) {
    case LemmaTag::L9: return "L9";
    case LemmaTag::L10: return "L10";
    case LemmaTag::L11: return "L11";
    case LemmaTag::L12: return "L12";
  }
  return "?";
}

int PatternClass::small_p_exponent() const {
  switch (lemma_tag) {
    case LemmaTag::L9: return m;
    case LemmaTag::L10:
    case LemmaTag::L12: return m + 1;
    case LemmaTag::L11: return m + 3;
  }
  return m;
}

std::string PatternClass::label() const {
  std::string s;
  for (const auto* t : {&representative.v, &representative.w, &representative.vp,
                        &representative.wp}) {
    if (!s.empty()) s += '|';
    for (int x : t->v) s += std::to_string(x);
  }
  return s;
}

PatternClass classify_pattern(const PatternConfig& cfg) {
  if (cfg.v.overlap(cfg.w) < 2) throw InputError("classify_pattern: w is not in nu_v");
  if (cfg.vp.overlap(cfg.wp) < 2) throw InputError("classify_pattern: w' is not in nu_v'");

  PatternClass c;
  c.representative = cfg;
  const std::array<TripleId, 4> roles{cfg.v, cfg.w, cfg.vp, cfg.wp};
  c.m = edge_union_size(roles);

  std::map<int, std::uint8_t> mask;
  for (std::size_t r = 0; r < roles.size(); ++r) {
    for (int x : roles[r].v) mask[x] |= static_cast<std::uint8_t>(1u << r);
  }
  for (const auto& [x, bits] : mask) c.canonical.push_back(bits);
  std::sort(c.canonical.begin(), c.canonical.end());

  const auto base = vertex_set({cfg.v, cfg.vp});
  const auto first = vertex_set({cfg.v, cfg.w});
  const auto second = vertex_set({cfg.vp, cfg.wp});
  for (const auto& [x, bits] : mask) c.multiplicity_order += base.count(x) ? 0 : 1;

  const int shared_base = cfg.v.overlap(cfg.vp);
  const std::size_t shared_sides = intersection_size(first, second);
  bool completions_meet_off_base = false;
  for (int x : cfg.w.v) {
    if (cfg.wp.contains(x) && !(cfg.v.contains(x) && cfg.vp.contains(x))) {
      completions_meet_off_base = true;
    }
  }
  if (shared_base == 1 && !completions_meet_off_base) {
    c.lemma_tag = LemmaTag::L10;
  } else if (shared_sides == 0) {
    c.lemma_tag = LemmaTag::L11;
  } else if (shared_base == 0 && shared_sides == 1) {
    c.lemma_tag = LemmaTag::L12;
  } else {
    c.lemma_tag = LemmaTag::L9;
  }
  return c;
}

Anchor parse_anchor(const std::string& name) {
  if (name == "r411" || name == "r421") return Anchor::R411;
  if (name == "r412" || name == "r422") return Anchor::R412;
  if (name == "r413" || name == "r423") return Anchor::R413;
  if (name == "r414" || name == "r424") return Anchor::R414;
  throw InputError("unknown anchor '" + name + "' (expected r411..r414 or r421..r424)");
}

std::string to_string(Anchor a) {
  switch (a) {
    case Anchor::R411: return "r411";
    case Anchor::R412: return "r412";
    case Anchor::R413: return "r413";
    case Anchor::R414: return "r414";
  }
  return "?";
}

std::pair<TripleId, TripleId> anchor_base(Anchor a) {
  const TripleId v = TripleId::of(0, 1, 2);
  switch (a) {
    case Anchor::R411: return {v, v};
    case Anchor::R412: return {v, TripleId::of(0, 1, 3)};
    case Anchor::R413: return {v, TripleId::of(0, 3, 4)};
    case Anchor::R414: return {v, TripleId::of(3, 4, 5)};
  }
  return {v, v};
}

std::vector<PatternClass> enumerate_classes(Anchor a) {
  const auto [v, vp] = anchor_base(a);
  std::map<std::vector<std::uint8_t>, PatternClass> classes;
  for (const auto& u : completions(v)) {
    for (const auto& up : completions(vp)) {
      if (completion_type(u, v, vp) < completion_type(up, vp, v)) continue;
      auto c = classify_pattern({v, u, vp, up});
      classes.emplace(c.canonical, std::move(c));
    }
  }
  std::vector<PatternClass> out;
  for (auto& [key, c] : classes) out.push_back(std::move(c));
  std::stable_sort(out.begin(), out.end(), [](const PatternClass& x, const PatternClass& y) {
    if (x.multiplicity_order != y.multiplicity_order) {
      return x.multiplicity_order < y.multiplicity_order;
    }
    return x.small_p_exponent() < y.small_p_exponent();
  });
  return out;
}

bool MomentCheckReport::all_hold() const {
  return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.holds; });
}

double abs_product_moment(std::span<const TripleId> triples, double p) {
  require_probability(p);
  if (triples.empty()) throw InputError("abs_product_moment: no triples");
  if (triples.size() > kMaxFactors) {
    throw CapacityError("abs_product_moment: at most 6 factors are supported");
  }
  std::set<int> span;
  std::vector<EdgeId> edges;
  for (const auto& t : triples) {
    span.insert(t.v.begin(), t.v.end());
    for (const auto& e : t.edges()) {
      if (std::find(edges.begin(), edges.end(), e) == edges.end()) edges.push_back(e);
    }
  }
  if (span.size() > kMaxLabels) {
    throw CapacityError("abs_product_moment: vertex span exceeds 9");
  }
  // Each triple as a bitmask over the local edge list.
  std::vector<std::uint32_t> tri_mask;
  for (const auto& t : triples) {
    std::uint32_t mk = 0;
    for (const auto& e : t.edges()) {
      mk |= 1u << (std::find(edges.begin(), edges.end(), e) - edges.begin());
    }
    tri_mask.push_back(mk);
  }
  const int m = static_cast<int>(edges.size());
  const double p3 = p * p * p;
  CompensatedSum acc;
  for (std::uint32_t s = 0; s < (1u << m); ++s) {
    const int on = std::popcount(s);
    double prod = pow_int(p, on) * pow_int(1.0 - p, m - on);
    for (std::uint32_t mk : tri_mask) prod *= (s & mk) == mk ? 1.0 - p3 : p3;
    acc += prod;
  }
  return acc.value();
}

MomentCheckReport moment_bound_check(std::span<const TripleId> triples,
                                     std::span<const double> p_grid) {
  MomentCheckReport rep;
  rep.k = static_cast<int>(triples.size());
  rep.m = edge_union_size(triples);
  for (double p : p_grid) {
    MomentCheckEntry e;
    e.p = p;
    e.exact = abs_product_moment(triples, p);
    e.bound = std::min(6.0 * (1.0 - p), std::ldexp(pow_int(p, rep.m), rep.k));
    e.holds = e.exact <= e.bound * (1.0 + 1e-12);
    rep.entries.push_back(e);
  }
  return rep;
}

double lemma_bound_family(LemmaTag tag, int m, int n, double p) {
  const double nn = n;
  switch (tag) {
    case LemmaTag::L9:
      return std::min(nn * nn * (1.0 - p),
                      pow_int(p, m) + nn * pow_int(p, m + 2) + nn * nn * pow_int(p, m + 4));
    case LemmaTag::L10:
    case LemmaTag::L12:
      return std::min(nn * (1.0 - p), pow_int(p, m + 1) + nn * pow_int(p, m + 3));
    case LemmaTag::L11: return std::min(1.0 - p, pow_int(p, m + 3));
  }
  return 0.0;
}

CovCheckReport pattern_cov_check(const PatternClass& cls, int n, double p, double t,
                                 const CovCheckOptions& opt) {
  require_probability(p);
  if (!(t > 0.0)) throw InputError("pattern_cov_check: t must be positive");
  const auto& cfg = cls.representative;
  for (const auto* tr : {&cfg.v, &cfg.w, &cfg.vp, &cfg.wp}) {
    if (tr->v[2] >= n) {
      throw InputError("pattern_cov_check: class " + cls.label() + " needs more than " +
                       std::to_string(n) + " vertices");
    }
  }
  if (opt.mode == CovMode::Exact && n > 7) {
    throw CapacityError("pattern_cov_check: exact mode supports n <= 7");
  }
  if (opt.mode == CovMode::MonteCarlo && opt.samples < 10000) {
    throw InputError("pattern_cov_check: Monte Carlo mode needs at least 10^4 samples");
  }

  const double sigma = exact_moments(n, p).sigma;
  const double p3 = p * p * p;

  // Local index of every triple that enters either side.
  const auto nb1 = neighborhood(cfg.v, n, cfg.w);
  const auto nb2 = neighborhood(cfg.vp, n, cfg.wp);
  std::vector<TripleId> used(nb1);
  used.insert(used.end(), nb2.begin(), nb2.end());
  for (const auto* tr : {&cfg.v, &cfg.w, &cfg.vp, &cfg.wp}) used.push_back(*tr);
  std::sort(used.begin(), used.end(), [n](const TripleId& a, const TripleId& b) {
    return triple_rank(a, n) < triple_rank(b, n);
  });
  used.erase(std::unique(used.begin(), used.end()), used.end());
  const auto local = [&](const TripleId& x) {
    return static_cast<std::size_t>(std::find(used.begin(), used.end(), x) - used.begin());
  };
  std::vector<std::size_t> idx1, idx2;
  for (const auto& x : nb1) idx1.push_back(local(x));
  for (const auto& x : nb2) idx2.push_back(local(x));
  const std::size_t iv = local(cfg.v), iw = local(cfg.w), ivp = local(cfg.vp),
                    iwp = local(cfg.wp);
  std::vector<std::array<std::uint64_t, 3>> ranks;
  for (const auto& x : used) {
    const auto e = x.edges();
    ranks.push_back({edge_rank(e[0], n), edge_rank(e[1], n), edge_rank(e[2], n)});
  }

  using Kernel = std::function<Complex(double)>;
  const std::array<std::pair<std::string, Kernel>, 2> kernels{
      {{"phi", kernel_phi}, {"psi", kernel_psi}}};
  const std::array<double, 2> lipschitz{t / (2.0 * sigma), t / sigma};

  struct Acc {
    CompensatedComplexSum a, b, ab;
    double w = 0.0;
    Complex cov() const {
      return ab.value() / w - (a.value() / w) * std::conj(b.value() / w);
    }
  };

  std::vector<double> X(used.size());
  const auto evaluate = [&](const auto& closed, double weight, std::array<Acc, 2>& acc) {
    for (std::size_t i = 0; i < used.size(); ++i) X[i] = (closed(i) ? 1.0 : 0.0) - p3;
    double y1 = 0.0, y2 = 0.0;
    for (std::size_t i : idx1) y1 += X[i];
    for (std::size_t i : idx2) y2 += X[i];
    const double x1 = X[iv] * X[iw];
    const double x2 = X[ivp] * X[iwp];
    for (std::size_t k = 0; k < kernels.size(); ++k) {
      const Complex A = x1 * kernels[k].second(t * y1 / sigma);
      const Complex B = x2 * kernels[k].second(t * y2 / sigma);
      acc[k].a += weight * A;
      acc[k].b += weight * B;
      acc[k].ab += weight * A * std::conj(B);
      acc[k].w += weight;
    }
  };

  CovCheckReport rep;
  rep.cls = cls;
  rep.n = n;
  rep.p = p;
  rep.t = t;
  rep.mode = opt.mode;
  std::array<Acc, 2> total;
  std::vector<std::array<double, 2>> batch_abs;

  if (opt.mode == CovMode::Exact) {
    const int m = static_cast<int>(num_edges(n));
    std::vector<double> weights(static_cast<std::size_t>(m) + 1);
    for (int k = 0; k <= m; ++k) {
      weights[static_cast<std::size_t>(k)] =
          std::exp(k * std::log(p) + (m - k) * std::log1p(-p));
    }
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
      const auto closed = [&](std::size_t i) {
        const auto& r = ranks[i];
        return ((mask >> r[0]) & (mask >> r[1]) & (mask >> r[2]) & 1u) != 0;
      };
      evaluate(closed, weights[static_cast<std::size_t>(std::popcount(mask))], total);
    }
  } else {
    rep.samples = opt.samples;
    constexpr std::uint64_t kBatches = 16;
    const SamplerConfig sc{n, p, opt.seed, 0};
    for (std::uint64_t b = 0; b < kBatches; ++b) {
      std::array<Acc, 2> acc;
      for (std::uint64_t i = b * opt.samples / kBatches; i < (b + 1) * opt.samples / kBatches;
           ++i) {
        const Graph g = sample_gnp(sc, i);
        const auto closed = [&](std::size_t j) {
          const auto& r = ranks[j];
          return g.has_edge_rank(r[0]) && g.has_edge_rank(r[1]) && g.has_edge_rank(r[2]);
        };
        evaluate(closed, 1.0, acc);
      }
      batch_abs.push_back({std::abs(acc[0].cov()), std::abs(acc[1].cov())});
      for (std::size_t k = 0; k < 2; ++k) {
        total[k].a += acc[k].a.value();
        total[k].b += acc[k].b.value();
        total[k].ab += acc[k].ab.value();
        total[k].w += acc[k].w;
      }
    }
  }

  for (std::size_t k = 0; k < kernels.size(); ++k) {
    KernelCov kc;
    kc.kernel = kernels[k].first;
    kc.cov = total[k].cov();
    kc.abs_cov = std::abs(kc.cov);
    if (!batch_abs.empty()) {
      const double B = static_cast<double>(batch_abs.size());
      double mean = 0.0, ss = 0.0;
      for (const auto& v : batch_abs) mean += v[k] / B;
      for (const auto& v : batch_abs) ss += (v[k] - mean) * (v[k] - mean);
      kc.std_error = std::sqrt(ss / (B - 1.0) / B);
    }
    kc.lipschitz = lipschitz[k];
    kc.family = lemma_bound_family(cls.lemma_tag, cls.m, n, p);
    kc.ratio = kc.abs_cov / (kc.lipschitz * kc.lipschitz * kc.family);
    if (!std::isfinite(kc.ratio)) {
      throw NumericError("pattern_cov_check: non-finite ratio for " + cls.label());
    }
    rep.kernels.push_back(kc);
  }
  return rep;
}

}  // namespace trinorm

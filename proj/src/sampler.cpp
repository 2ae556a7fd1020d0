#include "trinorm/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "trinorm/errors.hpp"

namespace trinorm {

namespace {

constexpr std::uint64_t kDomainEdges = 0;
constexpr std::uint64_t kDomainProxy = 0x70726f7879ULL;
constexpr std::uint64_t kDomainProxyPairs = 0x7061697273ULL;

std::vector<std::uint64_t> edge_words(std::uint64_t key, int n, std::uint64_t thr) {
  const std::uint64_t e = num_edges(n);
  std::vector<std::uint64_t> words((e + 63) / 64, 0);
  for (std::uint64_t w = 0; w < words.size(); ++w) {
    const std::uint64_t lo = w * 64;
    const std::uint64_t hi = std::min(e, lo + 64);
    std::uint64_t bits = 0;
    for (std::uint64_t r = lo; r < hi; ++r) {
      const std::uint64_t u = mix64(key + (r + 1) * kGolden);
      bits |= static_cast<std::uint64_t>(u < thr) << (r - lo);
    }
    words[w] = bits;
  }
  return words;
}

}  // namespace

void SamplerConfig::validate() const {
  if (n < 3) throw InputError("sampler: n must be at least 3, got " + std::to_string(n));
  require_probability(p);
}

std::uint64_t sample_key(std::uint64_t seed, std::uint64_t stream, std::uint64_t index,
                         std::uint64_t domain) {
  std::uint64_t k = mix64(seed ^ 0x5eedULL);
  k = mix64(k + (stream + 1) * kGolden);
  k = mix64(k ^ mix64(domain + 0x243f6a8885a308d3ULL));
  return mix64(k + (index + 1) * 0xd1b54a32d192ed03ULL);
}

std::uint64_t bernoulli_threshold(double p) {
  require_probability(p);
  return static_cast<std::uint64_t>(std::ldexp(p, 64));
}

Graph sample_gnp(const SamplerConfig& cfg, std::uint64_t index) {
  cfg.validate();
  const std::uint64_t key = sample_key(cfg.seed, cfg.stream, index, kDomainEdges);
  return Graph(cfg.n, edge_words(key, cfg.n, bernoulli_threshold(cfg.p)));
}

std::int64_t sample_proxy(const SamplerConfig& cfg, std::uint64_t index, ProxyVariant variant) {
  cfg.validate();
  const double q = cfg.p * cfg.p;
  CounterRng rng(sample_key(cfg.seed, cfg.stream, index, kDomainProxy));
  // Given the pair indicators, Y is a sum of independent Be(p^2) triple
  // indicators, i.e. Binomial(#active triples, p^2).
  std::int64_t trials = 0;
  if (variant == ProxyVariant::Literal) {
    const Graph pairs(cfg.n, edge_words(sample_key(cfg.seed, cfg.stream, index, kDomainProxyPairs),
                                        cfg.n, bernoulli_threshold(cfg.p)));
    std::uint64_t r = 0;
    for (int j = 1; j < cfg.n; ++j) {
      for (int i = 0; i < j; ++i, ++r) {
        if (pairs.has_edge_rank(r)) trials += cfg.n - 1 - j;
      }
    }
  } else {
    std::binomial_distribution<std::int64_t> pairs_on(static_cast<std::int64_t>(num_edges(cfg.n)),
                                                      cfg.p);
    trials = pairs_on(rng) * (cfg.n - 2);
  }
  if (trials == 0) return 0;
  std::binomial_distribution<std::int64_t> hits(trials, q);
  return hits(rng);
}

void parallel_for(std::uint64_t count, const std::function<void(std::uint64_t)>& fn,
                  unsigned workers) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(count, 1)));
  if (workers <= 1) {
    for (std::uint64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  const std::uint64_t chunk = (count + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t lo = w * chunk;
    const std::uint64_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::uint64_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace trinorm

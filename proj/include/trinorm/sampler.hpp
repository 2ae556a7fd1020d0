#pragma once

// Counter-based G(n,p) sampling. Every random quantity is a pure function of
// (seed, stream, index, position), so any sample can be regenerated in
// isolation and workers never share generator state.

#include <cstdint>
#include <functional>
#include <limits>

#include "trinorm/graph.hpp"

namespace trinorm {

struct SamplerConfig {
  int n = 3;
  double p = 0.5;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  void validate() const;  // throws InputError
};

// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// Key for sample `index` of (seed, stream) within a named domain; domains keep
// e.g. edge bits and coupling draws of the same sample independent.
std::uint64_t sample_key(std::uint64_t seed, std::uint64_t stream, std::uint64_t index,
                         std::uint64_t domain = 0);

// Uniform random bit generator over the counter sequence of one key.
class CounterRng {
 public:
  using result_type = std::uint64_t;
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return mix64(key_ + (++counter_) * kGolden); }

  // Uniform integer in [0, bound) by multiply-shift.
  std::uint64_t below(std::uint64_t bound) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>((*this)()) * bound) >> 64);
  }
  double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// floor(p * 2^64): an edge is present when its 64-bit uniform falls below it.
std::uint64_t bernoulli_threshold(double p);

Graph sample_gnp(const SamplerConfig& cfg, std::uint64_t index);

enum class ProxyVariant {
  // Y = sum_{i<j<k} I_{ij} I_{ijk}; the pair indicator is owned by the two
  // smallest labels of each triple.
  Literal,
  // Y = sum_{i<j} I_{ij} sum_{k not in {i,j}} I_{ijk}: C(n,2) i.i.d. summands.
  Iid,
};

std::int64_t sample_proxy(const SamplerConfig& cfg, std::uint64_t index,
                          ProxyVariant variant = ProxyVariant::Literal);

// Runs fn(i) for i in [0, count) on up to `workers` threads over contiguous
// chunks. Results must be written by index; scheduling never affects output.
void parallel_for(std::uint64_t count, const std::function<void(std::uint64_t)>& fn,
                  unsigned workers = 0);

}  // namespace trinorm

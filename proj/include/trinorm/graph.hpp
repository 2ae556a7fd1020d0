#pragma once

// Canonical indexing of vertices, edges and triples of the complete graph on
// n labelled vertices, plus the graph type and the local triangle statistics
// (centred indicators, neighbourhood sums) built on top of it.
//
// Vertices are 0-based. Edges {i<j} are ranked colexicographically,
// rank = j(j-1)/2 + i, and triples {a<b<c} likewise, rank = C(c,3)+C(b,2)+a,
// so growing n only appends ranks.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace trinorm {

constexpr std::uint64_t num_edges(int n) {
  return static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n - 1) / 2;
}

constexpr std::uint64_t num_triples(int n) {
  const auto m = static_cast<std::uint64_t>(n);
  return n < 3 ? 0 : m * (m - 1) * (m - 2) / 6;
}

struct EdgeId {
  int a = 0;  // a < b
  int b = 1;

  // Orders the endpoints; throws InputError on a loop or a negative label.
  static EdgeId of(int i, int j);

  friend bool operator==(const EdgeId&, const EdgeId&) = default;
  friend auto operator<=>(const EdgeId&, const EdgeId&) = default;
};

struct TripleId {
  std::array<int, 3> v{0, 1, 2};  // strictly ascending

  // Sorts the labels; throws InputError on repeated or negative labels.
  static TripleId of(int a, int b, int c);

  bool contains(int x) const { return v[0] == x || v[1] == x || v[2] == x; }
  std::array<EdgeId, 3> edges() const {
    return {EdgeId{v[0], v[1]}, EdgeId{v[0], v[2]}, EdgeId{v[1], v[2]}};
  }
  // Number of shared vertex labels.
  int overlap(const TripleId& o) const;

  friend bool operator==(const TripleId&, const TripleId&) = default;
  friend auto operator<=>(const TripleId&, const TripleId&) = default;
};

std::uint64_t edge_rank(EdgeId e, int n);
EdgeId edge_from_rank(std::uint64_t rank);
std::uint64_t triple_rank(const TripleId& t, int n);
TripleId triple_from_rank(std::uint64_t rank);

// All C(n,3) triples in rank order.
std::vector<TripleId> all_triples(int n);

// Simple undirected graph as a packed edge-indicator bitset over edge ranks.
class Graph {
 public:
  // Empty graph on n >= 3 vertices.
  explicit Graph(int n);
  // Takes ownership of a packed bitset; bits beyond the last rank must be zero.
  Graph(int n, std::vector<std::uint64_t> words);

  static Graph complete(int n);
  static Graph from_edges(int n, std::span<const EdgeId> edges);
  // Bit r of mask is edge rank r; used by the exhaustive enumerator.
  static Graph from_mask(int n, std::uint64_t mask);

  int n() const { return n_; }
  bool has_edge(EdgeId e) const;
  bool has_edge_rank(std::uint64_t r) const {
    return (words_[r >> 6] >> (r & 63)) & 1u;
  }
  std::uint64_t edge_count() const;
  std::span<const std::uint64_t> words() const { return words_; }
  std::vector<EdgeId> edge_list() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  int n_;
  std::vector<std::uint64_t> words_;
};

// Row-major adjacency bitsets; the fast path for triangle and codegree counts.
class Adjacency {
 public:
  explicit Adjacency(const Graph& g);

  int n() const { return n_; }
  bool edge(int i, int j) const {
    return (rows_[static_cast<std::size_t>(i) * stride_ + (j >> 6)] >> (j & 63)) & 1u;
  }
  // |N(i) ∩ N(j)|
  int codegree(int i, int j) const;
  std::uint64_t triangle_count() const;

 private:
  int n_;
  std::size_t stride_;
  std::vector<std::uint64_t> rows_;
};

std::uint64_t triangle_count(const Graph& g);

// X_v = I_{v1v2} I_{v1v3} I_{v2v3} - p^3.
double centered_indicator(const Graph& g, double p, const TripleId& v);

// nu_v = {u : |u ∩ v| >= 2} (includes v, size 3(n-3)+1); with w given,
// nu_{v,w} = nu_v ∪ nu_w. Sorted by triple rank.
std::vector<TripleId> neighborhood(const TripleId& v, int n,
                                   const std::optional<TripleId>& w = std::nullopt);

// Y_v (or Y_{v,w}): sum of centred indicators over neighborhood(v[, w]).
double local_sum(const Graph& g, double p, const TripleId& v,
                 const std::optional<TripleId>& w = std::nullopt);

// m = |M(v_1, ..., v_k)|, the number of distinct edges induced by the triples.
int edge_union_size(std::span<const TripleId> triples);

// W = (T - C(n,3) p^3) / sigma.
double w_statistic(const Graph& g, double p, double sigma);

// Fixture format: "n" on the first line, then one 0-based edge "i j" per line.
Graph read_graph(std::istream& in);
void write_graph(std::ostream& out, const Graph& g);

void require_probability(double p);

}  // namespace trinorm

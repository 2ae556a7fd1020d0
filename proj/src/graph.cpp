#include "trinorm/graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "trinorm/errors.hpp"

namespace trinorm {

namespace {

std::uint64_t choose2(std::uint64_t x) { return x < 2 ? 0 : x * (x - 1) / 2; }
std::uint64_t choose3(std::uint64_t x) { return x < 3 ? 0 : x * (x - 1) * (x - 2) / 6; }

void require_vertex_count(int n) {
  if (n < 3) throw InputError("vertex count must be at least 3, got " + std::to_string(n));
}

void require_triple(const TripleId& t, int n) {
  if (t.v[2] >= n) {
    throw InputError("triple vertex " + std::to_string(t.v[2]) + " out of range for n=" +
                     std::to_string(n));
  }
}

}  // namespace

void require_probability(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw InputError("edge probability must lie in (0,1), got " + std::to_string(p));
  }
}

EdgeId EdgeId::of(int i, int j) {
  if (i < 0 || j < 0) throw InputError("negative vertex label");
  if (i == j) throw InputError("edge endpoints must differ");
  return i < j ? EdgeId{i, j} : EdgeId{j, i};
}

TripleId TripleId::of(int a, int b, int c) {
  std::array<int, 3> v{a, b, c};
  std::sort(v.begin(), v.end());
  if (v[0] < 0) throw InputError("negative vertex label");
  if (v[0] == v[1] || v[1] == v[2]) throw InputError("triple labels must be distinct");
  return TripleId{v};
}

int TripleId::overlap(const TripleId& o) const {
  int k = 0;
  for (int x : v) k += o.contains(x) ? 1 : 0;
  return k;
}

std::uint64_t edge_rank(EdgeId e, int n) {
  if (e.a < 0 || e.a >= e.b) throw InputError("edge must be an ascending pair");
  if (e.b >= n) {
    throw InputError("edge vertex " + std::to_string(e.b) + " out of range for n=" +
                     std::to_string(n));
  }
  return choose2(static_cast<std::uint64_t>(e.b)) + static_cast<std::uint64_t>(e.a);
}

EdgeId edge_from_rank(std::uint64_t rank) {
  auto j = static_cast<std::uint64_t>((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(rank))) / 2.0);
  while (choose2(j) > rank) --j;
  while (choose2(j + 1) <= rank) ++j;
  return EdgeId{static_cast<int>(rank - choose2(j)), static_cast<int>(j)};
}

std::uint64_t triple_rank(const TripleId& t, int n) {
  require_triple(t, n);
  return choose3(static_cast<std::uint64_t>(t.v[2])) + choose2(static_cast<std::uint64_t>(t.v[1])) +
         static_cast<std::uint64_t>(t.v[0]);
}

TripleId triple_from_rank(std::uint64_t rank) {
  auto c = static_cast<std::uint64_t>(std::cbrt(6.0 * static_cast<double>(rank))) + 2;
  while (choose3(c) > rank) --c;
  while (choose3(c + 1) <= rank) ++c;
  rank -= choose3(c);
  const EdgeId e = edge_from_rank(rank);
  return TripleId{{e.a, e.b, static_cast<int>(c)}};
}

std::vector<TripleId> all_triples(int n) {
  std::vector<TripleId> out;
  out.reserve(num_triples(n));
  for (int c = 2; c < n; ++c)
    for (int b = 1; b < c; ++b)
      for (int a = 0; a < b; ++a) out.push_back(TripleId{{a, b, c}});
  return out;
}

Graph::Graph(int n) : n_(n) {
  require_vertex_count(n);
  words_.assign((num_edges(n) + 63) / 64, 0);
}

Graph::Graph(int n, std::vector<std::uint64_t> words) : n_(n), words_(std::move(words)) {
  require_vertex_count(n);
  const std::uint64_t e = num_edges(n);
  if (words_.size() != (e + 63) / 64) throw InputError("edge bitset has wrong length");
  if (e % 64 != 0 && (words_.back() >> (e % 64)) != 0) {
    throw InputError("edge bitset has bits beyond the last edge rank");
  }
}

Graph Graph::complete(int n) {
  require_vertex_count(n);
  const std::uint64_t e = num_edges(n);
  std::vector<std::uint64_t> w((e + 63) / 64, ~std::uint64_t{0});
  if (e % 64 != 0) w.back() = (std::uint64_t{1} << (e % 64)) - 1;
  return Graph(n, std::move(w));
}

Graph Graph::from_edges(int n, std::span<const EdgeId> edges) {
  Graph g(n);
  for (const EdgeId& e : edges) {
    const std::uint64_t r = edge_rank(e, n);
    g.words_[r >> 6] |= std::uint64_t{1} << (r & 63);
  }
  return g;
}

Graph Graph::from_mask(int n, std::uint64_t mask) {
  if (num_edges(n) > 64) throw CapacityError("mask construction supports at most 64 edges");
  return Graph(n, {mask});
}

bool Graph::has_edge(EdgeId e) const { return has_edge_rank(edge_rank(e, n_)); }

std::uint64_t Graph::edge_count() const {
  std::uint64_t c = 0;
  for (std::uint64_t w : words_) c += static_cast<std::uint64_t>(std::popcount(w));
  return c;
}

std::vector<EdgeId> Graph::edge_list() const {
  std::vector<EdgeId> out;
  const std::uint64_t e = num_edges(n_);
  for (std::uint64_t r = 0; r < e; ++r)
    if (has_edge_rank(r)) out.push_back(edge_from_rank(r));
  return out;
}

Adjacency::Adjacency(const Graph& g)
    : n_(g.n()), stride_(static_cast<std::size_t>((g.n() + 63) / 64)),
      rows_(static_cast<std::size_t>(g.n()) * stride_, 0) {
  const auto words = g.words();
  std::uint64_t r = 0;
  // Walk ranks in colex order: rank j(j-1)/2 + i enumerates (i, j) for i < j.
  for (int j = 1; j < n_; ++j) {
    for (int i = 0; i < j; ++i, ++r) {
      if ((words[r >> 6] >> (r & 63)) & 1u) {
        rows_[static_cast<std::size_t>(i) * stride_ + (j >> 6)] |= std::uint64_t{1} << (j & 63);
        rows_[static_cast<std::size_t>(j) * stride_ + (i >> 6)] |= std::uint64_t{1} << (i & 63);
      }
    }
  }
}

int Adjacency::codegree(int i, int j) const {
  const std::uint64_t* a = &rows_[static_cast<std::size_t>(i) * stride_];
  const std::uint64_t* b = &rows_[static_cast<std::size_t>(j) * stride_];
  int c = 0;
  for (std::size_t k = 0; k < stride_; ++k) c += std::popcount(a[k] & b[k]);
  return c;
}

std::uint64_t Adjacency::triangle_count() const {
  // Each triangle i<j<k is counted once: for every edge (i,j) with i<j,
  // count common neighbours k > j.
  std::uint64_t total = 0;
  for (int i = 0; i < n_; ++i) {
    const std::uint64_t* ri = &rows_[static_cast<std::size_t>(i) * stride_];
    for (int j = i + 1; j < n_; ++j) {
      if (!((ri[j >> 6] >> (j & 63)) & 1u)) continue;
      const std::uint64_t* rj = &rows_[static_cast<std::size_t>(j) * stride_];
      const auto first = static_cast<std::size_t>((j + 1) >> 6);
      for (std::size_t k = first; k < stride_; ++k) {
        std::uint64_t m = ri[k] & rj[k];
        if (k == first) {
          const int shift = (j + 1) & 63;
          m &= shift == 0 ? ~std::uint64_t{0} : ~((std::uint64_t{1} << shift) - 1);
        }
        total += static_cast<std::uint64_t>(std::popcount(m));
      }
    }
  }
  return total;
}

std::uint64_t triangle_count(const Graph& g) { return Adjacency(g).triangle_count(); }

double centered_indicator(const Graph& g, double p, const TripleId& v) {
  require_probability(p);
  require_triple(v, g.n());
  const auto e = v.edges();
  const bool closed = g.has_edge(e[0]) && g.has_edge(e[1]) && g.has_edge(e[2]);
  const double p3 = p * p * p;
  return closed ? 1.0 - p3 : -p3;
}

std::vector<TripleId> neighborhood(const TripleId& v, int n, const std::optional<TripleId>& w) {
  require_vertex_count(n);
  require_triple(v, n);
  if (w) {
    require_triple(*w, n);
    if (v.overlap(*w) < 2) throw InputError("w must lie in the neighbourhood of v");
  }
  std::vector<TripleId> out;
  // Every member shares an edge (two labels) with v or w; build from pairs.
  auto add_from = [&](const TripleId& t) {
    for (const EdgeId& e : t.edges()) {
      for (int x = 0; x < n; ++x) {
        if (x == e.a || x == e.b) continue;
        out.push_back(TripleId::of(e.a, e.b, x));
      }
    }
  };
  add_from(v);
  if (w) add_from(*w);
  std::sort(out.begin(), out.end(), [n](const TripleId& a, const TripleId& b) {
    return triple_rank(a, n) < triple_rank(b, n);
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double local_sum(const Graph& g, double p, const TripleId& v, const std::optional<TripleId>& w) {
  double s = 0.0;
  for (const TripleId& u : neighborhood(v, g.n(), w)) s += centered_indicator(g, p, u);
  return s;
}

int edge_union_size(std::span<const TripleId> triples) {
  std::vector<EdgeId> edges;
  edges.reserve(triples.size() * 3);
  for (const TripleId& t : triples)
    for (const EdgeId& e : t.edges()) edges.push_back(e);
  std::sort(edges.begin(), edges.end());
  return static_cast<int>(std::unique(edges.begin(), edges.end()) - edges.begin());
}

double w_statistic(const Graph& g, double p, double sigma) {
  require_probability(p);
  if (!(sigma > 0.0)) throw InputError("sigma must be positive");
  const double mean = static_cast<double>(num_triples(g.n())) * p * p * p;
  return (static_cast<double>(triangle_count(g)) - mean) / sigma;
}

Graph read_graph(std::istream& in) {
  std::string line;
  int n = -1;
  std::vector<EdgeId> edges;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    if (n < 0) {
      if (!(ls >> n)) continue;
      continue;
    }
    int i = 0, j = 0;
    if (!(ls >> i)) continue;
    if (!(ls >> j)) throw InputError("graph fixture: edge line needs two vertices: " + line);
    edges.push_back(EdgeId::of(i, j));
  }
  if (n < 0) throw InputError("graph fixture: missing vertex count");
  return Graph::from_edges(n, edges);
}

void write_graph(std::ostream& out, const Graph& g) {
  out << g.n() << '\n';
  for (const EdgeId& e : g.edge_list()) out << e.a << ' ' << e.b << '\n';
}

}  // namespace trinorm

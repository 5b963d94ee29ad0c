#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "homopart/bitset.hpp"

namespace homopart {

/// A subset of one vertex class.
struct VertexSet {
  std::size_t part = 0;
  Bitset members;

  static VertexSet full(std::size_t part, std::size_t n) { return {part, Bitset(n, true)}; }
  static VertexSet empty(std::size_t part, std::size_t n) { return {part, Bitset(n)}; }
  std::size_t size() const noexcept { return members.count(); }
  friend bool operator==(const VertexSet&, const VertexSet&) = default;
};

/// A pinned vertex: `vertex` of vertex class `part`.
struct Pin {
  std::size_t part = 0;
  std::size_t vertex = 0;
  friend auto operator<=>(const Pin&, const Pin&) = default;
};

/// k-partite k-graph. Edges are stored as one bit row ("fiber") along the last part
/// for every (k-1)-tuple over the first k-1 parts, indexed row-major.
class KPartiteHypergraph {
 public:
  KPartiteHypergraph() = default;
  explicit KPartiteHypergraph(std::vector<std::size_t> part_sizes);

  std::size_t k() const noexcept { return sizes_.size(); }
  std::size_t part_size(std::size_t part) const { return sizes_.at(part); }
  const std::vector<std::size_t>& part_sizes() const noexcept { return sizes_; }

  /// Number of (k-1)-tuples over the first k-1 parts.
  std::size_t prefix_count() const noexcept { return fibers_.size(); }
  std::size_t prefix_index(std::span<const std::size_t> prefix) const;
  void prefix_tuple(std::size_t index, std::span<std::size_t> out) const;

  const Bitset& fiber(std::size_t prefix_index) const { return fibers_.at(prefix_index); }

  bool contains(std::span<const std::size_t> tuple) const;
  void add_edge(std::span<const std::size_t> tuple);
  void remove_edge(std::span<const std::size_t> tuple);
  std::size_t edge_count() const noexcept;

  /// Same hypergraph with part `part` moved to the last position; the remaining parts
  /// keep their relative order.
  KPartiteHypergraph with_part_last(std::size_t part) const;

  template <class F>
  void for_each_edge(F&& f) const {
    std::vector<std::size_t> tuple(k());
    for (std::size_t p = 0; p < fibers_.size(); ++p) {
      prefix_tuple(p, std::span(tuple).first(k() - 1));
      fibers_[p].for_each_set([&](std::size_t v) {
        tuple.back() = v;
        f(std::span<const std::size_t>(tuple));
      });
    }
  }

  friend bool operator==(const KPartiteHypergraph&, const KPartiteHypergraph&) = default;

 private:
  void check_tuple(std::span<const std::size_t> tuple) const;

  std::vector<std::size_t> sizes_;
  std::vector<Bitset> fibers_;
};

/// Bipartite graph with one adjacency row per left vertex.
class BipartiteGraph {
 public:
  BipartiteGraph() = default;
  BipartiteGraph(std::size_t left_size, std::size_t right_size);

  std::size_t left_size() const noexcept { return rows_.size(); }
  std::size_t right_size() const noexcept { return right_size_; }
  const Bitset& row(std::size_t x) const { return rows_.at(x); }
  bool has_edge(std::size_t x, std::size_t y) const { return rows_.at(x).test(y); }
  void add_edge(std::size_t x, std::size_t y);
  void set_row(std::size_t x, Bitset row);
  std::size_t degree(std::size_t x) const { return rows_.at(x).count(); }
  std::size_t edge_count() const noexcept;
  BipartiteGraph transposed() const;

  /// Edges between left subset X and right subset Y.
  std::size_t edges_between(const Bitset& left, const Bitset& right) const;

  friend bool operator==(const BipartiteGraph&, const BipartiteGraph&) = default;

 private:
  std::size_t right_size_ = 0;
  std::vector<Bitset> rows_;
};

/// Simple undirected graph with adjacency bit rows.
class Graph {
 public:
  explicit Graph(std::size_t n = 0);
  std::size_t size() const noexcept { return rows_.size(); }
  void add_edge(std::size_t u, std::size_t v);
  bool has_edge(std::size_t u, std::size_t v) const { return rows_.at(u).test(v); }
  const Bitset& row(std::size_t v) const { return rows_.at(v); }

 private:
  std::vector<Bitset> rows_;
};

/// Bipartite graph with real weights in [0,1], stored densely.
class WeightedBipartite {
 public:
  WeightedBipartite() = default;
  WeightedBipartite(std::size_t left_size, std::size_t right_size);
  std::size_t left_size() const noexcept { return left_; }
  std::size_t right_size() const noexcept { return right_; }
  double weight(std::size_t x, std::size_t y) const { return weights_[x * right_ + y]; }
  void set_weight(std::size_t x, std::size_t y, double w);
  double sum_between(const Bitset& left, const Bitset& right) const;

 private:
  std::size_t left_ = 0, right_ = 0;
  std::vector<double> weights_;
};

/// Tripartite 3-graph with weights in [0,1]; absent cells weigh 0.
class WeightedTripartite {
 public:
  WeightedTripartite() = default;
  WeightedTripartite(std::size_t na, std::size_t nb, std::size_t nc);

  std::size_t part_size(std::size_t part) const { return sizes_.at(part); }
  std::array<std::size_t, 3> part_sizes() const noexcept { return sizes_; }
  double weight(std::size_t a, std::size_t b, std::size_t c) const {
    return weights_[(a * sizes_[1] + b) * sizes_[2] + c];
  }
  void set_weight(std::size_t a, std::size_t b, std::size_t c, double w);
  std::span<const double> cells() const noexcept { return weights_; }

  /// Weighted link of a pinned vertex: bipartite graph on the two other parts in order.
  WeightedBipartite link(Pin pin) const;

  friend bool operator==(const WeightedTripartite&, const WeightedTripartite&) = default;

 private:
  std::array<std::size_t, 3> sizes_{};
  std::vector<double> weights_;
};

/// Arbitrary k-uniform hypergraph on vertices 0..n-1, edges as k-subsets.
struct UniformHypergraph {
  std::size_t k = 0;
  std::size_t vertex_count = 0;
  std::vector<std::vector<std::size_t>> edges;
};

/// Edge cells in X_1 x ... x X_k (one subset per part, in part order).
std::uint64_t edge_count(const KPartiteHypergraph& h, std::span<const VertexSet> subsets);
/// Weight sum over the sub-box.
double weight_sum(const WeightedTripartite& h, std::span<const VertexSet> subsets);

/// Edge density of the sub-box; throws InvalidArgument naming an empty or mismatched part.
double density(const KPartiteHypergraph& h, std::span<const VertexSet> subsets);
double density(const WeightedTripartite& h, std::span<const VertexSet> subsets);

/// Link of k-2 pins in distinct parts: bipartite graph between the two unpinned parts,
/// lower part index on the left.
BipartiteGraph link(const KPartiteHypergraph& h, std::span<const Pin> pins);

/// Vertices v of `target` such that `others` + v is an edge. `others` lists one vertex
/// for every non-target part, in increasing part order.
VertexSet neighborhood(const KPartiteHypergraph& h, std::span<const std::size_t> others,
                       std::size_t target);

/// k-partite cover: k copies of V(H) with every ordering of every edge as a transversal edge.
KPartiteHypergraph partite_cover(const UniformHypergraph& h);

}  // namespace homopart

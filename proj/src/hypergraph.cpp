#include "homopart/hypergraph.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <string>

#include "homopart/error.hpp"

namespace homopart {

namespace {

std::size_t checked_product(const std::vector<std::size_t>& sizes, std::size_t count) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < count; ++i) {
    if (sizes[i] != 0 && total > SIZE_MAX / sizes[i]) throw InvalidArgument("hypergraph too large");
    total *= sizes[i];
  }
  return total;
}

void check_subsets(std::span<const std::size_t> sizes, std::span<const VertexSet> subsets) {
  if (subsets.size() != sizes.size())
    throw InvalidArgument("expected one subset per part (" + std::to_string(sizes.size()) + "), got " +
                          std::to_string(subsets.size()));
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (subsets[i].part != i)
      throw InvalidArgument("subset " + std::to_string(i) + " is tagged with part " +
                            std::to_string(subsets[i].part));
    if (subsets[i].members.size() != sizes[i])
      throw InvalidArgument("subset for part " + std::to_string(i) + " has length " +
                            std::to_string(subsets[i].members.size()) + ", part has " +
                            std::to_string(sizes[i]) + " vertices");
  }
}

void check_nonempty(std::span<const VertexSet> subsets) {
  for (const auto& s : subsets)
    if (s.members.none()) throw InvalidArgument("empty subset for part " + std::to_string(s.part));
}

}  // namespace

KPartiteHypergraph::KPartiteHypergraph(std::vector<std::size_t> part_sizes) : sizes_(std::move(part_sizes)) {
  if (sizes_.size() < 2) throw InvalidArgument("uniformity k must be at least 2");
  for (std::size_t i = 0; i < sizes_.size(); ++i)
    if (sizes_[i] == 0) throw InvalidArgument("part " + std::to_string(i) + " is empty");
  fibers_.assign(checked_product(sizes_, sizes_.size() - 1), Bitset(sizes_.back()));
}

std::size_t KPartiteHypergraph::prefix_index(std::span<const std::size_t> prefix) const {
  std::size_t index = 0;
  for (std::size_t i = 0; i + 1 < sizes_.size(); ++i) {
    if (prefix[i] >= sizes_[i]) throw InvalidArgument("vertex index out of range in part " + std::to_string(i));
    index = index * sizes_[i] + prefix[i];
  }
  return index;
}

void KPartiteHypergraph::prefix_tuple(std::size_t index, std::span<std::size_t> out) const {
  for (std::size_t i = sizes_.size() - 1; i-- > 0;) {
    out[i] = index % sizes_[i];
    index /= sizes_[i];
  }
}

void KPartiteHypergraph::check_tuple(std::span<const std::size_t> tuple) const {
  if (tuple.size() != sizes_.size())
    throw InvalidArgument("edge has " + std::to_string(tuple.size()) + " coordinates, expected " +
                          std::to_string(sizes_.size()));
  for (std::size_t i = 0; i < tuple.size(); ++i)
    if (tuple[i] >= sizes_[i]) throw InvalidArgument("vertex index out of range in part " + std::to_string(i));
}

bool KPartiteHypergraph::contains(std::span<const std::size_t> tuple) const {
  check_tuple(tuple);
  return fibers_[prefix_index(tuple)].test(tuple.back());
}

void KPartiteHypergraph::add_edge(std::span<const std::size_t> tuple) {
  check_tuple(tuple);
  fibers_[prefix_index(tuple)].set(tuple.back());
}

void KPartiteHypergraph::remove_edge(std::span<const std::size_t> tuple) {
  check_tuple(tuple);
  fibers_[prefix_index(tuple)].reset(tuple.back());
}

std::size_t KPartiteHypergraph::edge_count() const noexcept {
  std::size_t total = 0;
  for (const auto& f : fibers_) total += f.count();
  return total;
}

KPartiteHypergraph KPartiteHypergraph::with_part_last(std::size_t part) const {
  if (part >= k()) throw InvalidArgument("part index out of range");
  if (part == k() - 1) return *this;
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < k(); ++i)
    if (i != part) order.push_back(i);
  order.push_back(part);
  std::vector<std::size_t> sizes(k());
  for (std::size_t i = 0; i < k(); ++i) sizes[i] = sizes_[order[i]];
  KPartiteHypergraph out(std::move(sizes));
  std::vector<std::size_t> moved(k());
  for_each_edge([&](std::span<const std::size_t> e) {
    for (std::size_t i = 0; i < k(); ++i) moved[i] = e[order[i]];
    out.add_edge(moved);
  });
  return out;
}

BipartiteGraph::BipartiteGraph(std::size_t left_size, std::size_t right_size)
    : right_size_(right_size), rows_(left_size, Bitset(right_size)) {}

void BipartiteGraph::add_edge(std::size_t x, std::size_t y) {
  if (x >= rows_.size() || y >= right_size_) throw InvalidArgument("bipartite edge out of range");
  rows_[x].set(y);
}

void BipartiteGraph::set_row(std::size_t x, Bitset row) {
  if (row.size() != right_size_) throw InvalidArgument("row length does not match right side");
  rows_.at(x) = std::move(row);
}

std::size_t BipartiteGraph::edge_count() const noexcept {
  std::size_t total = 0;
  for (const auto& r : rows_) total += r.count();
  return total;
}

BipartiteGraph BipartiteGraph::transposed() const {
  BipartiteGraph t(right_size_, rows_.size());
  for (std::size_t x = 0; x < rows_.size(); ++x) rows_[x].for_each_set([&](std::size_t y) { t.rows_[y].set(x); });
  return t;
}

std::size_t BipartiteGraph::edges_between(const Bitset& left, const Bitset& right) const {
  std::size_t total = 0;
  left.for_each_set([&](std::size_t x) { total += rows_[x].count_and(right); });
  return total;
}

Graph::Graph(std::size_t n) : rows_(n, Bitset(n)) {}

void Graph::add_edge(std::size_t u, std::size_t v) {
  if (u >= rows_.size() || v >= rows_.size()) throw InvalidArgument("graph edge out of range");
  if (u == v) throw InvalidArgument("loops are not allowed");
  rows_[u].set(v);
  rows_[v].set(u);
}

WeightedBipartite::WeightedBipartite(std::size_t left_size, std::size_t right_size)
    : left_(left_size), right_(right_size), weights_(left_size * right_size, 0.0) {}

void WeightedBipartite::set_weight(std::size_t x, std::size_t y, double w) {
  if (x >= left_ || y >= right_) throw InvalidArgument("weighted edge out of range");
  if (!(w >= 0.0 && w <= 1.0)) throw InvalidArgument("weight outside [0,1]");
  weights_[x * right_ + y] = w;
}

double WeightedBipartite::sum_between(const Bitset& left, const Bitset& right) const {
  double total = 0.0;
  left.for_each_set([&](std::size_t x) {
    const double* row = weights_.data() + x * right_;
    right.for_each_set([&](std::size_t y) { total += row[y]; });
  });
  return total;
}

WeightedTripartite::WeightedTripartite(std::size_t na, std::size_t nb, std::size_t nc)
    : sizes_{na, nb, nc}, weights_(na * nb * nc, 0.0) {
  if (na == 0 || nb == 0 || nc == 0) throw InvalidArgument("weighted 3-graph parts must be nonempty");
}

void WeightedTripartite::set_weight(std::size_t a, std::size_t b, std::size_t c, double w) {
  if (a >= sizes_[0] || b >= sizes_[1] || c >= sizes_[2]) throw InvalidArgument("weighted cell out of range");
  if (!(w >= 0.0 && w <= 1.0)) throw InvalidArgument("weight outside [0,1]");
  weights_[(a * sizes_[1] + b) * sizes_[2] + c] = w;
}

WeightedBipartite WeightedTripartite::link(Pin pin) const {
  if (pin.part > 2 || pin.vertex >= sizes_[pin.part]) throw InvalidArgument("pin out of range");
  const std::size_t p = pin.part == 0 ? 1 : 0;
  const std::size_t q = pin.part == 2 ? 1 : 2;
  WeightedBipartite out(sizes_[p], sizes_[q]);
  std::array<std::size_t, 3> cell{};
  cell[pin.part] = pin.vertex;
  for (std::size_t x = 0; x < sizes_[p]; ++x)
    for (std::size_t y = 0; y < sizes_[q]; ++y) {
      cell[p] = x;
      cell[q] = y;
      out.set_weight(x, y, weight(cell[0], cell[1], cell[2]));
    }
  return out;
}

std::uint64_t edge_count(const KPartiteHypergraph& h, std::span<const VertexSet> subsets) {
  check_subsets(h.part_sizes(), subsets);
  const std::size_t k = h.k();
  std::uint64_t total = 0;
  // Walk prefixes restricted to the subsets, odometer style.
  std::vector<std::vector<std::size_t>> members(k - 1);
  for (std::size_t i = 0; i + 1 < k; ++i) {
    members[i] = subsets[i].members.indices();
    if (members[i].empty()) return 0;
  }
  std::vector<std::size_t> pos(k - 1, 0), prefix(k - 1);
  const Bitset& last = subsets[k - 1].members;
  while (true) {
    for (std::size_t i = 0; i + 1 < k; ++i) prefix[i] = members[i][pos[i]];
    total += h.fiber(h.prefix_index(prefix)).count_and(last);
    std::size_t i = k - 1;
    while (i-- > 0) {
      if (++pos[i] < members[i].size()) break;
      pos[i] = 0;
    }
    if (i == SIZE_MAX) break;
  }
  return total;
}

double weight_sum(const WeightedTripartite& h, std::span<const VertexSet> subsets) {
  const auto sizes = h.part_sizes();
  check_subsets(sizes, subsets);
  const auto as = subsets[0].members.indices();
  const auto bs = subsets[1].members.indices();
  const auto cs = subsets[2].members.indices();
  double total = 0.0;
  for (std::size_t a : as)
    for (std::size_t b : bs) {
      const double* row = h.cells().data() + (a * sizes[1] + b) * sizes[2];
      for (std::size_t c : cs) total += row[c];
    }
  return total;
}

double density(const KPartiteHypergraph& h, std::span<const VertexSet> subsets) {
  check_subsets(h.part_sizes(), subsets);
  check_nonempty(subsets);
  double cells = 1.0;
  for (const auto& s : subsets) cells *= static_cast<double>(s.size());
  return static_cast<double>(edge_count(h, subsets)) / cells;
}

double density(const WeightedTripartite& h, std::span<const VertexSet> subsets) {
  check_subsets(h.part_sizes(), subsets);
  check_nonempty(subsets);
  double cells = 1.0;
  for (const auto& s : subsets) cells *= static_cast<double>(s.size());
  return weight_sum(h, subsets) / cells;
}

BipartiteGraph link(const KPartiteHypergraph& h, std::span<const Pin> pins) {
  const std::size_t k = h.k();
  if (pins.size() != k - 2)
    throw InvalidArgument("link needs " + std::to_string(k - 2) + " pins, got " + std::to_string(pins.size()));
  std::vector<bool> pinned(k, false);
  std::vector<std::size_t> tuple(k, 0);
  for (const Pin& p : pins) {
    if (p.part >= k) throw InvalidArgument("pin part out of range");
    if (pinned[p.part]) throw InvalidArgument("two pins in part " + std::to_string(p.part));
    if (p.vertex >= h.part_size(p.part)) throw InvalidArgument("pin vertex out of range");
    pinned[p.part] = true;
    tuple[p.part] = p.vertex;
  }
  std::size_t x_part = k, y_part = k;
  for (std::size_t i = 0; i < k; ++i)
    if (!pinned[i]) (x_part == k ? x_part : y_part) = i;
  BipartiteGraph out(h.part_size(x_part), h.part_size(y_part));
  if (y_part == k - 1) {
    // Rows are fibers directly.
    for (std::size_t x = 0; x < out.left_size(); ++x) {
      tuple[x_part] = x;
      out.set_row(x, h.fiber(h.prefix_index(tuple)));
    }
  } else {
    // The last part is pinned: read single bits.
    for (std::size_t x = 0; x < out.left_size(); ++x)
      for (std::size_t y = 0; y < out.right_size(); ++y) {
        tuple[x_part] = x;
        tuple[y_part] = y;
        if (h.fiber(h.prefix_index(tuple)).test(tuple[k - 1])) out.add_edge(x, y);
      }
  }
  return out;
}

VertexSet neighborhood(const KPartiteHypergraph& h, std::span<const std::size_t> others, std::size_t target) {
  const std::size_t k = h.k();
  if (target >= k) throw InvalidArgument("target part out of range");
  if (others.size() != k - 1)
    throw InvalidArgument("neighborhood needs " + std::to_string(k - 1) + " vertices");
  std::vector<std::size_t> tuple(k, 0);
  for (std::size_t i = 0, j = 0; i < k; ++i) {
    if (i == target) continue;
    if (others[j] >= h.part_size(i)) throw InvalidArgument("vertex index out of range in part " + std::to_string(i));
    tuple[i] = others[j++];
  }
  if (target == k - 1) return {target, h.fiber(h.prefix_index(tuple))};
  VertexSet out = VertexSet::empty(target, h.part_size(target));
  for (std::size_t v = 0; v < h.part_size(target); ++v) {
    tuple[target] = v;
    if (h.fiber(h.prefix_index(tuple)).test(tuple[k - 1])) out.members.set(v);
  }
  return out;
}

KPartiteHypergraph partite_cover(const UniformHypergraph& h) {
  if (h.k < 2) throw InvalidArgument("uniformity k must be at least 2");
  if (h.vertex_count == 0) throw InvalidArgument("hypergraph has no vertices");
  KPartiteHypergraph cover(std::vector<std::size_t>(h.k, h.vertex_count));
  for (std::size_t idx = 0; idx < h.edges.size(); ++idx) {
    auto e = h.edges[idx];
    if (e.size() != h.k)
      throw InvalidArgument("edge " + std::to_string(idx) + " has " + std::to_string(e.size()) + " vertices");
    std::sort(e.begin(), e.end());
    if (std::adjacent_find(e.begin(), e.end()) != e.end())
      throw InvalidArgument("edge " + std::to_string(idx) + " repeats a vertex");
    if (e.back() >= h.vertex_count) throw InvalidArgument("edge " + std::to_string(idx) + " vertex out of range");
    do cover.add_edge(e);
    while (std::next_permutation(e.begin(), e.end()));
  }
  return cover;
}

}  // namespace homopart

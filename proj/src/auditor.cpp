#include "homopart/auditor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <string>

#include "homopart/error.hpp"
#include "homopart/parallel.hpp"
#include "homopart/rng.hpp"

namespace homopart {

namespace {

using Label = PartPartition::Label;

constexpr double kTol = 1e-9;
constexpr std::size_t kMaxAuditTuples = std::size_t{1} << 28;

// Index of each label among the nonempty labels of a part, or SIZE_MAX.
std::vector<std::size_t> label_slots(const PartPartition& p, const std::vector<Label>& labels) {
  std::vector<std::size_t> slot(p.regular_count() + 1, SIZE_MAX);
  for (std::size_t i = 0; i < labels.size(); ++i) slot[labels[i]] = i;
  return slot;
}

HomogeneityReport prepare_report(const std::vector<const PartPartition*>& parts, double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw InvalidArgument("eps must lie in [0,1]");
  HomogeneityReport r;
  r.eps = eps;
  std::size_t tuples = 1;
  r.total = 1.0;
  for (const PartPartition* p : parts) {
    r.labels.push_back(p->nonempty_labels());
    std::vector<std::size_t> sizes;
    for (Label l : r.labels.back()) sizes.push_back(p->block_size(l));
    r.sizes.push_back(std::move(sizes));
    if (r.labels.back().empty()) throw InvalidArgument("partition of an empty part");
    if (tuples > kMaxAuditTuples / r.labels.back().size()) throw Infeasible("too many block tuples to audit exactly");
    tuples *= r.labels.back().size();
    r.total *= static_cast<double>(p->universe());
  }
  r.tuple_weight.assign(tuples, 0.0);
  return r;
}

void finish_report(HomogeneityReport& r) {
  r.homogeneous.assign(r.tuple_count(), 1);
  r.mass = 0.0;
  r.failing = 0;
  for (std::size_t t = 0; t < r.tuple_count(); ++t) {
    const double cells = r.tuple_cells(t);
    if (!is_homogeneous(r.tuple_weight[t], cells, r.eps)) {
      r.homogeneous[t] = 0;
      r.mass += cells;
      ++r.failing;
    }
  }
  r.normalized_mass = r.mass / r.total;
  r.pass = r.mass <= r.eps * r.total + kTol * r.total;
}

void check_layered(const std::vector<std::size_t>& sizes, const LayeredPartition& p) {
  if (p.k() != sizes.size())
    throw InvalidArgument("partition has " + std::to_string(p.k()) + " parts, hypergraph has " +
                          std::to_string(sizes.size()));
  for (std::size_t i = 0; i < sizes.size(); ++i)
    if (p[i].universe() != sizes[i])
      throw InvalidArgument("partition of part " + std::to_string(i) + " covers " + std::to_string(p[i].universe()) +
                            " vertices, part has " + std::to_string(sizes[i]));
}

std::vector<const PartPartition*> pointers(const LayeredPartition& p) {
  std::vector<const PartPartition*> out;
  for (const auto& part : p.parts) out.push_back(&part);
  return out;
}

}  // namespace

std::vector<Label> HomogeneityReport::tuple_labels(std::size_t index) const {
  std::vector<Label> out(labels.size());
  for (std::size_t i = labels.size(); i-- > 0;) {
    out[i] = labels[i][index % labels[i].size()];
    index /= labels[i].size();
  }
  return out;
}

double HomogeneityReport::tuple_cells(std::size_t index) const {
  double cells = 1.0;
  for (std::size_t i = labels.size(); i-- > 0;) {
    cells *= static_cast<double>(sizes[i][index % sizes[i].size()]);
    index /= sizes[i].size();
  }
  return cells;
}

bool is_homogeneous(double weight, double cells, double eps) noexcept {
  return weight <= eps * cells + kTol || weight >= (1.0 - eps) * cells - kTol;
}

HomogeneityReport homogeneity_audit(const KPartiteHypergraph& h, const LayeredPartition& p, double eps) {
  check_layered(h.part_sizes(), p);
  HomogeneityReport r = prepare_report(pointers(p), eps);
  const std::size_t k = h.k();
  std::vector<std::vector<std::size_t>> slot(k);
  for (std::size_t i = 0; i < k; ++i) slot[i] = label_slots(p[i], r.labels[i]);
  const std::size_t last_blocks = r.labels[k - 1].size();
  std::vector<std::size_t> last_slot(h.part_size(k - 1));
  for (std::size_t v = 0; v < last_slot.size(); ++v) last_slot[v] = slot[k - 1][p[k - 1].label(v)];

  std::vector<std::uint64_t> counts(r.tuple_count(), 0);
  std::vector<std::size_t> prefix(k - 1, 0);
  for (std::size_t f = 0; f < h.prefix_count(); ++f) {
    h.prefix_tuple(f, prefix);
    std::size_t base = 0;
    for (std::size_t i = 0; i + 1 < k; ++i) base = base * r.labels[i].size() + slot[i][p[i].label(prefix[i])];
    base *= last_blocks;
    h.fiber(f).for_each_set([&](std::size_t v) { ++counts[base + last_slot[v]]; });
  }
  for (std::size_t t = 0; t < counts.size(); ++t) r.tuple_weight[t] = static_cast<double>(counts[t]);
  finish_report(r);
  return r;
}

HomogeneityReport homogeneity_audit(const WeightedTripartite& h, const LayeredPartition& p, double eps) {
  const auto sz = h.part_sizes();
  check_layered({sz[0], sz[1], sz[2]}, p);
  HomogeneityReport r = prepare_report(pointers(p), eps);
  r.weighted = true;
  std::array<std::vector<std::size_t>, 3> s;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto slot = label_slots(p[i], r.labels[i]);
    s[i].resize(sz[i]);
    for (std::size_t v = 0; v < sz[i]; ++v) s[i][v] = slot[p[i].label(v)];
  }
  const std::size_t nb = r.labels[1].size(), nc = r.labels[2].size();
  auto cells = h.cells();
  for (std::size_t a = 0; a < sz[0]; ++a)
    for (std::size_t b = 0; b < sz[1]; ++b) {
      const double* row = cells.data() + (a * sz[1] + b) * sz[2];
      const std::size_t base = (s[0][a] * nb + s[1][b]) * nc;
      for (std::size_t c = 0; c < sz[2]; ++c) r.tuple_weight[base + s[2][c]] += row[c];
    }
  finish_report(r);
  return r;
}

HomogeneityReport homogeneity_audit(const BipartiteGraph& g, const PartPartition& left, const PartPartition& right,
                                    double eps) {
  if (left.universe() != g.left_size() || right.universe() != g.right_size())
    throw InvalidArgument("partition sizes do not match the bipartite graph");
  HomogeneityReport r = prepare_report({&left, &right}, eps);
  const auto ls = label_slots(left, r.labels[0]);
  const auto rs = label_slots(right, r.labels[1]);
  const std::size_t nr = r.labels[1].size();
  std::vector<Bitset> masks;
  for (Label l : r.labels[1]) masks.push_back(right.members(l));
  for (std::size_t x = 0; x < g.left_size(); ++x) {
    const std::size_t base = ls[left.label(x)] * nr;
    for (std::size_t j = 0; j < nr; ++j) r.tuple_weight[base + j] += static_cast<double>(g.row(x).count_and(masks[j]));
  }
  (void)rs;
  finish_report(r);
  return r;
}

HomogeneityReport homogeneity_audit(const UniformHypergraph& h, const PartPartition& p, double eps) {
  if (p.universe() != h.vertex_count) throw InvalidArgument("partition does not cover the vertex set");
  const KPartiteHypergraph cover = partite_cover(h);
  std::vector<PartPartition> parts;
  for (std::size_t i = 0; i < h.k; ++i) parts.emplace_back(i, std::vector<Label>(p.labels().begin(), p.labels().end()));
  return homogeneity_audit(cover, LayeredPartition(std::move(parts)), eps);
}

std::uint64_t DisagreementCounts::regular_total() const noexcept {
  return std::accumulate(regular.begin(), regular.end(), std::uint64_t{0});
}

DisagreementCounts disagreement_pairs(const KPartiteHypergraph& h, const LayeredPartition& p) {
  check_layered(h.part_sizes(), p);
  const std::size_t k = h.k();
  DisagreementCounts out;
  out.regular.assign(k, 0);
  out.exceptional.assign(k, 0);
  for (std::size_t i = 0; i < k; ++i) {
    const KPartiteHypergraph g = h.with_part_last(i);
    const PartPartition& part = p[i];
    std::vector<Label> labels = part.nonempty_labels();
    std::vector<Bitset> masks;
    for (Label l : labels) masks.push_back(part.members(l));
    for (std::size_t f = 0; f < g.prefix_count(); ++f) {
      const Bitset& fiber = g.fiber(f);
      for (std::size_t j = 0; j < labels.size(); ++j) {
        const std::uint64_t a = fiber.count_and(masks[j]);
        const std::uint64_t pairs = a * (part.block_size(labels[j]) - a);
        (labels[j] == 0 ? out.exceptional[i] : out.regular[i]) += pairs;
      }
    }
  }
  return out;
}

double disagreement_threshold(double eps, double n, std::size_t k, double s) noexcept {
  return eps * eps * (1.0 - eps) * std::pow(n, static_cast<double>(k + 1)) / s;
}

const char* to_string(SearchMode mode) noexcept { return mode == SearchMode::exact ? "exact" : "sampled"; }

std::size_t min_subset_size(double eps, std::size_t block) noexcept {
  const double need = std::ceil(eps * static_cast<double>(block) - kTol);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::max(0.0, need)));
}

namespace {

// Densities of sub-boxes for the tripartite sources.
double box_density(const KPartiteHypergraph& h, std::span<const VertexSet> s) { return density(h, s); }
double box_density(const WeightedTripartite& h, std::span<const VertexSet> s) { return density(h, s); }
double cell(const KPartiteHypergraph& h, std::size_t a, std::size_t b, std::size_t c) {
  const std::size_t t[3] = {a, b, c};
  return h.contains(t) ? 1.0 : 0.0;
}
double cell(const WeightedTripartite& h, std::size_t a, std::size_t b, std::size_t c) { return h.weight(a, b, c); }

std::vector<VertexSet> check_blocks3(const std::array<std::size_t, 3>& sizes, std::span<const VertexSet> blocks) {
  if (blocks.size() != 3) throw InvalidArgument("tripartite witness search needs three blocks");
  std::vector<VertexSet> out(blocks.begin(), blocks.end());
  for (std::size_t i = 0; i < 3; ++i) {
    if (out[i].part != i || out[i].members.size() != sizes[i])
      throw InvalidArgument("block " + std::to_string(i) + " does not match part " + std::to_string(i));
    if (out[i].members.none()) throw InvalidArgument("empty block for part " + std::to_string(i));
  }
  return out;
}

// Runs draws [0, budget) in parallel batches; returns the lowest-index hit.
template <class Draw>
std::uint64_t first_hit(std::uint64_t budget, Draw&& draw, std::uint64_t& evaluated) {
  constexpr std::uint64_t kBatch = 512;
  for (std::uint64_t start = 0; start < budget; start += kBatch) {
    const std::uint64_t end = std::min(budget, start + kBatch);
    std::vector<std::uint8_t> hit(end - start, 0);
    parallel_for(start, end, [&](std::size_t i) { hit[i - start] = draw(i) ? 1 : 0; });
    for (std::uint64_t i = start; i < end; ++i)
      if (hit[i - start]) {
        evaluated = i + 1;
        return i;
      }
  }
  evaluated = budget;
  return UINT64_MAX;
}

// Random subset of `block`, each member kept with probability p.
Bitset sample_subset(const Bitset& block, const rng::Stream& stream, std::uint64_t offset, double p) {
  Bitset out(block.size());
  block.for_each_set([&](std::size_t v) {
    if (stream.unit_at(offset + v) < p) out.set(v);
  });
  return out;
}

template <class H>
RegularityWitness tripartite_search(const H& h, std::span<const VertexSet> blocks_in, double eps,
                                    const WitnessOptions& opt) {
  const auto sizes = [&] {
    if constexpr (std::is_same_v<H, KPartiteHypergraph>) {
      if (h.k() != 3) throw InvalidArgument("weak regularity search needs a 3-partite 3-graph");
      return std::array<std::size_t, 3>{h.part_size(0), h.part_size(1), h.part_size(2)};
    } else {
      return h.part_sizes();
    }
  }();
  RegularityWitness w;
  w.mode = opt.mode;
  w.eps = eps;
  w.blocks = check_blocks3(sizes, blocks_in);
  w.outer_density = box_density(h, w.blocks);
  std::array<std::vector<std::size_t>, 3> members;
  std::array<std::size_t, 3> mins{};
  for (std::size_t i = 0; i < 3; ++i) {
    members[i] = w.blocks[i].members.indices();
    mins[i] = min_subset_size(eps, members[i].size());
  }

  auto accept = [&](std::vector<VertexSet> subsets) {
    const double inner = box_density(h, subsets);
    const double dev = std::fabs(inner - w.outer_density);
    if (!(dev > eps)) return false;
    w.found = true;
    w.subsets = std::move(subsets);
    w.inner_density = inner;
    w.deviation = dev;
    return true;
  };

  if (opt.mode == SearchMode::sampled) {
    const rng::Stream root(rng::derive(opt.seed, "weak-regularity-witness"));
    const double p = std::max(eps, 0.5);
    const std::size_t stride = sizes[0] + sizes[1] + sizes[2];
    auto subsets_for = [&](std::uint64_t i) {
      const rng::Stream s = root.child(i);
      std::vector<VertexSet> out;
      std::size_t offset = 0;
      for (std::size_t part = 0; part < 3; ++part) {
        out.push_back({part, sample_subset(w.blocks[part].members, s, offset, p)});
        offset += sizes[part];
      }
      (void)stride;
      return out;
    };
    std::uint64_t evaluated = 0;
    const std::uint64_t hit = first_hit(opt.budget, [&](std::uint64_t i) {
      auto subsets = subsets_for(i);
      for (std::size_t part = 0; part < 3; ++part)
        if (subsets[part].members.count() < mins[part]) return false;
      return std::fabs(box_density(h, subsets) - w.outer_density) > eps;
    }, evaluated);
    w.evaluated = evaluated;
    if (hit != UINT64_MAX) accept(subsets_for(hit));
    return w;
  }

  // Exact: enumerate the two smallest blocks, optimize the third by sorting.
  std::array<std::size_t, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return members[a].size() < members[b].size(); });
  const std::size_t e0 = order[0], e1 = order[1], o = order[2];
  const std::size_t b0 = members[e0].size(), b1 = members[e1].size(), b2 = members[o].size();
  if (b0 > kExactBlockCap || b1 > kExactBlockCap || b0 + b1 > kExactJointCap)
    throw InvalidArgument("exact witness search needs the two smallest blocks to have at most " +
                          std::to_string(kExactJointCap) + " vertices together (each at most " +
                          std::to_string(kExactBlockCap) + "); use sampled mode");
  std::vector<double> t(b0 * b1 * b2);
  for (std::size_t x = 0; x < b0; ++x)
    for (std::size_t y = 0; y < b1; ++y)
      for (std::size_t z = 0; z < b2; ++z) {
        std::array<std::size_t, 3> c{};
        c[e0] = members[e0][x];
        c[e1] = members[e1][y];
        c[o] = members[o][z];
        t[(x * b1 + y) * b2 + z] = cell(h, c[0], c[1], c[2]);
      }
  const std::size_t zm = mins[o];
  std::vector<double> s(b1 * b2, 0.0), acc(b2), sorted(b2);
  std::vector<std::size_t> idx(b2);
  std::uint64_t evaluated = 0;
  std::uint64_t xmask = 0;
  for (std::uint64_t gx = 1; gx < (std::uint64_t{1} << b0); ++gx) {
    const std::size_t xbit = static_cast<std::size_t>(std::countr_zero(gx));
    xmask ^= std::uint64_t{1} << xbit;
    const double sign = (xmask >> xbit) & 1 ? 1.0 : -1.0;
    for (std::size_t j = 0; j < b1 * b2; ++j) s[j] += sign * t[xbit * b1 * b2 + j];
    const std::size_t xc = static_cast<std::size_t>(std::popcount(xmask));
    if (xc < mins[e0]) continue;
    std::fill(acc.begin(), acc.end(), 0.0);
    std::uint64_t ymask = 0;
    for (std::uint64_t gy = 1; gy < (std::uint64_t{1} << b1); ++gy) {
      const std::size_t ybit = static_cast<std::size_t>(std::countr_zero(gy));
      ymask ^= std::uint64_t{1} << ybit;
      const double ys = (ymask >> ybit) & 1 ? 1.0 : -1.0;
      for (std::size_t z = 0; z < b2; ++z) acc[z] += ys * s[ybit * b2 + z];
      const std::size_t yc = static_cast<std::size_t>(std::popcount(ymask));
      if (yc < mins[e1]) continue;
      ++evaluated;
      std::iota(idx.begin(), idx.end(), 0);
      std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return acc[a] < acc[b]; });
      double low = 0.0, high = 0.0;
      for (std::size_t j = 0; j < zm; ++j) {
        low += acc[idx[j]];
        high += acc[idx[b2 - 1 - j]];
      }
      const double cells = static_cast<double>(xc * yc * zm);
      const bool high_hit = high / cells - w.outer_density > eps;
      const bool low_hit = w.outer_density - low / cells > eps;
      if (!high_hit && !low_hit) continue;
      std::vector<VertexSet> subsets(3);
      for (std::size_t part = 0; part < 3; ++part) subsets[part] = VertexSet::empty(part, sizes[part]);
      for (std::size_t x = 0; x < b0; ++x)
        if ((xmask >> x) & 1) subsets[e0].members.set(members[e0][x]);
      for (std::size_t y = 0; y < b1; ++y)
        if ((ymask >> y) & 1) subsets[e1].members.set(members[e1][y]);
      for (std::size_t j = 0; j < zm; ++j)
        subsets[o].members.set(members[o][high_hit ? idx[b2 - 1 - j] : idx[j]]);
      if (accept(std::move(subsets))) {
        w.evaluated = evaluated;
        return w;
      }
    }
  }
  w.evaluated = evaluated;
  return w;
}

double pair_density(const BipartiteGraph& g, const Bitset& x, const Bitset& y) {
  return static_cast<double>(g.edges_between(x, y)) / (static_cast<double>(x.count()) * static_cast<double>(y.count()));
}
double pair_density(const WeightedBipartite& g, const Bitset& x, const Bitset& y) {
  return g.sum_between(x, y) / (static_cast<double>(x.count()) * static_cast<double>(y.count()));
}
double pair_cell(const BipartiteGraph& g, std::size_t x, std::size_t y) { return g.has_edge(x, y) ? 1.0 : 0.0; }
double pair_cell(const WeightedBipartite& g, std::size_t x, std::size_t y) { return g.weight(x, y); }

template <class G>
RegularityWitness bipartite_search(const G& g, const Bitset& left, const Bitset& right, double eps,
                                   const WitnessOptions& opt) {
  if (left.size() != g.left_size() || right.size() != g.right_size())
    throw InvalidArgument("blocks do not match the bipartite graph");
  if (left.none() || right.none()) throw InvalidArgument("empty block in bipartite witness search");
  RegularityWitness w;
  w.mode = opt.mode;
  w.eps = eps;
  w.blocks = {{0, left}, {1, right}};
  w.outer_density = pair_density(g, left, right);
  const std::array<std::vector<std::size_t>, 2> members{left.indices(), right.indices()};
  const std::array<std::size_t, 2> mins{min_subset_size(eps, members[0].size()),
                                        min_subset_size(eps, members[1].size())};
  auto accept = [&](Bitset x, Bitset y) {
    const double inner = pair_density(g, x, y);
    const double dev = std::fabs(inner - w.outer_density);
    if (!(dev > eps)) return false;
    w.found = true;
    w.subsets = {{0, std::move(x)}, {1, std::move(y)}};
    w.inner_density = inner;
    w.deviation = dev;
    return true;
  };

  if (opt.mode == SearchMode::sampled) {
    const rng::Stream root(rng::derive(opt.seed, "bipartite-regularity-witness"));
    const double p = std::max(eps, 0.5);
    auto draw_sets = [&](std::uint64_t i) {
      const rng::Stream s = root.child(i);
      return std::pair{sample_subset(left, s, 0, p), sample_subset(right, s, left.size(), p)};
    };
    std::uint64_t evaluated = 0;
    const std::uint64_t hit = first_hit(opt.budget, [&](std::uint64_t i) {
      auto [x, y] = draw_sets(i);
      if (x.count() < mins[0] || y.count() < mins[1]) return false;
      return std::fabs(pair_density(g, x, y) - w.outer_density) > eps;
    }, evaluated);
    w.evaluated = evaluated;
    if (hit != UINT64_MAX) {
      auto [x, y] = draw_sets(hit);
      accept(std::move(x), std::move(y));
    }
    return w;
  }

  // Exact: enumerate the smaller side, optimize the other by sorting.
  const std::size_t e = members[0].size() <= members[1].size() ? 0 : 1;
  const std::size_t o = 1 - e;
  const std::size_t be = members[e].size(), bo = members[o].size();
  if (be > kExactBlockCap)
    throw InvalidArgument("exact witness search needs a block of at most " + std::to_string(kExactBlockCap) +
                          " vertices; use sampled mode");
  std::vector<double> t(be * bo);
  for (std::size_t i = 0; i < be; ++i)
    for (std::size_t j = 0; j < bo; ++j)
      t[i * bo + j] = e == 0 ? pair_cell(g, members[0][i], members[1][j]) : pair_cell(g, members[0][j], members[1][i]);
  const std::size_t om = mins[o];
  std::vector<double> acc(bo, 0.0);
  std::vector<std::size_t> idx(bo);
  std::uint64_t mask = 0, evaluated = 0;
  for (std::uint64_t gc = 1; gc < (std::uint64_t{1} << be); ++gc) {
    const std::size_t bit = static_cast<std::size_t>(std::countr_zero(gc));
    mask ^= std::uint64_t{1} << bit;
    const double sign = (mask >> bit) & 1 ? 1.0 : -1.0;
    for (std::size_t j = 0; j < bo; ++j) acc[j] += sign * t[bit * bo + j];
    const std::size_t c = static_cast<std::size_t>(std::popcount(mask));
    if (c < mins[e]) continue;
    ++evaluated;
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return acc[a] < acc[b]; });
    double low = 0.0, high = 0.0;
    for (std::size_t j = 0; j < om; ++j) {
      low += acc[idx[j]];
      high += acc[idx[bo - 1 - j]];
    }
    const double cells = static_cast<double>(c * om);
    const bool high_hit = high / cells - w.outer_density > eps;
    const bool low_hit = w.outer_density - low / cells > eps;
    if (!high_hit && !low_hit) continue;
    std::array<Bitset, 2> sets{Bitset(g.left_size()), Bitset(g.right_size())};
    for (std::size_t i = 0; i < be; ++i)
      if ((mask >> i) & 1) sets[e].set(members[e][i]);
    for (std::size_t j = 0; j < om; ++j) sets[o].set(members[o][high_hit ? idx[bo - 1 - j] : idx[j]]);
    if (accept(std::move(sets[0]), std::move(sets[1]))) {
      w.evaluated = evaluated;
      return w;
    }
  }
  w.evaluated = evaluated;
  return w;
}

template <class H>
bool reverify_tripartite(const H& h, const RegularityWitness& w) {
  if (!w.found || w.subsets.size() != 3 || w.blocks.size() != 3) return false;
  for (std::size_t i = 0; i < 3; ++i) {
    if (w.subsets[i].members.size() != w.blocks[i].members.size()) return false;
    if ((w.subsets[i].members & ~w.blocks[i].members).any()) return false;
    if (w.subsets[i].size() < min_subset_size(w.eps, w.blocks[i].size())) return false;
  }
  const double outer = box_density(h, w.blocks);
  const double inner = box_density(h, w.subsets);
  return outer == w.outer_density && inner == w.inner_density && std::fabs(inner - outer) == w.deviation &&
         w.deviation > w.eps;
}

template <class G>
bool reverify_bipartite(const G& g, const RegularityWitness& w) {
  if (!w.found || w.subsets.size() != 2 || w.blocks.size() != 2) return false;
  for (std::size_t i = 0; i < 2; ++i) {
    if (w.subsets[i].members.size() != w.blocks[i].members.size()) return false;
    if ((w.subsets[i].members & ~w.blocks[i].members).any()) return false;
    if (w.subsets[i].size() < min_subset_size(w.eps, w.blocks[i].size())) return false;
  }
  const double outer = pair_density(g, w.blocks[0].members, w.blocks[1].members);
  const double inner = pair_density(g, w.subsets[0].members, w.subsets[1].members);
  return outer == w.outer_density && inner == w.inner_density && std::fabs(inner - outer) == w.deviation &&
         w.deviation > w.eps;
}

}  // namespace

RegularityWitness weak_regularity_witness(const KPartiteHypergraph& h, std::span<const VertexSet> blocks, double eps,
                                          const WitnessOptions& options) {
  return tripartite_search(h, blocks, eps, options);
}
RegularityWitness weak_regularity_witness(const WeightedTripartite& h, std::span<const VertexSet> blocks, double eps,
                                          const WitnessOptions& options) {
  return tripartite_search(h, blocks, eps, options);
}
RegularityWitness bipartite_regularity_witness(const BipartiteGraph& g, const Bitset& left, const Bitset& right,
                                               double eps, const WitnessOptions& options) {
  return bipartite_search(g, left, right, eps, options);
}
RegularityWitness bipartite_regularity_witness(const WeightedBipartite& g, const Bitset& left, const Bitset& right,
                                               double eps, const WitnessOptions& options) {
  return bipartite_search(g, left, right, eps, options);
}

bool reverify(const KPartiteHypergraph& h, const RegularityWitness& w) { return reverify_tripartite(h, w); }
bool reverify(const WeightedTripartite& h, const RegularityWitness& w) { return reverify_tripartite(h, w); }
bool reverify(const BipartiteGraph& g, const RegularityWitness& w) { return reverify_bipartite(g, w); }
bool reverify(const WeightedBipartite& g, const RegularityWitness& w) { return reverify_bipartite(g, w); }

namespace {

// Largest d <= d_max such that some d candidates are shattered. columns[v] holds the
// witnesses adjacent to candidate v.
VcResult shatter_search(std::vector<Bitset> columns, std::size_t witness_count, std::size_t d_max) {
  std::sort(columns.begin(), columns.end(), [](const Bitset& a, const Bitset& b) {
    return std::lexicographical_compare(a.words().begin(), a.words().end(), b.words().begin(), b.words().end());
  });
  columns.erase(std::unique(columns.begin(), columns.end()), columns.end());
  d_max = std::min<std::size_t>(d_max, 20);
  std::size_t best = 0;
  std::vector<std::uint32_t> sig(witness_count, 0);
  std::vector<std::uint8_t> seen;
  // Depth-first over increasing candidate indices; every prefix must itself be shattered.
  auto dfs = [&](auto&& self, std::size_t start, std::size_t depth) -> void {
    if (depth > best) best = depth;
    if (best >= d_max || depth == d_max) return;
    if ((std::size_t{1} << (depth + 1)) > witness_count) return;
    for (std::size_t v = start; v < columns.size() && best < d_max; ++v) {
      columns[v].for_each_set([&](std::size_t w) { sig[w] |= std::uint32_t{1} << depth; });
      seen.assign(std::size_t{1} << (depth + 1), 0);
      std::size_t distinct = 0;
      for (std::size_t w = 0; w < witness_count; ++w)
        if (!seen[sig[w]]) {
          seen[sig[w]] = 1;
          ++distinct;
        }
      if (distinct == (std::size_t{1} << (depth + 1))) self(self, v + 1, depth + 1);
      columns[v].for_each_set([&](std::size_t w) { sig[w] &= ~(std::uint32_t{1} << depth); });
    }
  };
  if (witness_count > 0) dfs(dfs, 0, 0);
  return {best, best >= d_max};
}

}  // namespace

VcResult vc_dimension(const BipartiteGraph& g, std::size_t d_max) {
  const BipartiteGraph t = g.transposed();
  std::vector<Bitset> left_cols, right_cols;
  for (std::size_t x = 0; x < g.left_size(); ++x) left_cols.push_back(g.row(x));
  for (std::size_t y = 0; y < t.left_size(); ++y) right_cols.push_back(t.row(y));
  const VcResult a = shatter_search(std::move(left_cols), g.right_size(), d_max);
  const VcResult b = shatter_search(std::move(right_cols), g.left_size(), d_max);
  return a.dimension >= b.dimension ? a : b;
}

VcResult vc_dimension(const Graph& g, std::size_t d_max) {
  std::vector<Bitset> cols;
  for (std::size_t v = 0; v < g.size(); ++v) cols.push_back(g.row(v));
  return shatter_search(std::move(cols), g.size(), d_max);
}

VcResult slicewise_vc(const KPartiteHypergraph& h, std::size_t d_max) {
  const std::size_t k = h.k();
  struct Slice {
    std::vector<std::size_t> pinned_parts;
    std::size_t count;
  };
  std::vector<Slice> slices;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) {
      Slice s{{}, 1};
      for (std::size_t p = 0; p < k; ++p)
        if (p != i && p != j) {
          s.pinned_parts.push_back(p);
          s.count *= h.part_size(p);
        }
      slices.push_back(std::move(s));
    }
  std::vector<std::size_t> offsets{0};
  for (const auto& s : slices) offsets.push_back(offsets.back() + s.count);
  std::vector<VcResult> results(offsets.back());
  parallel_for(0, offsets.back(), [&](std::size_t idx) {
    const std::size_t si = static_cast<std::size_t>(std::upper_bound(offsets.begin(), offsets.end(), idx) - offsets.begin()) - 1;
    const Slice& s = slices[si];
    std::size_t local = idx - offsets[si];
    std::vector<Pin> pins(s.pinned_parts.size());
    for (std::size_t q = s.pinned_parts.size(); q-- > 0;) {
      const std::size_t n = h.part_size(s.pinned_parts[q]);
      pins[q] = {s.pinned_parts[q], local % n};
      local /= n;
    }
    results[idx] = vc_dimension(link(h, pins), d_max);
  });
  VcResult best;
  for (const auto& r : results)
    if (r.dimension > best.dimension || (r.dimension == best.dimension && r.at_least)) best = r;
  return best;
}

}  // namespace homopart

#include "homopart/generator.hpp"

#include <numeric>

#include "homopart/error.hpp"
#include "homopart/rng.hpp"

namespace homopart {

namespace {

using Label = PartPartition::Label;

std::vector<std::size_t> shuffled(std::size_t n, const rng::Stream& s) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[s.below_at(i, i)]);
  return order;
}

std::shared_ptr<LinkTable> table_from_blocks(const std::vector<std::size_t>& sizes,
                                             const std::vector<PartPartition>& blocks) {
  auto table = std::make_shared<LinkTable>();
  table->part_sizes = sizes;
  for (auto& pins : all_pin_tuples(sizes)) {
    std::vector<bool> pinned(sizes.size(), false);
    for (const Pin& p : pins) pinned[p.part] = true;
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < sizes.size(); ++i)
      if (!pinned[i]) free.push_back(i);
    table->entries.emplace(std::move(pins), LinkPartition{blocks[free[0]], blocks[free[1]]});
  }
  return table;
}

// Adds every tuple whose block labels (0-based) satisfy `keep`.
template <class Keep>
void fill_by_blocks(KPartiteHypergraph& h, const std::vector<PartPartition>& blocks, Keep keep) {
  const std::size_t k = h.k();
  std::vector<std::size_t> tuple(k, 0), labels(k, 0);
  std::size_t total = 1;
  for (std::size_t i = 0; i < k; ++i) total *= h.part_size(i);
  for (std::size_t idx = 0; idx < total; ++idx) {
    for (std::size_t i = k, rest = idx; i-- > 0;) {
      tuple[i] = rest % h.part_size(i);
      rest /= h.part_size(i);
      labels[i] = blocks[i].label(tuple[i]) - 1;
    }
    if (keep(labels)) h.add_edge(tuple);
  }
}

}  // namespace

const char* to_string(Family family) noexcept {
  switch (family) {
    case Family::planted_boxes: return "planted-boxes";
    case Family::product: return "product";
    case Family::interval_threshold: return "interval-threshold";
    case Family::uniform_random: return "uniform-random";
  }
  return "?";
}

Family parse_family(const std::string& name) {
  for (Family f : {Family::planted_boxes, Family::product, Family::interval_threshold, Family::uniform_random})
    if (name == to_string(f)) return f;
  throw InvalidArgument("unknown family '" + name + "'");
}

PartPartition random_blocks(std::size_t part, std::size_t n, std::size_t r, std::uint64_t seed) {
  if (r == 0 || r > n) throw InvalidArgument("need 1 <= r <= n for a block partition");
  const auto order = shuffled(n, rng::Stream(rng::derive(seed, "blocks")));
  std::vector<Label> labels(n);
  for (std::size_t p = 0; p < n; ++p) labels[order[p]] = static_cast<Label>(p * r / n + 1);
  return PartPartition(part, std::move(labels));
}

LinkPartitionOracle GeneratedInstance::oracle() const {
  if (!links) throw InvalidArgument("instance has no planted link partitions");
  return table_oracle(links, r);
}

GeneratedInstance generate(const InstanceSpec& spec) {
  const std::size_t k = spec.k;
  if (k < 3) throw InvalidArgument("k must be at least 3");
  std::vector<std::size_t> sizes = spec.n;
  if (sizes.size() == 1) sizes.assign(k, sizes[0]);
  if (sizes.size() != k) throw InvalidArgument("need one part size or k part sizes");
  for (std::size_t s : sizes)
    if (s == 0) throw InvalidArgument("part sizes must be positive");
  if (spec.family != Family::uniform_random && spec.family != Family::product && spec.r == 0)
    throw InvalidArgument("planted families need r >= 1");

  GeneratedInstance out;
  out.hypergraph = KPartiteHypergraph(sizes);
  KPartiteHypergraph& h = out.hypergraph;
  const std::uint64_t seed = spec.seed;
  std::vector<PartPartition> blocks;
  switch (spec.family) {
    case Family::planted_boxes: {
      for (std::size_t i = 0; i < k; ++i)
        blocks.push_back(random_blocks(i, sizes[i], spec.r, rng::derive(seed, "part-" + std::to_string(i))));
      const rng::Stream pattern(rng::derive(seed, "pattern"));
      fill_by_blocks(h, blocks, [&](const std::vector<std::size_t>& l) {
        std::size_t idx = 0;
        for (std::size_t b : l) idx = idx * spec.r + b;
        return (pattern.at(idx) & 1) != 0;
      });
      out.r = spec.r;
      break;
    }
    case Family::product: {
      if (k != 3) throw InvalidArgument("product family is defined for k = 3");
      blocks.push_back(random_blocks(0, sizes[0], 3, rng::derive(seed, "part-0")));
      blocks.push_back(random_blocks(1, sizes[1], 3, rng::derive(seed, "part-1")));
      blocks.push_back(PartPartition::trivial(2, sizes[2]));
      // G = X1 x Y1 ∪ X2 x Y2, crossed with all of C.
      fill_by_blocks(h, blocks, [](const std::vector<std::size_t>& l) { return l[0] == l[1] && l[0] < 2; });
      out.r = 3;
      break;
    }
    case Family::interval_threshold: {
      std::size_t threshold = 0;
      for (std::size_t i = 0; i < k; ++i) {
        std::vector<Label> labels(sizes[i]);
        if (spec.r > sizes[i]) throw InvalidArgument("r exceeds a part size");
        for (std::size_t v = 0; v < sizes[i]; ++v) labels[v] = static_cast<Label>(v * spec.r / sizes[i] + 1);
        blocks.emplace_back(i, std::move(labels));
      }
      if (spec.r > 1) threshold = 1 + rng::Stream(rng::derive(seed, "threshold")).below_at(0, k * (spec.r - 1));
      fill_by_blocks(h, blocks, [&](const std::vector<std::size_t>& l) {
        return std::accumulate(l.begin(), l.end(), std::size_t{0}) >= threshold;
      });
      out.r = spec.r;
      break;
    }
    case Family::uniform_random: {
      if (!(spec.density >= 0.0 && spec.density <= 1.0)) throw InvalidArgument("density must lie in [0,1]");
      const rng::Stream coins(rng::derive(seed, "uniform"));
      std::size_t total = 1;
      for (std::size_t s : sizes) total *= s;
      std::vector<std::size_t> tuple(k);
      for (std::size_t idx = 0; idx < total; ++idx) {
        if (!(coins.unit_at(idx) < spec.density)) continue;
        for (std::size_t i = k, rest = idx; i-- > 0;) {
          tuple[i] = rest % sizes[i];
          rest /= sizes[i];
        }
        h.add_edge(tuple);
      }
      out.r = spec.r;
      return out;
    }
  }
  out.links = table_from_blocks(sizes, blocks);
  return out;
}

PlantedBipartite planted_bipartite(std::size_t n_left, std::size_t n_right, std::size_t r, std::uint64_t seed) {
  PlantedBipartite out{BipartiteGraph(n_left, n_right), random_blocks(0, n_left, r, rng::derive(seed, "left")),
                       random_blocks(1, n_right, r, rng::derive(seed, "right"))};
  const rng::Stream pattern(rng::derive(seed, "pattern"));
  for (std::size_t x = 0; x < n_left; ++x)
    for (std::size_t y = 0; y < n_right; ++y)
      if (pattern.at((out.left.label(x) - 1) * r + out.right.label(y) - 1) & 1) out.graph.add_edge(x, y);
  return out;
}

}  // namespace homopart

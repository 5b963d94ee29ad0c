#include "homopart/oracle.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "homopart/auditor.hpp"
#include "homopart/error.hpp"
#include "homopart/parallel.hpp"

namespace homopart {

namespace {

using Label = PartPartition::Label;

std::vector<Pin> sorted_pins(std::span<const Pin> pins) {
  std::vector<Pin> out(pins.begin(), pins.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::pair<std::size_t, std::size_t> free_parts(std::size_t k, const std::vector<Pin>& pins) {
  std::vector<bool> pinned(k, false);
  for (const Pin& p : pins) pinned.at(p.part) = true;
  std::size_t a = k, b = k;
  for (std::size_t i = 0; i < k; ++i)
    if (!pinned[i]) (a == k ? a : b) = i;
  return {a, b};
}

// Thread-safe memo around a per-link computation.
LinkPartitionOracle cached_oracle(OracleKind kind, std::size_t r, const KPartiteHypergraph& h,
                                  std::function<LinkPartition(const BipartiteGraph&)> compute) {
  struct Cache {
    std::mutex mutex;
    std::map<std::vector<Pin>, LinkPartition> entries;
  };
  auto cache = std::make_shared<Cache>();
  auto graph = std::make_shared<const KPartiteHypergraph>(h);
  return LinkPartitionOracle(kind, r, [cache, graph, compute](std::span<const Pin> pins) {
    std::vector<Pin> key(pins.begin(), pins.end());
    {
      std::lock_guard lock(cache->mutex);
      if (auto it = cache->entries.find(key); it != cache->entries.end()) return it->second;
    }
    LinkPartition answer = compute(link(*graph, key));
    const auto [a, b] = free_parts(graph->k(), key);
    answer.left = PartPartition(a, std::vector<Label>(answer.left.labels().begin(), answer.left.labels().end()));
    answer.right = PartPartition(b, std::vector<Label>(answer.right.labels().begin(), answer.right.labels().end()));
    std::lock_guard lock(cache->mutex);
    return cache->entries.try_emplace(std::move(key), std::move(answer)).first->second;
  });
}

// Relabels so labels are 1.. in order of first appearance; no exceptional block.
PartPartition canonical(std::size_t part, const std::vector<Label>& raw) {
  std::vector<Label> map(raw.size() + 2, 0), labels(raw.size());
  Label next = 1;
  for (std::size_t v = 0; v < raw.size(); ++v) {
    if (map[raw[v]] == 0) map[raw[v]] = next++;
    labels[v] = map[raw[v]];
  }
  return PartPartition(part, std::move(labels));
}

}  // namespace

const char* to_string(OracleKind kind) noexcept {
  switch (kind) {
    case OracleKind::planted: return "planted";
    case OracleKind::greedy: return "greedy";
    case OracleKind::exhaustive: return "exhaustive";
    case OracleKind::external_file: return "external-file";
  }
  return "unknown";
}

LinkPartitionOracle::LinkPartitionOracle(OracleKind kind, std::size_t r, Source source)
    : kind_(kind), r_(r), source_(std::move(source)) {
  if (r_ == 0) throw InvalidArgument("link partitions need r >= 1");
}

LinkPartition LinkPartitionOracle::partition(std::span<const Pin> pins) const {
  const std::vector<Pin> key = sorted_pins(pins);
  LinkPartition p = source_(key);
  if (p.left.block_count() > r_ || p.right.block_count() > r_)
    throw InvalidArgument(std::string(to_string(kind_)) + " oracle returned more than r = " + std::to_string(r_) +
                          " blocks on one side");
  return p;
}

LinkPartitionOracle table_oracle(std::shared_ptr<const LinkTable> table, std::size_t r, OracleKind kind) {
  return LinkPartitionOracle(kind, r, [table](std::span<const Pin> pins) {
    const std::vector<Pin> key(pins.begin(), pins.end());
    auto it = table->entries.find(key);
    if (it == table->entries.end()) {
      std::string where;
      for (const Pin& p : key) where += " (" + std::to_string(p.part) + "," + std::to_string(p.vertex) + ")";
      throw InvalidArgument("no link partition recorded for pins" + where);
    }
    return it->second;
  });
}

LinkPartition greedy_link_partition(const BipartiteGraph& g, std::size_t r, double eps) {
  std::vector<Label> left(g.left_size(), 1), right(g.right_size(), 1);
  const BipartiteGraph gt = g.transposed();
  std::map<std::pair<Label, Label>, bool> stuck;
  while (true) {
    const PartPartition lp(0, left), rp(1, right);
    const HomogeneityReport audit = homogeneity_audit(g, lp, rp, eps);
    if (audit.pass) break;
    // Heaviest non-homogeneous pair that can still be split.
    std::size_t best = SIZE_MAX;
    double best_cells = -1.0;
    for (std::size_t t = 0; t < audit.tuple_count(); ++t) {
      if (audit.homogeneous[t]) continue;
      const auto labels = audit.tuple_labels(t);
      if (stuck.count({labels[0], labels[1]})) continue;
      if (audit.tuple_cells(t) > best_cells) {
        best_cells = audit.tuple_cells(t);
        best = t;
      }
    }
    if (best == SIZE_MAX) break;
    const auto labels = audit.tuple_labels(best);
    const Bitset xs = lp.members(labels[0]), ys = rp.members(labels[1]);
    auto try_split = [&](std::vector<Label>& side, const Bitset& block, const Bitset& other,
                         const BipartiteGraph& rows, const BipartiteGraph& cols, std::size_t block_count) {
      if (block_count >= r) return false;
      Bitset heavy(block.size());
      const std::size_t half = other.count();
      block.for_each_set([&](std::size_t v) {
        if (2 * rows.row(v).count_and(other) >= half) heavy.set(v);
      });
      if (heavy.none() || heavy == block) {
        // Majority is uninformative; split by adjacency to the most balanced pivot instead.
        const std::size_t size = block.count();
        std::size_t best_gap = SIZE_MAX;
        other.for_each_set([&](std::size_t w) {
          Bitset hit = block & cols.row(w);
          const std::size_t c = hit.count();
          if (c == 0 || c == size) return;
          const std::size_t gap = 2 * c > size ? 2 * c - size : size - 2 * c;
          if (gap < best_gap) {
            best_gap = gap;
            heavy = std::move(hit);
          }
        });
        if (best_gap == SIZE_MAX) return false;
      }
      const Label fresh = static_cast<Label>(block_count + 1);
      heavy.for_each_set([&](std::size_t v) { side[v] = fresh; });
      return true;
    };
    const bool split = (xs.count() >= ys.count() && try_split(left, xs, ys, g, gt, lp.regular_count())) ||
                       try_split(right, ys, xs, gt, g, rp.regular_count()) ||
                       try_split(left, xs, ys, g, gt, lp.regular_count());
    if (!split) stuck[{labels[0], labels[1]}] = true;
    else stuck.clear();
  }
  return {canonical(0, left), canonical(1, right)};
}

LinkPartitionOracle greedy_oracle(const KPartiteHypergraph& h, std::size_t r, double eps) {
  return cached_oracle(OracleKind::greedy, r, h,
                       [r, eps](const BipartiteGraph& g) { return greedy_link_partition(g, r, eps); });
}

namespace {

// All restricted-growth strings of length n with exactly `blocks` distinct values.
void growth_strings(std::size_t n, std::size_t blocks, std::vector<std::vector<Label>>& out) {
  std::vector<Label> s(n, 1);
  auto rec = [&](auto&& self, std::size_t i, Label used) -> void {
    if (n - i < blocks - used) return;
    if (i == n) {
      if (used == blocks) out.push_back(s);
      return;
    }
    for (Label l = 1; l <= std::min<Label>(used + 1, static_cast<Label>(blocks)); ++l) {
      s[i] = l;
      self(self, i + 1, std::max(used, l));
    }
  };
  if (n == 0) return;
  s[0] = 1;
  rec(rec, 1, 1);
}

}  // namespace

LinkPartition exhaustive_link_partition(const BipartiteGraph& g, std::size_t r, double eps, std::uint64_t pair_budget) {
  constexpr std::size_t kMaxSide = 12;
  if (g.left_size() > kMaxSide || g.right_size() > kMaxSide)
    throw InvalidArgument("exhaustive link partitions need at most 12 vertices per side");
  const std::size_t r_left = std::min(r, g.left_size()), r_right = std::min(r, g.right_size());
  std::vector<std::vector<std::vector<Label>>> left_by(r_left + 1), right_by(r_right + 1);
  for (std::size_t b = 1; b <= r_left; ++b) growth_strings(g.left_size(), b, left_by[b]);
  for (std::size_t b = 1; b <= r_right; ++b) growth_strings(g.right_size(), b, right_by[b]);
  std::uint64_t spent = 0;
  double best_mass = std::numeric_limits<double>::infinity();
  LinkPartition best{PartPartition::trivial(0, g.left_size()), PartPartition::trivial(1, g.right_size())};
  for (std::size_t total = 2; total <= r_left + r_right; ++total)
    for (std::size_t s = 1; s <= r_left; ++s) {
      if (total < s + 1 || total - s > r_right) continue;
      const std::size_t t = total - s;
      for (const auto& ls : left_by[s])
        for (const auto& rs : right_by[t]) {
          if (spent++ >= pair_budget) return best;
          PartPartition lp(0, ls), rp(1, rs);
          const HomogeneityReport a = homogeneity_audit(g, lp, rp, eps);
          if (a.mass < best_mass) {
            best_mass = a.mass;
            best = {std::move(lp), std::move(rp)};
          }
          if (a.pass) return best;
        }
    }
  return best;
}

LinkPartitionOracle exhaustive_oracle(const KPartiteHypergraph& h, std::size_t r, double eps,
                                      std::uint64_t pair_budget) {
  return cached_oracle(OracleKind::exhaustive, r, h, [r, eps, pair_budget](const BipartiteGraph& g) {
    return exhaustive_link_partition(g, r, eps, pair_budget);
  });
}

std::vector<std::vector<Pin>> all_pin_tuples(const std::vector<std::size_t>& part_sizes) {
  const std::size_t k = part_sizes.size();
  std::vector<std::vector<Pin>> out;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) {
      std::vector<std::size_t> parts;
      for (std::size_t p = 0; p < k; ++p)
        if (p != i && p != j) parts.push_back(p);
      std::vector<std::size_t> idx(parts.size(), 0);
      while (true) {
        std::vector<Pin> pins;
        for (std::size_t q = 0; q < parts.size(); ++q) pins.push_back({parts[q], idx[q]});
        out.push_back(std::move(pins));
        std::size_t q = parts.size();
        while (q-- > 0) {
          if (++idx[q] < part_sizes[parts[q]]) break;
          idx[q] = 0;
        }
        if (q == SIZE_MAX) break;
      }
    }
  return out;
}

LinkHypothesisReport audit_link_hypothesis(const KPartiteHypergraph& h, const LinkPartitionOracle& oracle, double eps) {
  const auto tuples = all_pin_tuples(h.part_sizes());
  std::vector<HomogeneityReport> audits(tuples.size());
  std::vector<std::size_t> blocks(tuples.size());
  parallel_for(0, tuples.size(), [&](std::size_t i) {
    const LinkPartition p = oracle.partition(tuples[i]);
    const BipartiteGraph g = link(h, tuples[i]);
    const PartPartition l(0, std::vector<Label>(p.left.labels().begin(), p.left.labels().end()));
    const PartPartition r(1, std::vector<Label>(p.right.labels().begin(), p.right.labels().end()));
    audits[i] = homogeneity_audit(g, l, r, eps);
    blocks[i] = std::max(p.left.block_count(), p.right.block_count());
  });
  LinkHypothesisReport report;
  report.links = tuples.size();
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    if (!audits[i].pass) ++report.failing;
    report.max_mass = std::max(report.max_mass, audits[i].normalized_mass);
    report.max_blocks = std::max(report.max_blocks, blocks[i]);
  }
  return report;
}

}  // namespace homopart

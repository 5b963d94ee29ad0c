#include "homopart/partition.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>

#include "homopart/error.hpp"

namespace homopart {

PartPartition::PartPartition(std::size_t part, std::vector<Label> labels) : part_(part), labels_(std::move(labels)) {
  Label top = 0;
  for (Label l : labels_) top = std::max(top, l);
  sizes_.assign(labels_.empty() ? 0 : std::size_t{top} + 1, 0);
  for (Label l : labels_) ++sizes_[l];
  for (std::size_t l = 1; l < sizes_.size(); ++l)
    if (sizes_[l] == 0) throw InvalidArgument("partition labels are not contiguous: label " + std::to_string(l) + " is unused");
}

PartPartition PartPartition::trivial(std::size_t part, std::size_t n) {
  return PartPartition(part, std::vector<Label>(n, 1));
}

PartPartition PartPartition::singletons(std::size_t part, std::size_t n) {
  std::vector<Label> labels(n);
  for (std::size_t v = 0; v < n; ++v) labels[v] = static_cast<Label>(v + 1);
  return PartPartition(part, std::move(labels));
}

PartPartition PartPartition::intervals(std::size_t part, std::size_t n, std::size_t count) {
  if (count == 0 || n % count != 0)
    throw InvalidArgument(std::to_string(n) + " vertices cannot be split into " + std::to_string(count) +
                          " equal intervals");
  const std::size_t len = n / count;
  std::vector<Label> labels(n);
  for (std::size_t v = 0; v < n; ++v) labels[v] = static_cast<Label>(v / len + 1);
  return PartPartition(part, std::move(labels));
}

PartPartition PartPartition::from_blocks(std::size_t part, std::size_t n, std::span<const Bitset> blocks) {
  std::vector<Label> labels(n, 0);
  std::vector<bool> seen(n, false);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].size() != n) throw InvalidArgument("block length does not match universe");
    blocks[i].for_each_set([&](std::size_t v) {
      if (seen[v]) throw InvalidArgument("blocks overlap at vertex " + std::to_string(v));
      seen[v] = true;
      labels[v] = static_cast<Label>(i + 1);
    });
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) throw InvalidArgument("blocks do not cover the part");
  return PartPartition(part, std::move(labels));
}

std::vector<PartPartition::Label> PartPartition::nonempty_labels() const {
  std::vector<Label> out;
  for (std::size_t l = 0; l < sizes_.size(); ++l)
    if (sizes_[l] > 0) out.push_back(static_cast<Label>(l));
  return out;
}

Bitset PartPartition::members(Label l) const {
  Bitset out(labels_.size());
  for (std::size_t v = 0; v < labels_.size(); ++v)
    if (labels_[v] == l) out.set(v);
  return out;
}

bool PartPartition::equitable() const noexcept {
  for (std::size_t l = 2; l < sizes_.size(); ++l)
    if (sizes_[l] != sizes_[1]) return false;
  return true;
}

LayeredPartition::LayeredPartition(std::vector<PartPartition> p) : parts(std::move(p)) {
  for (std::size_t i = 0; i < parts.size(); ++i)
    if (parts[i].part() != i)
      throw InvalidArgument("layered partition slot " + std::to_string(i) + " holds part " +
                            std::to_string(parts[i].part()));
}

PartPartition common_refinement(std::size_t part, std::size_t n, std::span<const Bitset> sets) {
  std::vector<std::uint64_t> cls(n, 0);
  std::size_t classes = 1;
  for (const Bitset& s : sets) {
    if (s.size() != n) throw InvalidArgument("refinement set length does not match universe");
    // Split every current class by membership in s, numbering by first appearance.
    std::unordered_map<std::uint64_t, std::uint64_t> next;
    next.reserve(classes * 2);
    for (std::size_t v = 0; v < n; ++v) {
      const std::uint64_t key = cls[v] * 2 + (s.test(v) ? 1 : 0);
      auto [it, inserted] = next.try_emplace(key, next.size());
      cls[v] = it->second;
    }
    classes = next.size();
  }
  std::unordered_map<std::uint64_t, PartPartition::Label> relabel;
  std::vector<PartPartition::Label> labels(n);
  for (std::size_t v = 0; v < n; ++v) {
    auto [it, inserted] = relabel.try_emplace(cls[v], static_cast<PartPartition::Label>(relabel.size() + 1));
    labels[v] = it->second;
  }
  return PartPartition(part, std::move(labels));
}

PartPartition common_refinement(std::size_t n, std::span<const VertexSet> sets) {
  std::vector<Bitset> bits;
  bits.reserve(sets.size());
  const std::size_t part = sets.empty() ? 0 : sets.front().part;
  for (const auto& s : sets) {
    if (s.part != part) throw InvalidArgument("refinement sets come from different parts");
    bits.push_back(s.members);
  }
  return common_refinement(part, n, bits);
}

EqualizeResult equalize(const PartPartition& p, std::size_t m) {
  const std::size_t n = p.universe();
  if (m < 1) throw InvalidArgument("block size must be at least 1");
  if (m > n) throw InvalidArgument("block size " + std::to_string(m) + " exceeds part size " + std::to_string(n));

  std::vector<std::vector<std::size_t>> by_label(p.regular_count() + 1);
  for (std::size_t v = 0; v < n; ++v) by_label[p.label(v)].push_back(v);

  std::vector<PartPartition::Label> labels(n, 0);
  PartPartition::Label next = 1;
  std::vector<std::size_t> pool = by_label[0];
  for (std::size_t l = 1; l < by_label.size(); ++l) {
    const auto& members = by_label[l];
    const std::size_t full = members.size() / m * m;
    for (std::size_t i = 0; i < full; i += m, ++next)
      for (std::size_t j = i; j < i + m; ++j) labels[members[j]] = next;
    pool.insert(pool.end(), members.begin() + static_cast<std::ptrdiff_t>(full), members.end());
  }
  const std::size_t full = pool.size() / m * m;
  for (std::size_t i = 0; i < full; i += m, ++next)
    for (std::size_t j = i; j < i + m; ++j) labels[pool[j]] = next;
  for (std::size_t j = full; j < pool.size(); ++j) labels[pool[j]] = 0;
  return {PartPartition(p.part(), std::move(labels)), m, pool.size() - full};
}

RefinementReport beta_refines(const PartPartition& fine, const PartPartition& coarse, double beta) {
  if (!(beta >= 0.0 && beta < 0.5)) throw InvalidArgument("beta must lie in [0, 1/2)");
  if (fine.universe() != coarse.universe()) throw InvalidArgument("partitions cover different universes");
  RefinementReport report;
  report.beta = beta;
  const std::size_t coarse_slots = coarse.regular_count() + 1;
  std::vector<std::vector<std::size_t>> by_fine(fine.regular_count() + 1);
  for (std::size_t v = 0; v < fine.universe(); ++v) by_fine[fine.label(v)].push_back(v);
  std::vector<std::size_t> tally(coarse_slots, 0);
  for (PartPartition::Label l : fine.nonempty_labels()) {
    const auto& members = by_fine[l];
    std::fill(tally.begin(), tally.end(), 0);
    for (std::size_t v : members) ++tally[coarse.label(v)];
    std::optional<PartPartition::Label> parent;
    const double need = (1.0 - beta) * static_cast<double>(members.size()) - 1e-9;
    for (std::size_t c = 0; c < coarse_slots; ++c)
      if (tally[c] > 0 && static_cast<double>(tally[c]) >= need) {
        parent = static_cast<PartPartition::Label>(c);
        break;
      }
    report.fine_labels.push_back(l);
    report.parent.push_back(parent);
    if (!parent) ++report.unmatched;
  }
  const std::size_t blocks = report.fine_labels.size();
  report.unmatched_fraction = blocks == 0 ? 0.0 : static_cast<double>(report.unmatched) / static_cast<double>(blocks);
  report.refines = static_cast<double>(report.unmatched) <= beta * static_cast<double>(blocks) + 1e-9;
  return report;
}

}  // namespace homopart

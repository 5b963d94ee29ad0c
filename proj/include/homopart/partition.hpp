#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "homopart/bitset.hpp"
#include "homopart/hypergraph.hpp"

namespace homopart {

/// Partition of one vertex class. Label 0 is the exceptional block and may be empty;
/// regular labels 1..regular_count() are all nonempty.
class PartPartition {
 public:
  using Label = std::uint32_t;

  PartPartition() = default;
  PartPartition(std::size_t part, std::vector<Label> labels);

  static PartPartition trivial(std::size_t part, std::size_t n);
  static PartPartition singletons(std::size_t part, std::size_t n);
  /// `count` equal consecutive intervals; n must be divisible by count.
  static PartPartition intervals(std::size_t part, std::size_t n, std::size_t count);
  /// Blocks given as disjoint sets covering [n]; block i gets label i + 1.
  static PartPartition from_blocks(std::size_t part, std::size_t n, std::span<const Bitset> blocks);

  std::size_t part() const noexcept { return part_; }
  std::size_t universe() const noexcept { return labels_.size(); }
  Label label(std::size_t v) const { return labels_.at(v); }
  std::span<const Label> labels() const noexcept { return labels_; }

  std::size_t regular_count() const noexcept { return sizes_.empty() ? 0 : sizes_.size() - 1; }
  /// Number of nonempty blocks, exceptional included.
  std::size_t block_count() const noexcept { return regular_count() + (exceptional_size() > 0 ? 1 : 0); }
  std::size_t exceptional_size() const noexcept { return sizes_.empty() ? 0 : sizes_[0]; }
  std::size_t block_size(Label l) const { return l < sizes_.size() ? sizes_[l] : 0; }
  /// Labels of nonempty blocks in increasing order.
  std::vector<Label> nonempty_labels() const;
  Bitset members(Label l) const;
  VertexSet block(Label l) const { return {part_, members(l)}; }

  /// All regular blocks share one size.
  bool equitable() const noexcept;

  friend bool operator==(const PartPartition&, const PartPartition&) = default;

 private:
  std::size_t part_ = 0;
  std::vector<Label> labels_;
  std::vector<std::size_t> sizes_;
};

/// One partition per part, in part order.
struct LayeredPartition {
  std::vector<PartPartition> parts;

  LayeredPartition() = default;
  explicit LayeredPartition(std::vector<PartPartition> p);
  std::size_t k() const noexcept { return parts.size(); }
  const PartPartition& operator[](std::size_t i) const { return parts.at(i); }
  friend bool operator==(const LayeredPartition&, const LayeredPartition&) = default;
};

/// Venn atoms of `sets` over [n], labeled 1.. in order of first appearance.
PartPartition common_refinement(std::size_t part, std::size_t n, std::span<const Bitset> sets);
PartPartition common_refinement(std::size_t n, std::span<const VertexSet> sets);

struct EqualizeResult {
  PartPartition partition;
  std::size_t block_size = 0;
  /// Vertices left in the exceptional block (fewer than block_size).
  std::size_t remainder = 0;
};

/// Splits every block into pieces of size m; leftovers (and any prior exceptional vertices)
/// are pooled and split again, and the final partial piece becomes the exceptional block.
EqualizeResult equalize(const PartPartition& p, std::size_t m);

struct RefinementReport {
  double beta = 0.0;
  /// Per nonempty fine block (in label order): its label and its beta-parent, if any.
  std::vector<PartPartition::Label> fine_labels;
  std::vector<std::optional<PartPartition::Label>> parent;
  std::size_t unmatched = 0;
  double unmatched_fraction = 0.0;
  bool refines = false;
};

/// P is matched to A when |P ∩ A| >= (1 - beta)|P|; refines iff at most beta of the fine blocks
/// are unmatched. beta must lie in [0, 1/2).
RefinementReport beta_refines(const PartPartition& fine, const PartPartition& coarse, double beta);

}  // namespace homopart

#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "homopart/hypergraph.hpp"
#include "homopart/partition.hpp"

namespace homopart {

/// Partitions of the two unpinned parts of a link; `left` is the lower part index.
struct LinkPartition {
  PartPartition left;
  PartPartition right;
  friend bool operator==(const LinkPartition&, const LinkPartition&) = default;
};

/// Link partitions keyed by pin tuple (pins sorted by part).
struct LinkTable {
  std::vector<std::size_t> part_sizes;
  std::map<std::vector<Pin>, LinkPartition> entries;
  friend bool operator==(const LinkTable&, const LinkTable&) = default;
};

enum class OracleKind { planted, greedy, exhaustive, external_file };
const char* to_string(OracleKind kind) noexcept;

/// Source of small homogeneous partitions for the links of (k-2)-pin tuples.
/// Every answer is checked to have at most r blocks per side.
class LinkPartitionOracle {
 public:
  using Source = std::function<LinkPartition(std::span<const Pin>)>;

  LinkPartitionOracle(OracleKind kind, std::size_t r, Source source);

  OracleKind kind() const noexcept { return kind_; }
  std::size_t r() const noexcept { return r_; }
  /// Pins may come in any order; they are sorted by part before lookup.
  LinkPartition partition(std::span<const Pin> pins) const;

 private:
  OracleKind kind_;
  std::size_t r_;
  Source source_;
};

/// Table lookup; throws InvalidArgument for pins missing from the table.
LinkPartitionOracle table_oracle(std::shared_ptr<const LinkTable> table, std::size_t r,
                                 OracleKind kind = OracleKind::planted);

/// Splits the heaviest non-homogeneous block pair by majority adjacency until the link is
/// eps-homogeneous or no side can grow past r blocks. Answers are cached per pin tuple.
LinkPartitionOracle greedy_oracle(const KPartiteHypergraph& h, std::size_t r, double eps);
LinkPartition greedy_link_partition(const BipartiteGraph& g, std::size_t r, double eps);

/// Searches all partition pairs with at most r blocks per side (sides of at most 12 vertices),
/// fewest blocks first, returning the first eps-homogeneous pair or the least-mass pair seen
/// within `pair_budget`.
LinkPartitionOracle exhaustive_oracle(const KPartiteHypergraph& h, std::size_t r, double eps,
                                      std::uint64_t pair_budget = std::uint64_t{1} << 24);
LinkPartition exhaustive_link_partition(const BipartiteGraph& g, std::size_t r, double eps,
                                        std::uint64_t pair_budget = std::uint64_t{1} << 24);

struct LinkHypothesisReport {
  std::size_t links = 0;
  std::size_t failing = 0;     // links whose oracle partition is not eps-homogeneous
  double max_mass = 0.0;       // worst normalized non-homogeneous mass
  std::size_t max_blocks = 0;  // most blocks on one side
};

/// Audits the oracle's answer for every (k-2)-pin tuple at eps.
LinkHypothesisReport audit_link_hypothesis(const KPartiteHypergraph& h, const LinkPartitionOracle& oracle, double eps);

/// Enumerates every (k-2)-pin tuple: for each pair i < j of unpinned parts, all tuples over
/// the remaining parts in row-major order.
std::vector<std::vector<Pin>> all_pin_tuples(const std::vector<std::size_t>& part_sizes);

}  // namespace homopart

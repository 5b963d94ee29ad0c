#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "homopart/hypergraph.hpp"
#include "homopart/partition.hpp"

namespace homopart {

/// Per block-tuple densities and the non-homogeneous mass of a layered partition.
/// Tuples are the nonempty blocks of each part, enumerated row-major.
struct HomogeneityReport {
  double eps = 0.0;
  bool weighted = false;  // weighted band test (not part of the classical definition)
  std::vector<std::vector<PartPartition::Label>> labels;  // nonempty labels per part
  std::vector<std::vector<std::size_t>> sizes;            // matching block sizes
  std::vector<double> tuple_weight;                       // edge count or weight sum
  std::vector<std::uint8_t> homogeneous;
  double mass = 0.0;   // sum of |X_1|...|X_k| over failing tuples
  double total = 0.0;  // |A_1|...|A_k|
  double normalized_mass = 0.0;
  std::size_t failing = 0;
  bool pass = false;

  std::size_t tuple_count() const noexcept { return tuple_weight.size(); }
  std::vector<PartPartition::Label> tuple_labels(std::size_t index) const;
  double tuple_cells(std::size_t index) const;
  double tuple_density(std::size_t index) const { return tuple_weight[index] / tuple_cells(index); }
};

/// density in [0, eps] or [1 - eps, 1], decided on the raw weight to avoid division error.
bool is_homogeneous(double weight, double cells, double eps) noexcept;

HomogeneityReport homogeneity_audit(const KPartiteHypergraph& h, const LayeredPartition& p, double eps);
HomogeneityReport homogeneity_audit(const WeightedTripartite& h, const LayeredPartition& p, double eps);
/// Bipartite graphs as 2-partite 2-graphs; left partition is part 0.
HomogeneityReport homogeneity_audit(const BipartiteGraph& g, const PartPartition& left, const PartPartition& right,
                                    double eps);
/// Non-partite k-graph with one vertex partition; all k-tuples of blocks count, including
/// those that repeat a block.
HomogeneityReport homogeneity_audit(const UniformHypergraph& h, const PartPartition& p, double eps);

struct DisagreementCounts {
  /// Ordered (edge, non-edge) pairs differing in coordinate i inside one regular block.
  std::vector<std::uint64_t> regular;
  /// Same, for pairs whose differing coordinate lies in the exceptional block.
  std::vector<std::uint64_t> exceptional;
  std::uint64_t regular_total() const noexcept;
};

DisagreementCounts disagreement_pairs(const KPartiteHypergraph& h, const LayeredPartition& p);

/// eps^2 (1 - eps) n^(k+1) / s: the pair count every non-eps-homogeneous equipartition reaches.
double disagreement_threshold(double eps, double n, std::size_t k, double s) noexcept;

enum class SearchMode { exact, sampled };
const char* to_string(SearchMode mode) noexcept;

struct WitnessOptions {
  SearchMode mode = SearchMode::exact;
  std::uint64_t budget = 10000;  // sampled draws
  std::uint64_t seed = 0;
};

/// Largest block size each side may have for exact search.
inline constexpr std::size_t kExactBlockCap = 22;
/// Exact tripartite search enumerates the two smallest blocks jointly.
inline constexpr std::size_t kExactJointCap = 24;

struct RegularityWitness {
  bool found = false;
  SearchMode mode = SearchMode::exact;
  double eps = 0.0;
  std::vector<VertexSet> blocks;   // the audited blocks
  std::vector<VertexSet> subsets;  // witness subsets when found
  double inner_density = 0.0;
  double outer_density = 0.0;
  double deviation = 0.0;
  std::uint64_t evaluated = 0;  // candidates examined
  /// Exact searches decide; sampled searches only decide when a witness is found.
  bool conclusive() const noexcept { return mode == SearchMode::exact || found; }
};

RegularityWitness weak_regularity_witness(const KPartiteHypergraph& h, std::span<const VertexSet> blocks, double eps,
                                          const WitnessOptions& options = {});
RegularityWitness weak_regularity_witness(const WeightedTripartite& h, std::span<const VertexSet> blocks, double eps,
                                          const WitnessOptions& options = {});
RegularityWitness bipartite_regularity_witness(const BipartiteGraph& g, const Bitset& left, const Bitset& right,
                                               double eps, const WitnessOptions& options = {});
RegularityWitness bipartite_regularity_witness(const WeightedBipartite& g, const Bitset& left, const Bitset& right,
                                               double eps, const WitnessOptions& options = {});

/// Recomputes both densities from scratch; true iff they match the witness bit-for-bit, the
/// subsets are large enough, and the deviation exceeds eps.
bool reverify(const KPartiteHypergraph& h, const RegularityWitness& w);
bool reverify(const WeightedTripartite& h, const RegularityWitness& w);
bool reverify(const BipartiteGraph& g, const RegularityWitness& w);
bool reverify(const WeightedBipartite& g, const RegularityWitness& w);

/// Minimum subset size: ceil(eps * block).
std::size_t min_subset_size(double eps, std::size_t block) noexcept;

struct VcResult {
  std::size_t dimension = 0;
  bool at_least = false;  // shattering reached the cap
};

/// Shattered sets lie on one side, witnesses on the other; maximum over both sides.
VcResult vc_dimension(const BipartiteGraph& g, std::size_t d_max);
/// Any vertex may serve as a witness.
VcResult vc_dimension(const Graph& g, std::size_t d_max);
/// Maximum over the links of all (k-2)-pin tuples.
VcResult slicewise_vc(const KPartiteHypergraph& h, std::size_t d_max);

}  // namespace homopart

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "homopart/error.hpp"
#include "homopart/hypergraph.hpp"
#include "homopart/oracle.hpp"
#include "homopart/partition.hpp"

namespace homopart {

enum class Mode { paper, practical };
const char* to_string(Mode mode) noexcept;

/// Parameters of the link-to-hypergraph pipeline.
struct ToleranceParams {
  double eps = 0.2;
  std::size_t k = 3;
  std::size_t r = 1;
  Mode mode = Mode::practical;
  double gamma = 0.0;       // similarity parameter for the per-link vertex partitions
  double link_eps = 0.0;    // homogeneity demanded of link partitions

  /// gamma = eps/(6k), link_eps = (1/48)(eps/6k)^3.
  static ToleranceParams paper(double eps, std::size_t k, std::size_t r);
  /// Paper-mode values unless overridden.
  static ToleranceParams practical(double eps, std::size_t k, std::size_t r, std::optional<double> gamma = {},
                                   std::optional<double> link_eps = {});
  /// gamma^3 / 48: homogeneity required of the input partition by the similarity step.
  double gamma_prime() const noexcept { return gamma * gamma * gamma / 48.0; }
};

/// ceil((1 - gamma) 3r / gamma).
std::size_t similarity_block_count(double gamma, std::size_t r);
/// gamma^3 / 48.
double similarity_input_eps(double gamma) noexcept;
/// (q/gamma)^(k-1) ln(2/eps) for gamma = eps/(6k), q = similarity_block_count(gamma, r).
double paper_anchor_count(double eps, std::size_t k, std::size_t r);

struct SimilarityResult {
  PartPartition partition;  // label 0 is the exceptional set, 1..q the equal blocks
  std::size_t q = 0;        // blocks produced (target count unless the contract fails)
  std::size_t target_q = 0;
  std::size_t paper_q = 0;  // ceil((1 - gamma) 3r / gamma)
  std::size_t m = 0;        // block size floor(gamma n / 3r)
  std::vector<PartPartition::Label> bad_blocks;
  std::vector<std::size_t> representatives;  // one per good block
  std::size_t evicted = 0;
  std::size_t exceptional_size = 0;
  std::size_t max_intra_distance = 0;  // max |N(x) Δ N(x')| inside a block
  bool input_homogeneous = false;      // given partition passed the gamma' audit
  double input_mass = 0.0;
  bool contract_met = false;
};

/// Vertex partition of the left side in which every block has near-identical neighborhoods,
/// built from a homogeneous partition of the graph (left side at most r blocks).
SimilarityResult similarity_partition(const BipartiteGraph& g, const PartPartition& left, const PartPartition& right,
                                      double gamma, std::size_t r, std::uint64_t seed = 0);

/// Classes of (k-1)-tuples over the non-target parts; class 0 is the exceptional set.
struct TuplePartition {
  std::size_t target = 0;
  std::vector<std::size_t> source_parts;  // increasing
  std::vector<std::size_t> source_sizes;
  std::vector<std::uint32_t> classes;     // per tuple, row-major over source parts
  std::vector<std::size_t> anchors;       // tuple index of the anchor of class i + 1
  std::vector<Bitset> anchor_neighborhoods;
  std::vector<std::size_t> class_sizes;   // index 0 is the exceptional count
  std::size_t threshold = 0;              // floor(eps n / 2)
  double eps = 0.0;
  Mode mode = Mode::practical;
  double paper_anchor_count = 0.0;

  std::size_t tuple_count() const noexcept { return classes.size(); }
  std::size_t class_count() const noexcept { return anchors.size(); }
  std::size_t exceptional_count() const noexcept { return class_sizes.empty() ? 0 : class_sizes[0]; }
  std::vector<std::size_t> tuple(std::size_t index) const;
};

struct TuplePartitionOptions {
  std::size_t target_part = SIZE_MAX;  // default: last part
  std::size_t max_anchors = 4096;
  std::uint64_t seed = 0;
};

/// Raised when anchors run out with too many tuples uncovered.
class CoverageError : public Infeasible {
 public:
  CoverageError(std::size_t uncovered, std::size_t tuples, std::size_t anchors);
  std::size_t uncovered;
  std::size_t tuples;
  std::size_t anchors;
};

TuplePartition tuple_partition(const KPartiteHypergraph& h, const LinkPartitionOracle& oracle,
                               const ToleranceParams& params, const TuplePartitionOptions& options = {});

struct ClassScan {
  std::size_t max_anchor_distance = 0;
  std::size_t max_pairwise_distance = 0;
  bool exhaustive = false;
  std::uint64_t pairs_checked = 0;
};

/// Distances inside every class: all pairs when exhaustive, else `samples` random pairs per class.
ClassScan scan_classes(const KPartiteHypergraph& h, const TuplePartition& tp, bool exhaustive,
                       std::uint64_t samples = 4096, std::uint64_t seed = 0);

struct TwinReport {
  double gamma = 0.0;
  std::size_t q = 0;
  double excellence_threshold = 0.0;          // (gamma n / q)^(k-1)
  std::vector<double> good_fraction;          // per source coordinate
  std::vector<std::size_t> sampled;           // tuple indices examined
  std::vector<std::vector<std::size_t>> twin_counts;  // per sampled tuple, per coordinate
  std::vector<double> chain_twins;            // per sampled tuple
  double excellent_fraction = 0.0;
};

/// Twin structure behind the tuple partition, for `samples` tuples (all tuples if 0).
TwinReport twin_diagnostics(const KPartiteHypergraph& h, const LinkPartitionOracle& oracle,
                            const ToleranceParams& params, std::size_t target_part, std::size_t samples,
                            std::uint64_t seed);

struct HomogenizeOptions {
  Mode mode = Mode::practical;
  std::size_t max_anchors = 4096;
  std::optional<std::size_t> block_size;  // overrides eps^2 n / (8kp)
};

struct PartOutcome {
  std::size_t part = 0;
  std::size_t classes = 0;
  std::size_t exceptional_tuples = 0;
  std::size_t atoms = 0;        // blocks of the common refinement
  double p = 0.0;               // 2^t in paper mode, atom count otherwise
  double formula_block_size = 0.0;  // eps^2 n / (8kp)
  std::size_t block_size = 0;
  std::size_t remainder = 0;
  double budget = 0.0;          // s = 8kp / eps^2
  PartPartition refinement;     // before equalizing
};

struct HomogenizeResult {
  LayeredPartition partition;
  std::vector<PartOutcome> parts;
  double eps = 0.0;
  double inner_eps = 0.0;  // eps^2 / (8k)
  Mode mode = Mode::practical;
  LayeredPartition refinement() const;
};

HomogenizeResult homogeneous_partition(const KPartiteHypergraph& h, const LinkPartitionOracle& oracle, double eps,
                                       std::uint64_t seed, const HomogenizeOptions& options = {});

}  // namespace homopart

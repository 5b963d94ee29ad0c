#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "homopart/auditor.hpp"
#include "homopart/bitset.hpp"
#include "homopart/error.hpp"
#include "homopart/hypergraph.hpp"
#include "homopart/partition.hpp"

namespace homopart::gowers {

enum class Mode { paper, toy };
const char* to_string(Mode mode) noexcept;

/// max(floor(e^(m/16)), 2), saturating at UINT64_MAX.
std::uint64_t phi(std::uint64_t m) noexcept;
/// floor(log7(1/eps) / 4 - 3).
long paper_layer_count(double eps);
/// ceil(4 / delta^4).
double paper_threshold(double delta);

struct SequenceOverrides {
  std::optional<std::size_t> t;
  std::optional<std::uint64_t> growth_cap;  // toy growth: min(phi(m), cap)
  std::optional<double> s0;
};

struct GowersParams {
  double eps = 0.0;
  double delta = 0.0;
  std::size_t n = 0;
  std::size_t t = 0;
  double s0 = 0.0;
  std::optional<std::uint64_t> growth_cap;
  std::vector<std::uint64_t> m;  // m_0..m_t, saturating
  bool saturated = false;
  Mode mode = Mode::paper;
  std::uint64_t seed = 0;
  std::vector<std::string> relaxations;

  std::uint64_t growth(std::uint64_t m_prev) const noexcept;
  /// M = m_r / m_(r-1) for level r in 1..t.
  std::uint64_t ratio(std::size_t r) const { return m.at(r) / m.at(r - 1); }
  bool quasirandom_level(std::size_t r) const { return static_cast<double>(m.at(r - 1)) >= s0; }
};

GowersParams build_sequence(double eps, double delta, Mode mode, const SequenceOverrides& overrides = {});

/// Toy preset: t = 3, growth 2, s0 = 2, so m = 1, 2, 4, 8.
GowersParams toy_params(double eps, double delta, std::size_t t = 3, std::uint64_t seed = 0);

struct FamilyCheck {
  bool within_hypothesis = false;  // M <= max(e^(m/16), 2)
  bool item1_applicable = false;   // M >= ln^3(4 m^2)
  bool item1_pass = true;
  double max_size_deviation = 0.0;
  double max_intersection_deviation = 0.0;
  bool event_pass = false;
  std::size_t max_agreement = 0;
  std::uint64_t agreement_violations = 0;  // pairs j < j' with 4 z > 3 m

  bool pass() const noexcept { return item1_pass && event_pass; }
};

/// m bipartitions (X_i, Y_i) of [M]; x[i] holds X_i and Y_i is its complement.
struct OrthogonalFamily {
  std::size_t m = 0;
  std::size_t M = 0;
  std::vector<Bitset> x;
  FamilyCheck check;
  std::size_t attempts = 0;

  bool in_x(std::size_t i, std::size_t j) const { return x[i].test(j); }
};

FamilyCheck check_family(std::size_t m, std::size_t M, const std::vector<Bitset>& x);

class GenerationError : public Infeasible {
 public:
  GenerationError(std::size_t m, std::size_t M, std::size_t attempts, FamilyCheck last);
  std::size_t m, M, attempts;
  FamilyCheck last;
};

OrthogonalFamily orthogonal_family(std::size_t m, std::size_t M, std::uint64_t seed, std::size_t max_attempts = 64);

struct MarginReport {
  std::size_t count = 0;
  double bound = 0.0;  // eta m
  bool hypothesis = false;
  std::vector<std::string> violations;
  /// Event A held at generation and the hypothesis holds, so count >= eta m is guaranteed.
  bool guaranteed = false;
  bool bound_met = false;
};

MarginReport item2_margin(const OrthogonalFamily& family, const std::vector<double>& lambda, double eps, double zeta,
                          double eta);

struct IntervalLayering {
  std::size_t n = 0;
  std::vector<std::uint64_t> m;

  std::size_t levels() const noexcept { return m.size() - 1; }
  std::size_t length(std::size_t r) const { return n / m.at(r); }
  std::size_t interval(std::size_t r, std::size_t v) const { return v / length(r); }
  PartPartition partition(std::size_t part, std::size_t r) const;
  /// Every level-r interval lies inside one level-(r-1) interval.
  bool refines(std::size_t r) const;
};

/// The two complete boxes of G_r between A_i and B_j.
struct EdgeBoxes {
  Bitset a1, a2, b1, b2;
};

struct GowersInstance {
  GowersParams params;
  IntervalLayering layering;
  std::vector<OrthogonalFamily> families;  // index r-1
  std::vector<BipartiteGraph> graphs;      // G_r, index r-1
  std::vector<std::uint32_t> layer_of_c;   // 1-based layer of each C vertex
  WeightedTripartite weighted;

  std::size_t n() const noexcept { return params.n; }
  std::size_t t() const noexcept { return params.t; }
  Bitset layer(std::size_t r) const;
  PartPartition c_layers() const;
  EdgeBoxes boxes(std::size_t r, std::size_t i, std::size_t j) const;
};

GowersInstance build_weighted(GowersParams params, std::size_t n, std::size_t max_attempts = 64);

enum class CertificateKind { quasirandom, constant_boxes, layer_constant };
const char* to_string(CertificateKind kind) noexcept;

struct LinkCertificate {
  Pin vertex;
  CertificateKind kind = CertificateKind::quasirandom;
  std::size_t level = 0;  // layer of a C vertex, 0 otherwise
  PartPartition left, right;
  bool exact = false;
  std::size_t size_bound = 0;  // s0^2 bound or 2^t
  bool size_ok = false;
  std::uint64_t violating_pairs = 0;  // block pairs with more than one weight
  std::optional<RegularityWitness> witness;
  bool verified = false;
};

struct CertificateOptions {
  std::uint64_t budget = 10000;
  std::uint64_t seed = 0;
  std::optional<double> delta;
};

LinkCertificate link_certificate(const GowersInstance& g, Pin v, const CertificateOptions& options = {});
/// All 3n certificates; the sampled search for quasirandom links runs once per layer.
std::vector<LinkCertificate> all_link_certificates(const GowersInstance& g, const CertificateOptions& options = {});

struct QuasirandomTolerances {
  std::string label;
  double degree_band = 0.0;        // |d(x) - dn| allowed, fraction of n
  double degree_exceptions = 0.0;  // vertices allowed outside the band, fraction of n
  double codegree_band = 0.0;      // pointwise f(x, y), fraction of n
  double same_interval = 0.0;      // largest coarse interval, fraction of n
  double interval_degree_band = 0.0;
  double interval_codegree_band = 0.0;

  static QuasirandomTolerances paper(double delta);
  /// The M^(-1/3) terms of the degree and codegree estimates.
  static QuasirandomTolerances toy(double delta, std::size_t M);
};

struct QuasirandomReport {
  std::string tolerances;
  double density = 0.0;
  std::size_t degree_violators = 0;
  std::size_t worst_degree_vertex = 0;
  double worst_degree_deviation = 0.0;
  bool condition1 = false;
  bool exact_condition2 = false;  // all large B' enumerated, else pointwise codegree
  bool condition2 = false;
  double worst_ratio = 0.0;  // exact: max S / (n |B'|^2)
  std::array<std::size_t, 2> worst_pair{};
  double worst_codegree = 0.0;  // pointwise: max f(x, y) / n
  bool same_interval = true;
  bool interval_bands_checked = false;
  double worst_interval_degree = 0.0;
  double worst_interval_codegree = 0.0;
  bool interval_bands = true;

  bool pass() const noexcept { return condition1 && condition2 && same_interval; }
};

/// G has left side A and right side B; degrees and codegrees are taken over B.
QuasirandomReport quasirandomness_audit(const BipartiteGraph& g, double delta, const QuasirandomTolerances& tol,
                                        const PartPartition* coarse_a = nullptr,
                                        const PartPartition* coarse_b = nullptr);
QuasirandomReport quasirandomness_audit(const GowersInstance& g, std::size_t r, const QuasirandomTolerances& tol);

struct CascadeOptions {
  double eps = 0.0;
  double beta_base = 0.0;
  double beta_growth = 7.0;
  std::size_t max_witnesses = 16;

  static CascadeOptions paper(double eps);
  /// beta_t stays below 1/72.
  static CascadeOptions toy(double eps, std::size_t t);
};

struct CascadeWitness {
  std::size_t level = 0;
  char side = 'A';  // the side whose block lacks a level-r parent
  std::array<PartPartition::Label, 3> labels{};
  std::array<VertexSet, 3> blocks;
  std::array<VertexSet, 3> first, second;
  double first_density = 0.0, second_density = 0.0, block_density = 0.0;
  double gap = 0.0;        // first - second
  double deviation = 0.0;  // larger deviation of either triple from the block density
  bool verified = false;
};

struct CascadeLevel {
  std::size_t level = 0;
  double beta = 0.0;
  bool valid = false;  // beta < 1/2
  std::optional<RefinementReport> a, b;
  std::vector<CascadeWitness> witnesses;
};

struct CascadeReport {
  std::vector<CascadeLevel> levels;
  std::size_t witness_count() const noexcept;
  bool all_verified() const noexcept;
  double max_gap() const noexcept;
};

CascadeReport refinement_cascade(const GowersInstance& g, const LayeredPartition& candidate,
                                 const CascadeOptions& options);
/// Recomputes all three densities and compares them bit-for-bit.
bool reverify(const WeightedTripartite& h, const CascadeWitness& w, double eps);

KPartiteHypergraph sample_unweighted(const WeightedTripartite& h, std::uint64_t seed);

struct BoxCheck {
  std::array<std::size_t, 3> sizes{};
  double weighted = 0.0, sampled = 0.0;
  double band = 0.0;   // Hoeffding deviation with tail e^(-9/2)
  double sigma = 0.0;  // Bernoulli standard deviation of the sampled density
  bool within = false;
};

struct ConcentrationReport {
  BoxCheck full;
  std::vector<BoxCheck> boxes;
  std::size_t within = 0;
};

/// Full box plus `boxes` random sub-boxes keeping each vertex with probability 1/2.
ConcentrationReport concentration_report(const WeightedTripartite& h, const KPartiteHypergraph& sample,
                                         std::size_t boxes, std::uint64_t seed);

}  // namespace homopart::gowers

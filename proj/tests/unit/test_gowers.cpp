#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "homopart/gowers.hpp"
#include "homopart/rng.hpp"

using namespace homopart;
using namespace homopart::gowers;

namespace {
const GowersInstance& toy_instance() {
  static const GowersInstance g = build_weighted(toy_params(0.1, 0.1, 3, 1), 48);
  return g;
}
}  // namespace

TEST(Sequence, Formulas) {
  EXPECT_EQ(paper_threshold(0.5), 64.0);
  EXPECT_EQ(phi(1), 2u);
  EXPECT_EQ(phi(64), 54u);
  EXPECT_EQ(phi(100000), UINT64_MAX);
  EXPECT_EQ(paper_layer_count(std::pow(7.0, -20.0)), 2);
  EXPECT_THROW(build_sequence(0.1, 0.1, Mode::paper), Infeasible);
}

TEST(Sequence, BranchRuleBelowThreshold) {
  const double eps = std::pow(7.0, -20.0);
  auto p = build_sequence(eps, eps, Mode::paper);
  EXPECT_EQ(p.t, 2u);
  EXPECT_EQ(p.m, (std::vector<std::uint64_t>{1, 2, 4}));
  EXPECT_FALSE(p.quasirandom_level(1));
}

TEST(Sequence, ToyPreset) {
  auto p = toy_params(0.1, 0.1);
  EXPECT_EQ(p.m, (std::vector<std::uint64_t>{1, 2, 4, 8}));
  EXPECT_EQ(p.ratio(3), 2u);
  EXPECT_TRUE(p.quasirandom_level(2));
  EXPECT_FALSE(p.quasirandom_level(1));
  EXPECT_FALSE(p.relaxations.empty());
}

TEST(Sequence, BranchRuleJumpsToThreshold) {
  SequenceOverrides o;
  o.t = 3;
  o.growth_cap = 1000;
  o.s0 = 5.0;
  auto p = build_sequence(0.1, 0.1, Mode::toy, o);
  // phi(1) = 2 < 5 keeps doubling; phi(2) = 2 too; then m = 4 < 5 with phi(4) = 2.
  EXPECT_EQ(p.m, (std::vector<std::uint64_t>{1, 2, 4, 8}));
}

TEST(Family, TinyFamilyIsTrivial) {
  auto f = orthogonal_family(1, 2, 3);
  EXPECT_TRUE(f.check.pass());
  EXPECT_FALSE(f.check.item1_applicable);
}

TEST(Family, Item1BandsAtM1000) {
  // Sides in [400, 600] and all four quadrant intersections in [150, 350], recomputed directly.
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    rng::Stream st(rng::derive(seed, "bands"));
    const std::size_t m = 20;
    std::vector<Bitset> x(m, Bitset(1000));
    for (auto& b : x)
      for (std::size_t j = 0; j < 1000; ++j) b.assign(j, st.next_below(2));
    if (seed == 0) x[3] = Bitset(1000);  // far outside the size band
    bool within = true;
    for (std::size_t i = 0; i < m; ++i) {
      const Bitset yi = ~x[i];
      within = within && x[i].count() >= 400 && x[i].count() <= 600 && yi.count() >= 400 && yi.count() <= 600;
      for (std::size_t j = i + 1; j < m; ++j) {
        const Bitset yj = ~x[j];
        for (std::size_t q : {x[i].count_and(x[j]), x[i].count_and(yj), yi.count_and(x[j]), yi.count_and(yj)})
          within = within && q >= 150 && q <= 350;
      }
    }
    auto c = check_family(m, 1000, x);
    ASSERT_TRUE(c.item1_applicable);
    EXPECT_EQ(c.item1_pass, within) << "seed " << seed;
    if (seed == 0) {
      EXPECT_FALSE(c.item1_pass);
    }
  }
}

TEST(Family, CheckMatchesDirectCount) {
  rng::Stream st(5);
  std::vector<Bitset> x(6, Bitset(40));
  for (auto& b : x)
    for (std::size_t j = 0; j < 40; ++j) b.assign(j, st.next_below(2));
  auto c = check_family(6, 40, x);
  std::size_t violations = 0, best = 0;
  for (std::size_t j = 0; j < 40; ++j)
    for (std::size_t jj = j + 1; jj < 40; ++jj) {
      std::size_t z = 0;
      for (std::size_t i = 0; i < 6; ++i) z += x[i].test(j) == x[i].test(jj);
      best = std::max(best, z);
      violations += 4 * z > 3 * 6;
    }
  EXPECT_EQ(c.agreement_violations, violations);
  EXPECT_EQ(c.max_agreement, best);
  EXPECT_EQ(c.event_pass, violations == 0);
}

TEST(Family, ExhaustionCarriesStatistics) {
  try {
    orthogonal_family(2, 64, 1, 3);
    FAIL() << "two partitions of 64 points always repeat a column pair";
  } catch (const GenerationError& e) {
    EXPECT_EQ(e.attempts, 3u);
    EXPECT_GT(e.last.agreement_violations, 0u);
  }
}

TEST(Margin, UniformWeightsQualifyEverywhere) {
  auto f = orthogonal_family(120, 1000, 11);
  std::vector<double> uniform(1000, 1.0 / 1000);
  auto r = item2_margin(f, uniform, 0.02, 0.5, 0.1);
  EXPECT_TRUE(r.hypothesis);
  EXPECT_TRUE(r.guaranteed);
  EXPECT_EQ(r.count, 120u);
  EXPECT_EQ(item2_margin(f, uniform, 0.3, 0.5, 0.1).count, 120u);
  std::vector<double> spike(1000, 0.0);
  spike[0] = 1.0;
  auto bad = item2_margin(f, spike, 0.05, 0.3, 0.1);
  EXPECT_FALSE(bad.hypothesis);
  EXPECT_FALSE(bad.violations.empty());
  EXPECT_EQ(bad.count, 0u);
}

TEST(Construction, WeightSupportAndLayering) {
  const auto& g = toy_instance();
  const std::size_t n = g.n();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c) {
        const double w = g.weighted.weight(a, b, c);
        const double layer = std::ldexp(1.0, -static_cast<int>(g.layer_of_c[c]));
        ASSERT_TRUE(w == 0.0 || w == layer);
        const std::size_t r = g.layer_of_c[c];
        ASSERT_EQ(w == layer, g.graphs[r - 1].has_edge(a, b));
      }
  for (std::size_t r = 1; r <= g.t(); ++r) EXPECT_TRUE(g.layering.refines(r));
  EXPECT_EQ(g.c_layers().regular_count(), g.t());
  EXPECT_THROW(build_weighted(toy_params(0.1, 0.1, 3, 1), 20), InvalidArgument);
}

TEST(Construction, EdgeRule) {
  const auto& g = toy_instance();
  const std::size_t n = g.n();
  for (std::size_t r = 1; r <= g.t(); ++r) {
    const auto& f = g.families[r - 1];
    const std::size_t coarse = n / g.params.m[r - 1], fine = n / g.params.m[r];
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        const bool expect = f.in_x(b / coarse, a % coarse / fine) == f.in_x(a / coarse, b % coarse / fine);
        ASSERT_EQ(g.graphs[r - 1].has_edge(a, b), expect);
      }
    // Between coarse intervals i and j the graph is the union of two complete boxes.
    for (std::size_t i = 0; i < g.params.m[r - 1]; ++i)
      for (std::size_t j = 0; j < g.params.m[r - 1]; ++j) {
        auto e = g.boxes(r, i, j);
        for (std::size_t a = i * coarse; a < (i + 1) * coarse; ++a)
          for (std::size_t b = j * coarse; b < (j + 1) * coarse; ++b)
            ASSERT_EQ(g.graphs[r - 1].has_edge(a, b), (e.a1.test(a) && e.b1.test(b)) || (e.a2.test(a) && e.b2.test(b)));
      }
  }
}

TEST(Certificates, ExactKindsVerify) {
  const auto& g = toy_instance();
  auto certs = all_link_certificates(g, {10000, 3, std::nullopt});
  EXPECT_EQ(certs.size(), 3 * g.n());
  for (const auto& c : certs) {
    if (c.vertex.part < 2) {
      EXPECT_EQ(c.kind, CertificateKind::layer_constant);
      EXPECT_LE(c.size_bound, 8u);
    }
    if (c.exact) {
      EXPECT_EQ(c.violating_pairs, 0u);
      EXPECT_TRUE(c.size_ok);
    }
    EXPECT_TRUE(c.verified);
  }
  EXPECT_STREQ(to_string(CertificateKind::constant_boxes), "constant-boxes");
}

TEST(Quasirandom, CompleteGraph) {
  BipartiteGraph g(10, 10);
  for (std::size_t x = 0; x < 10; ++x)
    for (std::size_t y = 0; y < 10; ++y) g.add_edge(x, y);
  auto r = quasirandomness_audit(g, 0.5, QuasirandomTolerances::paper(0.5));
  EXPECT_TRUE(r.condition1);
  EXPECT_EQ(r.degree_violators, 0u);
  EXPECT_TRUE(r.exact_condition2);
  EXPECT_LE(r.worst_ratio, 0.0);
  EXPECT_TRUE(r.pass());
}

TEST(Quasirandom, SplitGraphFailsDegreeBand) {
  // Every A vertex sees the same half of B, so B degrees are 0 or n.
  BipartiteGraph g(20, 20);
  for (std::size_t x = 0; x < 20; ++x)
    for (std::size_t y = 0; y < 10; ++y) g.add_edge(x, y);
  auto r = quasirandomness_audit(g, 0.5, QuasirandomTolerances::paper(0.5));
  EXPECT_FALSE(r.condition1);
  EXPECT_FALSE(r.pass());
}

TEST(Cascade, TrivialCandidateYieldsVerifiedWitness) {
  const auto& g = toy_instance();
  const std::size_t n = g.n();
  LayeredPartition trivial({PartPartition::trivial(0, n), PartPartition::trivial(1, n), PartPartition::trivial(2, n)});
  auto report = refinement_cascade(g, trivial, CascadeOptions::toy(0.1, g.t()));
  ASSERT_GE(report.witness_count(), 1u);
  EXPECT_TRUE(report.all_verified());
  EXPECT_GE(report.max_gap(), std::ldexp(1.0, -static_cast<int>(g.t())));
  for (const auto& level : report.levels) EXPECT_LE(level.beta, 1.0 / 72.0 + 1e-15);
  auto w = report.levels[0].witnesses.at(0);
  EXPECT_TRUE(reverify(g.weighted, w, 0.1));
  w.first_density = std::nextafter(w.first_density, 2.0);
  EXPECT_FALSE(reverify(g.weighted, w, 0.1));
}

TEST(Cascade, FinestLayerCandidateHasNoWitness) {
  const auto& g = toy_instance();
  const std::size_t n = g.n();
  LayeredPartition fine({g.layering.partition(0, g.t()), g.layering.partition(1, g.t()), g.c_layers()});
  EXPECT_EQ(refinement_cascade(g, fine, CascadeOptions::toy(0.1, g.t())).witness_count(), 0u);
  (void)n;
}

TEST(Cascade, PaperBetaSchedule) {
  auto o = CascadeOptions::paper(1e-4);
  EXPECT_NEAR(o.beta_base, 0.1, 1e-12);
  EXPECT_GT(o.beta_base * 49.0, 1.0 / 72.0);
}

TEST(Sampling, ZeroOneWeightsAreCopied) {
  WeightedTripartite w(4, 4, 4);
  for (std::size_t a = 0; a < 4; ++a) w.set_weight(a, a, a, 1.0);
  auto s = sample_unweighted(w, 9);
  EXPECT_EQ(s.edge_count(), 4u);
  EXPECT_EQ(sample_unweighted(w, 9), sample_unweighted(w, 10));
}

TEST(Sampling, ConcentrationOnToyInstance) {
  const auto& g = toy_instance();
  auto s = sample_unweighted(g.weighted, 4);
  auto rep = concentration_report(g.weighted, s, 50, 4);
  EXPECT_TRUE(rep.full.within);
  EXPECT_EQ(rep.boxes.size(), 50u);
  EXPECT_GE(rep.within, 48u);
  EXPECT_NEAR(rep.full.band, 1.5 / std::sqrt(std::pow(48.0, 3)), 1e-12);
}

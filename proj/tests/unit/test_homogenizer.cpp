#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "homopart/auditor.hpp"
#include "homopart/generator.hpp"
#include "homopart/homogenizer.hpp"

using namespace homopart;

namespace {
// All links equal G; the table maps every pin to (trivial, trivial) when G is empty or complete.
KPartiteHypergraph product(const BipartiteGraph& g, std::size_t nc) {
  KPartiteHypergraph h({g.left_size(), g.right_size(), nc});
  for (std::size_t a = 0; a < g.left_size(); ++a)
    for (std::size_t b = 0; b < g.right_size(); ++b)
      if (g.has_edge(a, b))
        for (std::size_t c = 0; c < nc; ++c) h.add_edge(std::vector<std::size_t>{a, b, c});
  return h;
}
LinkPartitionOracle trivial_oracle(const std::vector<std::size_t>& sizes) {
  auto table = std::make_shared<LinkTable>();
  table->part_sizes = sizes;
  for (auto& pins : all_pin_tuples(sizes)) {
    std::vector<std::size_t> free;
    for (std::size_t p = 0; p < sizes.size(); ++p)
      if (std::none_of(pins.begin(), pins.end(), [&](const Pin& q) { return q.part == p; })) free.push_back(p);
    table->entries[pins] = {PartPartition::trivial(free[0], sizes[free[0]]),
                            PartPartition::trivial(free[1], sizes[free[1]])};
  }
  return table_oracle(table, 1);
}
}  // namespace

TEST(Tolerances, Formulas) {
  EXPECT_EQ(similarity_block_count(0.1, 5), 135u);
  EXPECT_EQ(similarity_block_count(0.3, 1), 7u);
  EXPECT_NEAR(similarity_input_eps(0.1), 1e-3 / 48.0, 1e-15);
  auto p = ToleranceParams::paper(0.3, 3, 2);
  EXPECT_NEAR(p.gamma, 1.0 / 60.0, 1e-15);
  EXPECT_EQ(similarity_block_count(p.gamma, 2), 354u);
  EXPECT_NEAR(paper_anchor_count(0.3, 3, 2) / (std::pow(354.0 * 60.0, 2) * std::log(2.0 / 0.3)), 1.0, 1e-9);
  EXPECT_THROW(ToleranceParams::paper(0.6, 3, 1), InvalidArgument);
}

TEST(Similarity, CompleteBipartiteHandTrace) {
  BipartiteGraph g(120, 120);
  for (std::size_t x = 0; x < 120; ++x)
    for (std::size_t y = 0; y < 120; ++y) g.add_edge(x, y);
  auto r = similarity_partition(g, PartPartition::trivial(0, 120), PartPartition::trivial(1, 120), 0.3, 1);
  EXPECT_EQ(r.q, 7u);
  EXPECT_EQ(r.m, 12u);
  EXPECT_EQ(r.exceptional_size, 36u);
  EXPECT_EQ(r.max_intra_distance, 0u);
  EXPECT_TRUE(r.contract_met);
  EXPECT_TRUE(r.partition.equitable());
}

TEST(Similarity, PlantedContract) {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const std::size_t rr = 1 + seed % 4;
    const double gamma = 0.1 + 0.1 * static_cast<double>(seed % 3);
    auto pb = planted_bipartite(120, 120, rr, seed);
    auto r = similarity_partition(pb.graph, pb.left, pb.right, gamma, rr, seed);
    EXPECT_TRUE(r.contract_met) << "seed " << seed;
    EXPECT_TRUE(r.partition.equitable());
    EXPECT_LE(static_cast<double>(r.exceptional_size), gamma * 120 + 1e-9);
    EXPECT_LE(static_cast<double>(r.max_intra_distance), gamma * 120 + 1e-9);
  }
}

TEST(Similarity, RejectsTooManyBlocks) {
  auto pb = planted_bipartite(30, 30, 3, 1);
  EXPECT_THROW(similarity_partition(pb.graph, pb.left, pb.right, 0.2, 2), InvalidArgument);
}

TEST(TuplePartition, ProductSplitsIntoTwoClasses) {
  BipartiteGraph g(8, 8);
  for (std::size_t a = 0; a < 8; ++a)
    for (std::size_t b = 0; b < 8; ++b)
      if ((a < 4) == (b < 4)) g.add_edge(a, b);
  auto h = product(g, 8);
  auto tp = tuple_partition(h, trivial_oracle({8, 8, 8}), ToleranceParams::practical(0.2, 3, 2));
  EXPECT_EQ(tp.class_count(), 2u);
  EXPECT_EQ(tp.exceptional_count(), 0u);
  for (std::size_t i = 0; i < tp.tuple_count(); ++i) {
    auto t = tp.tuple(i);
    const bool in_g = g.has_edge(t[0], t[1]);
    for (std::size_t j = 0; j < tp.tuple_count(); ++j) {
      auto u = tp.tuple(j);
      EXPECT_EQ(tp.classes[i] == tp.classes[j], in_g == g.has_edge(u[0], u[1]));
    }
  }
  auto scan = scan_classes(h, tp, true);
  EXPECT_EQ(scan.max_pairwise_distance, 0u);
}

TEST(TuplePartition, EmptyHypergraphIsOneClass) {
  KPartiteHypergraph h({6, 6, 6});
  auto tp = tuple_partition(h, trivial_oracle({6, 6, 6}), ToleranceParams::practical(0.2, 3, 1));
  EXPECT_EQ(tp.class_count(), 1u);
  EXPECT_EQ(tp.exceptional_count(), 0u);
  EXPECT_EQ(tp.class_sizes[1], 36u);
}

TEST(TuplePartition, PaperModeRefusesHugeAnchorCounts) {
  KPartiteHypergraph h({6, 6, 6});
  auto params = ToleranceParams::paper(0.3, 3, 2);
  EXPECT_THROW(tuple_partition(h, trivial_oracle({6, 6, 6}), params), Infeasible);
}

TEST(TuplePartition, CoverageErrorCarriesUncoveredMass) {
  auto inst = generate({3, {12, 12, 12}, Family::uniform_random, 2, 0.0, 0.5, 3});
  TuplePartitionOptions opt;
  opt.max_anchors = 2;
  try {
    tuple_partition(inst.hypergraph, greedy_oracle(inst.hypergraph, 2, 0.2), ToleranceParams::practical(0.2, 3, 2),
                    opt);
    FAIL() << "expected a coverage failure";
  } catch (const CoverageError& e) {
    EXPECT_EQ(e.tuples, 144u);
    EXPECT_EQ(e.anchors, 2u);
    EXPECT_GT(e.uncovered, static_cast<std::size_t>(0.2 * 144));
  }
}

TEST(TuplePartition, PlantedClassesAreTight) {
  auto inst = generate({3, {30, 30, 30}, Family::planted_boxes, 2, 0.0, 0.5, 11});
  auto tp = tuple_partition(inst.hypergraph, inst.oracle(), ToleranceParams::practical(0.2, 3, 2));
  EXPECT_LE(static_cast<double>(tp.exceptional_count()), 0.2 * 900);
  auto scan = scan_classes(inst.hypergraph, tp, true);
  EXPECT_TRUE(scan.exhaustive);
  EXPECT_LE(static_cast<double>(scan.max_pairwise_distance), 0.2 * 30);
}

TEST(Twins, ExcellenceThreshold) {
  BipartiteGraph g(120, 120);
  for (std::size_t x = 0; x < 120; ++x)
    for (std::size_t y = 0; y < 120; ++y) g.add_edge(x, y);
  auto h = product(g, 120);
  auto params = ToleranceParams::practical(0.2, 3, 1, 0.3);
  auto report = twin_diagnostics(h, trivial_oracle({120, 120, 120}), params, 2, 20, 5);
  EXPECT_EQ(report.q, 7u);
  EXPECT_NEAR(report.excellence_threshold, std::pow(36.0 / 7.0, 2), 1e-9);
  EXPECT_EQ(report.sampled.size(), 20u);
  EXPECT_GT(report.excellent_fraction, 0.0);
  for (const auto& counts : report.twin_counts)
    for (std::size_t c : counts) EXPECT_TRUE(c == 0 || c == 12) << c;
}

TEST(Homogenize, CompleteHypergraphIsTrivial) {
  BipartiteGraph g(10, 10);
  for (std::size_t x = 0; x < 10; ++x)
    for (std::size_t y = 0; y < 10; ++y) g.add_edge(x, y);
  auto h = product(g, 10);
  auto r = homogeneous_partition(h, trivial_oracle({10, 10, 10}), 0.2, 1);
  for (auto& part : r.parts) EXPECT_EQ(part.atoms, 1u);
  auto audit = homogeneity_audit(h, r.partition, 0.2);
  EXPECT_TRUE(audit.pass);
  EXPECT_EQ(audit.mass, 0.0);
}

TEST(Homogenize, PlantedInstancePassesAudit) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    auto inst = generate({3, {30, 30, 30}, Family::planted_boxes, 2, 0.0, 0.5, seed});
    auto r = homogeneous_partition(inst.hypergraph, inst.oracle(), 0.2, seed);
    EXPECT_NEAR(r.inner_eps, 0.04 / 24.0, 1e-15);
    auto audit = homogeneity_audit(inst.hypergraph, r.partition, 0.2);
    EXPECT_TRUE(audit.pass);
    for (std::size_t i = 0; i < 3; ++i) {
      EXPECT_LE(static_cast<double>(r.partition[i].block_count()), r.parts[i].budget);
      EXPECT_TRUE(r.partition[i].equitable());
    }
  }
}

#include <gtest/gtest.h>

#include <memory>
#include <vector>

#include "homopart/auditor.hpp"
#include "homopart/error.hpp"
#include "homopart/generator.hpp"
#include "homopart/oracle.hpp"

using namespace homopart;

TEST(PinTuples, EnumeratesEveryLink) {
  auto tuples = all_pin_tuples({3, 4, 5});
  EXPECT_EQ(tuples.size(), 3u + 4u + 5u);
  auto four = all_pin_tuples({2, 2, 2, 2});
  EXPECT_EQ(four.size(), 6u * 4u);
  for (auto& t : four) EXPECT_EQ(t.size(), 2u);
}

TEST(Oracle, TableLookupAndRejections) {
  auto table = std::make_shared<LinkTable>();
  table->part_sizes = {2, 2, 2};
  LinkPartition lp{PartPartition::trivial(1, 2), PartPartition::trivial(2, 2)};
  table->entries[{Pin{0, 0}}] = lp;
  auto oracle = table_oracle(table, 1);
  std::vector<Pin> pins{{0, 0}};
  EXPECT_EQ(oracle.partition(pins), lp);
  std::vector<Pin> missing{{0, 1}};
  EXPECT_THROW(oracle.partition(missing), InvalidArgument);

  auto strict = std::make_shared<LinkTable>(*table);
  strict->entries[{Pin{0, 0}}].left = PartPartition::singletons(1, 2);
  EXPECT_THROW(table_oracle(strict, 1).partition(pins), InvalidArgument);
}

TEST(Oracle, GreedyAndExhaustiveFindPlantedStructure) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto planted = planted_bipartite(10, 10, 2, seed);
    auto greedy = greedy_link_partition(planted.graph, 4, 0.0);
    EXPECT_TRUE(homogeneity_audit(planted.graph, greedy.left, greedy.right, 0.0).pass);
    auto exact = exhaustive_link_partition(planted.graph, 2, 0.0);
    EXPECT_TRUE(homogeneity_audit(planted.graph, exact.left, exact.right, 0.0).pass) << "seed " << seed;
    EXPECT_LE(exact.left.block_count(), 2u);
    EXPECT_LE(exact.right.block_count(), 2u);
  }
}

TEST(Generator, PlantedLinksAreZeroHomogeneous) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto inst = generate({3, {12, 12, 12}, Family::planted_boxes, 2, 0.0, 0.5, seed});
    ASSERT_TRUE(inst.links);
    auto report = audit_link_hypothesis(inst.hypergraph, inst.oracle(), 0.0);
    EXPECT_EQ(report.failing, 0u);
    EXPECT_EQ(report.links, 36u);
    EXPECT_LE(report.max_blocks, 2u);
  }
}

TEST(Generator, ProductAndThresholdFamilies) {
  auto product = generate({3, {12, 12, 12}, Family::product, 3, 0.0, 0.5, 4});
  EXPECT_EQ(audit_link_hypothesis(product.hypergraph, product.oracle(), 0.0).failing, 0u);
  auto threshold = generate({3, {12, 12, 12}, Family::interval_threshold, 3, 0.0, 0.5, 4});
  EXPECT_EQ(audit_link_hypothesis(threshold.hypergraph, threshold.oracle(), 0.0).failing, 0u);
  auto uniform = generate({3, {8, 8, 8}, Family::uniform_random, 2, 0.0, 0.5, 4});
  EXPECT_FALSE(uniform.links);
  EXPECT_GT(uniform.hypergraph.edge_count(), 0u);
  EXPECT_THROW(uniform.oracle(), InvalidArgument);
}

TEST(Generator, DeterministicPerSeed) {
  InstanceSpec spec{3, {10, 11, 12}, Family::planted_boxes, 3, 0.0, 0.5, 77};
  EXPECT_EQ(generate(spec).hypergraph, generate(spec).hypergraph);
  spec.seed = 78;
  EXPECT_NE(generate(spec).hypergraph, generate(InstanceSpec{3, {10, 11, 12}, Family::planted_boxes, 3, 0.0, 0.5, 77}).hypergraph);
}

TEST(Generator, PlantedBoxesHaveBoundedSlicewiseVc) {
  for (std::size_t n : {6u, 8u, 10u}) {
    auto inst = generate({3, {n, n, n}, Family::planted_boxes, 2, 0.0, 0.5, n});
    EXPECT_LE(slicewise_vc(inst.hypergraph, 6).dimension, 3u) << "n " << n;
  }
}

TEST(Generator, FamilyNames) {
  for (auto f : {Family::planted_boxes, Family::product, Family::interval_threshold, Family::uniform_random})
    EXPECT_EQ(parse_family(to_string(f)), f);
  EXPECT_THROW(parse_family("nope"), InvalidArgument);
}

TEST(Generator, RandomBlocksAreNearEqual) {
  auto p = random_blocks(0, 11, 3, 5);
  EXPECT_EQ(p.regular_count(), 3u);
  for (PartPartition::Label l = 1; l <= 3; ++l) {
    EXPECT_GE(p.block_size(l), 3u);
    EXPECT_LE(p.block_size(l), 4u);
  }
}

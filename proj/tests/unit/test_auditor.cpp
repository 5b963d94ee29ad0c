#include <gtest/gtest.h>

#include <vector>

#include "homopart/auditor.hpp"
#include "homopart/rng.hpp"

using namespace homopart;

namespace {
KPartiteHypergraph complete(std::size_t n) {
  KPartiteHypergraph h({n, n, n});
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c) h.add_edge(std::vector<std::size_t>{a, b, c});
  return h;
}
LayeredPartition intervals3(std::size_t n, std::size_t count) {
  return LayeredPartition({PartPartition::intervals(0, n, count), PartPartition::intervals(1, n, count),
                           PartPartition::intervals(2, n, count)});
}
std::vector<VertexSet> full3(std::size_t n) {
  return {VertexSet::full(0, n), VertexSet::full(1, n), VertexSet::full(2, n)};
}

// Brute-force shatter oracle: sets on one side, witnesses on the other.
std::size_t brute_vc_side(const BipartiteGraph& g) {
  const std::size_t nl = g.left_size(), nr = g.right_size();
  std::size_t best = 0;
  for (std::uint32_t s = 1; s < (1u << nr); ++s) {
    const std::size_t d = __builtin_popcount(s);
    if (d <= best) continue;
    std::vector<bool> seen(std::size_t{1} << d, false);
    for (std::size_t x = 0; x < nl; ++x) {
      std::uint32_t pattern = 0, bit = 0;
      for (std::size_t y = 0; y < nr; ++y)
        if (s >> y & 1) pattern |= std::uint32_t(g.has_edge(x, y)) << bit++;
      seen[pattern] = true;
    }
    bool all = true;
    for (bool b : seen) all = all && b;
    if (all) best = d;
  }
  return best;
}
}  // namespace

TEST(Homogeneity, CompleteGraphPasses) {
  auto h = complete(4);
  for (double eps : {0.0, 0.1, 0.3}) {
    auto r = homogeneity_audit(h, intervals3(4, 2), eps);
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.mass, 0.0);
  }
}

TEST(Homogeneity, HalfDenseBlockFails) {
  KPartiteHypergraph h({4, 4, 4});
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b)
      for (std::size_t c = 0; c < 2; ++c)
        if ((a + b + c) % 2 == 0) h.add_edge(std::vector<std::size_t>{a, b, c});
  auto r = homogeneity_audit(h, intervals3(4, 2), 0.1);
  EXPECT_EQ(r.mass, 8.0);
  EXPECT_DOUBLE_EQ(r.normalized_mass, 0.125);
  EXPECT_EQ(r.failing, 1u);
  EXPECT_FALSE(r.pass);
}

TEST(Homogeneity, SingletonsAlwaysPass) {
  KPartiteHypergraph h({5, 5, 5});
  rng::Stream st(9);
  for (std::size_t a = 0; a < 5; ++a)
    for (std::size_t b = 0; b < 5; ++b)
      for (std::size_t c = 0; c < 5; ++c)
        if (st.next_below(2)) h.add_edge(std::vector<std::size_t>{a, b, c});
  LayeredPartition p({PartPartition::singletons(0, 5), PartPartition::singletons(1, 5),
                      PartPartition::singletons(2, 5)});
  auto r = homogeneity_audit(h, p, 0.01);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.mass, 0.0);
  EXPECT_EQ(r.tuple_count(), 125u);
}

TEST(Homogeneity, BandEdgesAreInclusive) {
  EXPECT_TRUE(is_homogeneous(1.0, 10.0, 0.1));
  EXPECT_TRUE(is_homogeneous(9.0, 10.0, 0.1));
  EXPECT_FALSE(is_homogeneous(2.0, 10.0, 0.1));
  EXPECT_TRUE(is_homogeneous(3.0, 10.0, 0.3));
}

TEST(Homogeneity, WeightedAndBipartite) {
  WeightedTripartite w(2, 2, 2);
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b)
      for (std::size_t c = 0; c < 2; ++c) w.set_weight(a, b, c, 0.5);
  auto r = homogeneity_audit(w, intervals3(2, 1), 0.2);
  EXPECT_TRUE(r.weighted);
  EXPECT_FALSE(r.pass);

  BipartiteGraph g(4, 4);
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 2; ++y) g.add_edge(x, y);
  auto ok = homogeneity_audit(g, PartPartition::intervals(0, 4, 2), PartPartition::intervals(1, 4, 2), 0.0);
  EXPECT_TRUE(ok.pass);
  auto bad = homogeneity_audit(g, PartPartition::trivial(0, 4), PartPartition::trivial(1, 4), 0.2);
  EXPECT_FALSE(bad.pass);
}

TEST(Homogeneity, NonPartiteCountsRepeatedBlocks) {
  UniformHypergraph h{3, 4, {{0, 1, 2}}};
  auto r = homogeneity_audit(h, PartPartition::intervals(0, 4, 2), 0.1);
  EXPECT_EQ(r.tuple_count(), 8u);
}

TEST(Disagreement, Examples) {
  auto c = disagreement_pairs(complete(3), intervals3(3, 1));
  EXPECT_EQ(c.regular_total(), 0u);

  KPartiteHypergraph h({1, 1, 2});
  h.add_edge(std::vector<std::size_t>{0, 0, 0});
  LayeredPartition p({PartPartition::trivial(0, 1), PartPartition::trivial(1, 1), PartPartition::trivial(2, 2)});
  auto d = disagreement_pairs(h, p);
  EXPECT_EQ(d.regular, (std::vector<std::uint64_t>{0, 0, 1}));
  EXPECT_DOUBLE_EQ(disagreement_threshold(0.25, 4, 3, 2), 6.0);
}

TEST(Witness, CompleteGraphHasNone) {
  auto h = complete(4);
  auto w = weak_regularity_witness(h, full3(4), 0.1);
  EXPECT_FALSE(w.found);
  EXPECT_TRUE(w.conclusive());
}

TEST(Witness, EmptyCornerIsFoundAndReverifies) {
  KPartiteHypergraph h({4, 4, 4});
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b)
      if (!(a < 2 && b < 2))
        for (std::size_t c = 0; c < 4; ++c) h.add_edge(std::vector<std::size_t>{a, b, c});
  auto w = weak_regularity_witness(h, full3(4), 0.2);
  ASSERT_TRUE(w.found);
  EXPECT_GT(w.deviation, 0.2);
  EXPECT_TRUE(reverify(h, w));
  w.inner_density += 1e-12;
  EXPECT_FALSE(reverify(h, w));
}

TEST(Witness, BipartiteExamples) {
  BipartiteGraph full(6, 6);
  for (std::size_t x = 0; x < 6; ++x)
    for (std::size_t y = 0; y < 6; ++y) full.add_edge(x, y);
  Bitset all(6, true);
  EXPECT_FALSE(bipartite_regularity_witness(full, all, all, 0.1).found);

  BipartiteGraph split(8, 8);
  for (std::size_t x = 0; x < 4; ++x)
    for (std::size_t y = 0; y < 8; ++y) split.add_edge(x, y);
  Bitset all8(8, true);
  auto w = bipartite_regularity_witness(split, all8, all8, 0.3);
  ASSERT_TRUE(w.found);
  EXPECT_TRUE(reverify(split, w));

  WeightedBipartite constant(5, 5);
  for (std::size_t x = 0; x < 5; ++x)
    for (std::size_t y = 0; y < 5; ++y) constant.set_weight(x, y, 0.25);
  Bitset all5(5, true);
  EXPECT_FALSE(bipartite_regularity_witness(constant, all5, all5, 0.01).found);
}

TEST(Witness, MinSubsetSize) {
  EXPECT_EQ(min_subset_size(0.2, 10), 2u);
  EXPECT_EQ(min_subset_size(0.25, 10), 3u);
  EXPECT_EQ(min_subset_size(0.5, 1), 1u);
}

TEST(Vc, Examples) {
  BipartiteGraph complete_g(5, 5), empty_g(5, 5), matching(4, 4), half(6, 6);
  for (std::size_t x = 0; x < 5; ++x)
    for (std::size_t y = 0; y < 5; ++y) complete_g.add_edge(x, y);
  for (std::size_t i = 0; i < 4; ++i) matching.add_edge(i, i);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = i; j < 6; ++j) half.add_edge(i, j);
  EXPECT_EQ(vc_dimension(complete_g, 5).dimension, 0u);
  EXPECT_EQ(vc_dimension(empty_g, 5).dimension, 0u);
  EXPECT_EQ(vc_dimension(matching, 5).dimension, 1u);
  EXPECT_EQ(vc_dimension(half, 5).dimension, 1u);
}

TEST(Vc, AgreesWithBruteForce) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    rng::Stream st(rng::derive(seed, "vc"));
    BipartiteGraph g(1 + st.next_below(5), 1 + st.next_below(5));
    for (std::size_t x = 0; x < g.left_size(); ++x)
      for (std::size_t y = 0; y < g.right_size(); ++y)
        if (st.next_below(2)) g.add_edge(x, y);
    const std::size_t expect = std::max(brute_vc_side(g), brute_vc_side(g.transposed()));
    EXPECT_EQ(vc_dimension(g, 10).dimension, expect) << "seed " << seed;
  }
}

TEST(Vc, CapIsReported) {
  // Bit-pattern graph shatters all 3 right vertices.
  BipartiteGraph g(8, 3);
  for (std::size_t x = 0; x < 8; ++x)
    for (std::size_t y = 0; y < 3; ++y)
      if (x >> y & 1) g.add_edge(x, y);
  EXPECT_EQ(vc_dimension(g, 5).dimension, 3u);
  auto capped = vc_dimension(g, 2);
  EXPECT_EQ(capped.dimension, 2u);
  EXPECT_TRUE(capped.at_least);
}

TEST(Vc, Slicewise) {
  KPartiteHypergraph empty({4, 4, 4});
  EXPECT_EQ(slicewise_vc(empty, 4).dimension, 0u);

  // H = G x C with G a matching on 6+6: the B-pinned and A-pinned links are stars, VC 1.
  KPartiteHypergraph h({6, 6, 6});
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t c = 0; c < 6; ++c) h.add_edge(std::vector<std::size_t>{i, i, c});
  BipartiteGraph matching(6, 6);
  for (std::size_t i = 0; i < 6; ++i) matching.add_edge(i, i);
  std::size_t expect = vc_dimension(matching, 4).dimension;
  for (std::size_t part = 0; part < 3; ++part)
    for (std::size_t v = 0; v < 6; ++v) {
      std::vector<Pin> pins{{part, v}};
      expect = std::max(expect, std::max(brute_vc_side(link(h, pins)), brute_vc_side(link(h, pins).transposed())));
    }
  EXPECT_EQ(slicewise_vc(h, 4).dimension, expect);
}

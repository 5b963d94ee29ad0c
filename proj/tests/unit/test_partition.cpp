#include <gtest/gtest.h>

#include <map>
#include <set>
#include <vector>

#include "homopart/error.hpp"
#include "homopart/partition.hpp"
#include "homopart/rng.hpp"

using namespace homopart;

namespace {
Bitset bits(std::size_t n, std::initializer_list<std::size_t> members) {
  Bitset b(n);
  for (auto v : members) b.set(v);
  return b;
}
PartPartition from_sizes(std::initializer_list<std::size_t> sizes) {
  std::vector<PartPartition::Label> labels;
  PartPartition::Label l = 1;
  for (auto s : sizes) {
    labels.insert(labels.end(), s, l);
    ++l;
  }
  return PartPartition(0, labels);
}
}  // namespace

TEST(PartPartition, Constructors) {
  auto t = PartPartition::trivial(0, 10);
  EXPECT_EQ(t.regular_count(), 1u);
  EXPECT_EQ(t.exceptional_size(), 0u);
  auto s = PartPartition::singletons(1, 5);
  EXPECT_EQ(s.regular_count(), 5u);
  EXPECT_TRUE(s.equitable());
  auto iv = PartPartition::intervals(0, 12, 4);
  EXPECT_EQ(iv.regular_count(), 4u);
  EXPECT_EQ(iv.label(5), 2u);
  EXPECT_EQ(iv.block_size(3), 3u);
  EXPECT_THROW(PartPartition::intervals(0, 10, 4), InvalidArgument);
  std::vector<Bitset> blocks{bits(4, {0, 3}), bits(4, {1, 2})};
  auto fb = PartPartition::from_blocks(0, 4, blocks);
  EXPECT_EQ(fb.label(3), 1u);
  EXPECT_EQ(fb.members(2), bits(4, {1, 2}));
}

TEST(PartPartition, ExceptionalBlock) {
  PartPartition p(0, {0, 1, 1, 2, 2, 0});
  EXPECT_EQ(p.exceptional_size(), 2u);
  EXPECT_EQ(p.regular_count(), 2u);
  EXPECT_EQ(p.block_count(), 3u);
  EXPECT_EQ(p.nonempty_labels(), (std::vector<PartPartition::Label>{0, 1, 2}));
  EXPECT_TRUE(p.equitable());
}

TEST(CommonRefinement, IdenticalSetsGiveTwoAtoms) {
  Bitset s = bits(8, {1, 4, 5});
  std::vector<Bitset> sets{s, s};
  auto p = common_refinement(0, 8, sets);
  EXPECT_EQ(p.regular_count(), 2u);
  EXPECT_EQ(p.exceptional_size(), 0u);
}

TEST(CommonRefinement, MatchesSignatureOracle) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    rng::Stream st(seed);
    std::size_t t = 1 + st.next_below(4);
    std::vector<Bitset> sets(t, Bitset(8));
    for (auto& b : sets)
      for (std::size_t v = 0; v < 8; ++v) b.assign(v, st.next_below(2));
    auto p = common_refinement(0, 8, sets);
    std::map<std::vector<bool>, std::set<std::size_t>> atoms;
    for (std::size_t v = 0; v < 8; ++v) {
      std::vector<bool> sig;
      for (auto& b : sets) sig.push_back(b.test(v));
      atoms[sig].insert(v);
    }
    ASSERT_EQ(p.regular_count(), atoms.size());
    EXPECT_LE(p.regular_count(), std::size_t{1} << t);
    for (auto& [sig, members] : atoms) {
      auto l = p.label(*members.begin());
      for (auto v : members) EXPECT_EQ(p.label(v), l);
      EXPECT_EQ(p.block_size(l), members.size());
    }
  }
}

TEST(Equalize, EvenBlocks) {
  auto r = equalize(from_sizes({6, 6}), 3);
  EXPECT_EQ(r.partition.regular_count(), 4u);
  EXPECT_EQ(r.remainder, 0u);
  EXPECT_TRUE(r.partition.equitable());
}

TEST(Equalize, LeftoversArePooled) {
  auto r = equalize(from_sizes({5, 7}), 3);
  EXPECT_EQ(r.partition.regular_count(), 4u);
  EXPECT_EQ(r.remainder, 0u);
  for (PartPartition::Label l = 1; l <= 4; ++l) EXPECT_EQ(r.partition.block_size(l), 3u);
}

TEST(Equalize, PartialPieceBecomesExceptional) {
  auto r = equalize(from_sizes({4, 4}), 3);
  EXPECT_EQ(r.partition.regular_count(), 2u);
  EXPECT_EQ(r.remainder, 2u);
  EXPECT_EQ(r.partition.exceptional_size(), 2u);
}

TEST(BetaRefines, IdenticalAndStrictRefinement) {
  auto a = PartPartition::intervals(0, 12, 3);
  EXPECT_TRUE(beta_refines(a, a, 0.0).refines);
  EXPECT_EQ(beta_refines(a, a, 0.0).unmatched, 0u);
  auto fine = PartPartition::intervals(0, 12, 6);
  auto r = beta_refines(fine, a, 0.0);
  EXPECT_TRUE(r.refines);
  for (auto& parent : r.parent) EXPECT_TRUE(parent.has_value());
}

TEST(BetaRefines, StraddlingBlockIsUnmatched) {
  auto fine = PartPartition::trivial(0, 10);
  auto coarse = from_sizes({6, 4});
  auto r = beta_refines(fine, coarse, 0.3);
  EXPECT_EQ(r.unmatched, 1u);
  EXPECT_FALSE(r.parent[0].has_value());
  EXPECT_FALSE(r.refines);
  auto looser = beta_refines(fine, coarse, 0.4);
  EXPECT_EQ(looser.unmatched, 0u);
  EXPECT_THROW(beta_refines(fine, coarse, 0.5), InvalidArgument);
}

#include <gtest/gtest.h>

#include <cmath>

#include <set>

#include "stoplab/rng.hpp"

using stoplab::CounterRng;
using stoplab::RngStream;

TEST(Philox, KnownAnswerZero) {
  const auto out = CounterRng::philox4x32_10({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out, (std::array<std::uint32_t, 4>{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
}

TEST(Philox, KnownAnswerOnes) {
  const auto out = CounterRng::philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                                             {0xffffffff, 0xffffffff});
  EXPECT_EQ(out, (std::array<std::uint32_t, 4>{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
}

TEST(Philox, KnownAnswerPi) {
  const auto out = CounterRng::philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                                             {0xa4093822, 0x299f31d0});
  EXPECT_EQ(out, (std::array<std::uint32_t, 4>{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(CounterRng, SameStreamSameSequence) {
  CounterRng a(RngStream{42, 7});
  CounterRng b(RngStream{42, 7});
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
  for (int i = 0; i < 101; ++i) ASSERT_EQ(a.normal(), b.normal());
}

TEST(CounterRng, DistinctStreamsDiffer) {
  std::set<std::uint64_t> first;
  for (std::uint64_t id = 0; id < 200; ++id) first.insert(CounterRng(RngStream{1, id}).next_u64());
  EXPECT_EQ(first.size(), 200u);
  EXPECT_NE(CounterRng(RngStream{1, 0}).next_u64(), CounterRng(RngStream{2, 0}).next_u64());
}

TEST(CounterRng, SplitIsPureAndDistinct) {
  const RngStream root{9, 3};
  EXPECT_EQ(root.split(5), root.split(5));
  EXPECT_NE(root.split(5), root.split(6));
  EXPECT_NE(root.split(0), root);
  std::set<std::uint64_t> ids;
  for (std::uint64_t k = 0; k < 1000; ++k) ids.insert(root.split(k).stream_id);
  EXPECT_EQ(ids.size(), 1000u);
}

TEST(CounterRng, UniformInOpenUnitInterval) {
  CounterRng rng(RngStream{3, 0});
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000.0, 0.5, 3.0 * std::sqrt(1.0 / 12.0 / 100000.0));
}

TEST(CounterRng, NormalMoments) {
  CounterRng rng(RngStream{5, 1});
  constexpr int kDraws = 200000;
  double s1 = 0, s2 = 0, s4 = 0;
  for (int i = 0; i < kDraws; ++i) {
    const double z = rng.normal();
    s1 += z;
    s2 += z * z;
    s4 += z * z * z * z;
  }
  EXPECT_NEAR(s1 / kDraws, 0.0, 3.0 / std::sqrt(kDraws));
  EXPECT_NEAR(s2 / kDraws, 1.0, 3.0 * std::sqrt(2.0 / kDraws));
  EXPECT_NEAR(s4 / kDraws, 3.0, 3.0 * std::sqrt(96.0 / kDraws));
}

TEST(CounterRng, PositionAdvancesPerBlock) {
  CounterRng rng(RngStream{0, 0});
  EXPECT_EQ(rng.position(), 0u);
  rng.next_u64();
  rng.next_u64();
  EXPECT_EQ(rng.position(), 1u);
  rng.next_u64();
  EXPECT_EQ(rng.position(), 2u);
}

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bsig/baseline.hpp"
#include "bsig/graph.hpp"

using namespace bsig;

namespace {

node_set range_set(node_id lo, node_id hi) {
  node_set s(hi - lo);
  std::iota(s.begin(), s.end(), lo);
  return s;
}

}  // namespace

TEST(MinHash, EmptySetIsSentinel) {
  const auto sk = build_minhash({}, 16, 1);
  EXPECT_EQ(sk.size(), 16u);
  for (auto r : sk.registers) EXPECT_EQ(r, kMinHashEmpty);
}

TEST(MinHash, ZeroRegisters) {
  try {
    (void)build_minhash({}, 0, 1);
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::zero_registers);
  }
}

TEST(MinHash, DeterministicAndPrefixStable) {
  const auto s = range_set(10, 90);
  const auto a = build_minhash(s, 64, 9);
  EXPECT_EQ(a, build_minhash(s, 64, 9));
  EXPECT_EQ(a.prefix(20), build_minhash(s, 20, 9));
  EXPECT_NE(a, build_minhash(s, 64, 10));
}

TEST(MinHash, RegisterIsMinimumOverSet) {
  const auto s = range_set(0, 50);
  const auto sk = build_minhash(s, 8, 4);
  for (std::size_t i = 0; i < 8; ++i) {
    std::uint64_t lo = kMinHashEmpty;
    for (node_id w : s) lo = std::min(lo, mix(derive_seed(4, i), w));
    EXPECT_EQ(sk.registers[i], lo);
  }
}

TEST(Jaccard, Degenerate) {
  const auto s = range_set(0, 30);
  const auto sk = build_minhash(s, 32, 1);
  EXPECT_EQ(estimate_jaccard(sk, sk), 1.0);
  const auto e = build_minhash({}, 32, 1);
  EXPECT_EQ(estimate_jaccard(e, e), 0.0);
  try {
    (void)estimate_jaccard(sk, build_minhash(s, 16, 1));
    FAIL();
  } catch (const error& err) {
    EXPECT_EQ(err.code(), errc::register_count_mismatch);
  }
}

TEST(Jaccard, OneThirdWithinFourSigma) {
  const auto a = range_set(0, 200);
  const auto b = range_set(100, 300);
  const double j = 1.0 / 3.0;
  const double se = std::sqrt(j * (1 - j) / 512.0);
  EXPECT_NEAR(estimate_jaccard(build_minhash(a, 512, 3), build_minhash(b, 512, 3)), j, 4 * se);
}

TEST(Jaccard, DisjointSetsNearZero) {
  const auto a = range_set(0, 100);
  const auto b = range_set(1000, 1100);
  EXPECT_LE(estimate_jaccard(build_minhash(a, 512, 5), build_minhash(b, 512, 5)), 0.03);
}

TEST(Jaccard, UnbiasedOverSeeds) {
  const auto a = range_set(0, 60);
  const auto b = range_set(20, 100);
  const double j = 40.0 / 100.0;
  const int seeds = 200;
  const std::size_t r = 64;
  double total = 0.0;
  for (int s = 0; s < seeds; ++s)
    total += estimate_jaccard(build_minhash(a, r, static_cast<std::uint64_t>(s)), build_minhash(b, r, static_cast<std::uint64_t>(s)));
  const double se = std::sqrt(j * (1 - j) / static_cast<double>(r * seeds));
  EXPECT_NEAR(total / seeds, j, 4 * se);
}

TEST(Hll, InvalidPrecision) {
  EXPECT_THROW(hll_sketch(3, 1), error);
  EXPECT_THROW(hll_sketch(17, 1), error);
  try {
    (void)build_hll({}, 2, 1);
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::invalid_precision);
  }
  EXPECT_NO_THROW(hll_sketch(4, 1));
  EXPECT_NO_THROW(hll_sketch(16, 1));
}

TEST(Hll, EmptyIsZero) { EXPECT_EQ(estimate_hll_cardinality(build_hll({}, 8, 1)), 0.0); }

TEST(Hll, ThousandIdsWithinTwentyPercent) {
  const auto s = range_set(0, 1000);
  int within = 0;
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const double est = estimate_hll_cardinality(build_hll(s, 8, seed));
    total += est;
    within += std::abs(est - 1000.0) <= 200.0 ? 1 : 0;
  }
  EXPECT_GE(within, 97);
  EXPECT_NEAR(total / 100.0, 1000.0, 50.0);
}

TEST(Hll, DuplicatesDoNotChangeEstimate) {
  auto h = build_hll(range_set(0, 500), 10, 2);
  const double before = h.estimate();
  const auto regs_before = std::vector<std::uint8_t>(h.registers().begin(), h.registers().end());
  for (node_id w = 0; w < 500; ++w) h.insert(w);
  EXPECT_EQ(h.estimate(), before);
  EXPECT_TRUE(std::equal(regs_before.begin(), regs_before.end(), h.registers().begin()));
}

TEST(Hll, SupersetRegistersDominate) {
  const auto small = build_hll(range_set(0, 300), 8, 6);
  const auto big = build_hll(range_set(0, 3000), 8, 6);
  for (std::size_t i = 0; i < small.registers().size(); ++i) EXPECT_GE(big.registers()[i], small.registers()[i]);
}

TEST(Hll, RanksBounded) {
  const auto h = build_hll(range_set(0, 100000), 12, 1);
  for (auto r : h.registers()) EXPECT_LE(r, 64 - 12 + 1);
}

TEST(TwoStep, IdenticalAndDisjoint) {
  const auto a = range_set(0, 400);
  const auto mh = build_minhash(a, 256, 1);
  const auto hll = build_hll(a, 10, 2);
  EXPECT_DOUBLE_EQ(estimate_intersection_two_step(mh, mh, hll, hll), hll.estimate());

  const auto b = range_set(5000, 5400);
  const double disjoint =
      estimate_intersection_two_step(mh, build_minhash(b, 256, 1), hll, build_hll(b, 10, 2));
  EXPECT_LT(disjoint, 10.0);
}

TEST(TwoStep, ErOneHopMaeIsModest) {
  const auto g = gen_erdos_renyi(1000, 0.01, 12);
  std::vector<minhash_sketch> mh;
  std::vector<hll_sketch> hll;
  for (node_id u = 0; u < 1000; ++u) {
    const auto nb = g.neighbors(u);
    mh.push_back(build_minhash(nb, 128, 3));
    hll.push_back(build_hll(nb, 8, 4));
  }
  double total = 0.0;
  for (node_id u = 0; u < 500; ++u) {
    const node_id v = 999 - u;
    const auto exact = static_cast<double>(intersection_size(g.neighbors(u), g.neighbors(v)));
    const double est = estimate_intersection_two_step(mh[u], mh[v], hll[u], hll[v]);
    EXPECT_GE(est, 0.0);
    EXPECT_LE(est, std::min(hll[u].estimate(), hll[v].estimate()));
    total += std::abs(est - exact);
  }
  EXPECT_LT(total / 500.0, 2.0);
}

TEST(Budget, Split) {
  const auto b4k = split_budget(4096);
  EXPECT_EQ(b4k.minhash_registers, 51u);
  EXPECT_EQ(b4k.hll_precision, 6u);
  const auto b64k = split_budget(65536);
  EXPECT_EQ(b64k.minhash_registers, 819u);
  EXPECT_EQ(b64k.hll_precision, 10u);
  for (std::uint64_t bits : {64u, 4096u, 8192u, 16384u, 32768u, 65536u}) {
    const auto s = split_budget(bits);
    EXPECT_GE(s.minhash_registers, 1u);
    if (bits >= 4096) {
      EXPECT_LE(s.minhash_registers * 64 + (std::size_t{1} << s.hll_precision) * 8, bits);
    }
  }
}

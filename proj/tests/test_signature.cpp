#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "bsig/signature.hpp"
#include "test_util.hpp"

using namespace bsig;
using bsig::fixtures::complete_graph;
using bsig::fixtures::path_graph;
using bsig::fixtures::star_graph;

namespace {

errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const error& e) {
    return e.code();
  }
  return errc::io_error;
}

// Signature over [0, n) with `count` consecutive bits set from `offset`.
bloom_signature first_bits(std::uint64_t n, std::uint64_t count, std::uint64_t offset = 0) {
  bloom_signature s(n, 1, hash_family::identity(n).fingerprint());
  for (std::uint64_t b = 0; b < count; ++b) s.set(offset + b);
  return s;
}

node_set random_set(std::mt19937_64& rng, std::size_t size, node_id universe) {
  std::set<node_id> s;
  while (s.size() < size) s.insert(static_cast<node_id>(rng() % universe));
  return {s.begin(), s.end()};
}

}  // namespace

TEST(BuildSignature, Empty) {
  const auto s = build_signature({}, hash_family::avalanche(1, 128));
  EXPECT_EQ(s.popcount(), 0u);
  for (auto w : s.words()) EXPECT_EQ(w, 0u);
}

TEST(BuildSignature, IdentityBits) {
  const node_set members{1, 3, 5};
  const auto s = build_signature(members, hash_family::identity(8));
  EXPECT_EQ(s.popcount(), 3u);
  for (std::uint64_t j = 0; j < 8; ++j) EXPECT_EQ(s.test(j), j == 1 || j == 3 || j == 5);
}

TEST(BuildSignature, PopcountIsDistinctBucketCount) {
  std::mt19937_64 rng(1);
  const auto f = hash_family::avalanche(31, 64);
  for (int rep = 0; rep < 20; ++rep) {
    const auto members = random_set(rng, 40, 100000);
    std::set<std::uint64_t> buckets;
    for (node_id w : members) buckets.insert(hash_node(f, w));
    EXPECT_EQ(build_signature(members, f).popcount(), buckets.size());
  }
}

TEST(BuildSignature, TailBitsStayZero) {
  const auto f = hash_family::avalanche(3, 70);
  std::vector<node_id> all(5000);
  for (node_id i = 0; i < all.size(); ++i) all[i] = i;
  const auto s = build_signature(all, f);
  EXPECT_EQ(s.popcount(), 70u);
  EXPECT_EQ(s.words()[1] >> 6, 0u);
}

TEST(BuildSignature, OrHomomorphismAndMonotonicity) {
  std::mt19937_64 rng(2);
  const auto f = hash_family::avalanche(8, 300);
  for (int rep = 0; rep < 50; ++rep) {
    const auto a = random_set(rng, 30, 2000);
    const auto b = random_set(rng, 50, 2000);
    const auto sa = build_signature(a, f);
    const auto sb = build_signature(b, f);
    const auto su = build_signature(set_union(a, b), f);
    for (std::size_t i = 0; i < su.words().size(); ++i) {
      EXPECT_EQ(su.words()[i], sa.words()[i] | sb.words()[i]);
      EXPECT_EQ(sa.words()[i] & su.words()[i], sa.words()[i]);
    }
    EXPECT_LE(sa.popcount(), std::min<std::uint64_t>(300, a.size()));
  }
}

TEST(BuildAll, PathIdentity) {
  const auto sigs = build_all(path_graph(3), 1, hash_family::identity(3), 1);
  EXPECT_EQ(sigs[0].popcount(), 1u);
  EXPECT_TRUE(sigs[0].test(1));
  EXPECT_EQ(sigs[1].popcount(), 2u);
}

TEST(BuildAll, MatchesPerNodeBuild) {
  const auto g = gen_erdos_renyi(1000, 0.01, 4);
  const auto f = hash_family::avalanche(5, 4096);
  const auto sigs = build_all(g, 2, f, 3);
  for (node_id u = 0; u < g.node_count(); ++u) {
    const auto ref = build_signature(k_hop_neighborhood(g, u, 2), f, 2);
    ASSERT_TRUE(std::equal(ref.words().begin(), ref.words().end(), sigs[u].words().begin()));
    ASSERT_EQ(ref.popcount(), sigs[u].popcount());
  }
}

TEST(BuildAll, IndependentOfThreadCount) {
  const auto g = gen_barabasi_albert(700, 4, 1);
  const auto f = hash_family::avalanche(11, 1000);
  const auto one = build_all(g, 2, f, 1);
  EXPECT_EQ(one, build_all(g, 2, f, 4));
  EXPECT_EQ(one, build_all(g, 2, f, 1));
}

TEST(BuildAll, NoFalseNegatives) {
  for (const auto& g : {gen_erdos_renyi(400, 0.02, 1), gen_barabasi_albert(400, 3, 2), star_graph(50)}) {
    for (unsigned k : {1u, 2u}) {
      const auto f = hash_family::avalanche(k * 13, 256);
      const auto sigs = build_all(g, k, f, 2);
      for (node_id u = 0; u < g.node_count(); ++u)
        for (node_id w : k_hop_neighborhood(g, u, k)) ASSERT_TRUE(sigs[u].test(hash_node(f, w)));
    }
  }
}

TEST(BuildAll, IdentityRangeTooSmall) {
  EXPECT_EQ(code_of([] { (void)build_all(path_graph(10), 1, hash_family::identity(5), 1); }),
            errc::identity_range_exceeded);
}

TEST(InsertNeighbor, Cases) {
  const auto f = hash_family::avalanche(4, 512);
  const auto zero = build_signature({}, f);
  EXPECT_EQ(insert_neighbor(zero, 9, f).popcount(), 1u);

  const node_set ab{3, 17};
  const auto s = build_signature(ab, f);
  EXPECT_EQ(insert_neighbor(s, 17, f), s);
  EXPECT_EQ(insert_neighbor(s, 40, f), build_signature(node_set{3, 17, 40}, f));

  EXPECT_EQ(code_of([&] { (void)insert_neighbor(s, 1, hash_family::avalanche(5, 512)); }), errc::fingerprint_mismatch);
}

TEST(InsertNeighbor, OrderFree) {
  const auto f = hash_family::avalanche(4, 128);
  std::vector<node_id> ids{5, 9, 77, 1000, 3, 41};
  auto base = build_signature({}, f);
  auto ref = base;
  for (node_id w : ids) ref = insert_neighbor(ref, w, f);
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 10; ++rep) {
    std::shuffle(ids.begin(), ids.end(), rng);
    auto s = base;
    for (node_id w : ids) s = insert_neighbor(s, w, f);
    EXPECT_EQ(s, ref);
  }
  EXPECT_EQ(ref, build_signature(ids, f));
}

TEST(Cardinality, Values) {
  EXPECT_EQ(estimate_cardinality(first_bits(1024, 0)), 0.0);
  EXPECT_NEAR(estimate_cardinality(first_bits(1024, 100)), 105.1745793390821147862962722055217870685, 1e-10);
  EXPECT_GT(estimate_cardinality(first_bits(1024, 1)), 0.0);
}

TEST(Cardinality, Saturation) {
  const auto full = first_bits(64, 64);
  EXPECT_EQ(code_of([&] { (void)estimate_cardinality(full); }), errc::saturated_signature);
  EXPECT_DOUBLE_EQ(estimate_cardinality(full, {.clamp_saturated = true}), estimate_cardinality(first_bits(64, 63)));
}

TEST(InnerProduct, Cases) {
  const auto f = hash_family::avalanche(1, 256);
  const node_set a{1, 2, 3, 400, 500};
  const auto sa = build_signature(a, f);
  EXPECT_EQ(inner_product(sa, build_signature({}, f)), 0u);
  EXPECT_EQ(inner_product(sa, sa), sa.popcount());
  EXPECT_EQ(code_of([&] { (void)inner_product(sa, build_signature(a, hash_family::avalanche(2, 256))); }),
            errc::fingerprint_mismatch);
}

TEST(InnerProduct, ExactUnderIdentity) {
  std::mt19937_64 rng(7);
  const auto f = hash_family::identity(500);
  for (int rep = 0; rep < 100; ++rep) {
    const auto a = random_set(rng, 1 + rng() % 60, 500);
    const auto b = random_set(rng, 1 + rng() % 60, 500);
    EXPECT_EQ(inner_product(build_signature(a, f), build_signature(b, f)), intersection_size(a, b));
  }
}

TEST(Intersection, Values) {
  const auto f = hash_family::avalanche(1, 64);
  EXPECT_EQ(estimate_intersection(build_signature({}, f), build_signature({}, f)), 0.0);

  // popcounts 10 and 8, inner product 3.
  const auto a = first_bits(64, 10);
  const auto b = first_bits(64, 8, 7);
  ASSERT_EQ(inner_product(a, b), 3u);
  EXPECT_NEAR(estimate_cardinality(a), 10.78836586820604707065, 1e-12);
  EXPECT_NEAR(estimate_cardinality(b), 8.479068190711753939519, 1e-12);
  EXPECT_NEAR(estimate_intersection(a, b), 2.309297677494293131131, 1e-10);
  EXPECT_EQ(estimate_intersection(a, b), estimate_intersection(b, a));
}

TEST(Intersection, NonPositiveLogArgumentGivesMin) {
  // Both signatures nearly full and disjoint-ish: log argument <= 0.
  const auto a = first_bits(64, 40);
  const auto b = first_bits(64, 40, 24);
  ASSERT_EQ(inner_product(a, b), 16u);
  EXPECT_EQ(estimate_intersection(a, b), std::min(estimate_cardinality(a), estimate_cardinality(b)));
}

TEST(Intersection, ClampedToFeasibleRange) {
  std::mt19937_64 rng(9);
  const auto f = hash_family::avalanche(12, 128);
  for (int rep = 0; rep < 500; ++rep) {
    const auto sa = build_signature(random_set(rng, 1 + rng() % 80, 5000), f);
    const auto sb = build_signature(random_set(rng, 1 + rng() % 80, 5000), f);
    const double s = estimate_intersection(sa, sb);
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, std::min(estimate_cardinality(sa), estimate_cardinality(sb)));
    EXPECT_EQ(s, estimate_intersection(sb, sa));
    EXPECT_EQ(estimate_cosine(sa, sb), estimate_cosine(sb, sa));
  }
}

TEST(Intersection, Saturation) {
  const auto full = first_bits(64, 64);
  const auto some = first_bits(64, 5);
  EXPECT_EQ(code_of([&] { (void)estimate_intersection(full, some); }), errc::saturated_signature);
  EXPECT_NO_THROW((void)estimate_intersection(full, some, {.clamp_saturated = true}));
}

TEST(Intersection, WithinTheorem1BoundOnEr) {
  const auto g = gen_erdos_renyi(1000, 0.01, 10);
  const auto f = hash_family::avalanche(3, 8192);
  const auto sigs = build_all(g, 1, f, 1);
  std::mt19937_64 rng(4);
  double total = 0.0;
  std::uint64_t max_card = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto u = static_cast<node_id>(rng() % 1000);
    auto v = static_cast<node_id>(rng() % 1000);
    if (u == v) v = (v + 1) % 1000;
    const auto exact = intersection_size(g.neighbors(u), g.neighbors(v));
    total += std::abs(estimate_intersection(sigs[u], sigs[v]) - static_cast<double>(exact));
    max_card = std::max<std::uint64_t>({max_card, g.degree(u), g.degree(v)});
  }
  EXPECT_LT(total / 1000.0, 0.1 * theorem1_bound(max_card, 0.05));
}

TEST(Intersection, IdentityFamilyWithinTheorem1Bound) {
  const auto g = gen_erdos_renyi(100, 0.08, 5);
  const auto sigs = build_all(g, 1, hash_family::identity(100), 1);
  for (node_id u = 0; u < 100; ++u)
    for (node_id v = u + 1; v < 100; ++v) {
      const auto exact = static_cast<double>(intersection_size(g.neighbors(u), g.neighbors(v)));
      const auto m = std::max(g.degree(u), g.degree(v));
      EXPECT_LE(std::abs(estimate_intersection(sigs[u], sigs[v]) - exact), theorem1_bound(m, 0.05));
    }
}

TEST(CosineContainment, Cases) {
  const auto f = hash_family::avalanche(1, 256);
  const auto empty = build_signature({}, f);
  const node_set a{4, 8, 15, 16, 23, 42};
  const auto sa = build_signature(a, f);
  EXPECT_EQ(estimate_cosine(empty, sa), 0.0);
  EXPECT_EQ(estimate_containment(empty, sa), 0.0);
  EXPECT_EQ(estimate_cosine(sa, empty), 0.0);
  EXPECT_DOUBLE_EQ(estimate_cosine(sa, sa), 1.0);
  EXPECT_DOUBLE_EQ(estimate_containment(sa, sa), 1.0);
}

TEST(CosineContainment, K3AdjacentPair) {
  // Needs n >> N: with n = N = 3 the collision correction moves the estimate
  // far from the exact 1/2.
  const auto g = complete_graph(3);
  const auto f = hash_family::identity(std::uint64_t{1} << 24);
  const auto sigs = build_all(g, 1, f, 1);
  EXPECT_NEAR(estimate_cosine(sigs[0], sigs[1]), 0.5, 1e-6);
  EXPECT_NEAR(estimate_containment(sigs[0], sigs[1]), 0.5, 1e-6);
}

TEST(CosineContainment, ContainmentIsAsymmetric) {
  const auto f = hash_family::identity(1u << 16);
  const node_set small{1, 2};
  const node_set big{1, 2, 3, 4, 5, 6, 7, 8};
  const auto ss = build_signature(small, f);
  const auto sb = build_signature(big, f);
  EXPECT_NEAR(estimate_containment(ss, sb), 1.0, 1e-3);
  EXPECT_NEAR(estimate_containment(sb, ss), 0.25, 1e-3);
}

TEST(Bounds, Lemma1) {
  EXPECT_EQ(lemma1_bound(0, 0.05), 0.0);
  EXPECT_NEAR(lemma1_bound(100, 0.05), 38.41291165279683040680, 1e-10);
  EXPECT_EQ(lemma1_bound(100, 2.0), 0.0);
}

TEST(Bounds, Theorem1) {
  EXPECT_EQ(theorem1_bound(0, 0.05), 0.0);
  EXPECT_NEAR(theorem1_bound(100, 0.05), 250.1342122036867297887, 1e-9);
  EXPECT_NEAR(theorem1_bound(1, 0.05), 25.01342122036867297887, 1e-10);
}

TEST(Bounds, Lemma4) {
  EXPECT_EQ(lemma4_bound(0, 0.05), 0.0);
  EXPECT_NEAR(lemma4_bound(50, 0.05), 19.20645582639841520340, 1e-10);
  EXPECT_NEAR(lemma4_bound(50, 0.5), 11.77410022515474691011, 1e-10);
}

TEST(ExpectedInnerProduct, MatchesMonteCarlo) {
  // |A| = 30, |B| = 20, |A ∩ B| = 10, n = 64.
  node_set a, b;
  for (node_id i = 0; i < 30; ++i) a.push_back(i);
  for (node_id i = 20; i < 40; ++i) b.push_back(i);
  double total = 0.0;
  const int trials = 20000;
  for (int t = 0; t < trials; ++t) {
    const auto f = hash_family::avalanche(static_cast<std::uint64_t>(t), 64);
    total += static_cast<double>(inner_product(build_signature(a, f), build_signature(b, f)));
  }
  EXPECT_NEAR(total / trials, expected_inner_product(30, 20, 10, 64), 0.06);
}

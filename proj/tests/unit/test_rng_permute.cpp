#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "shuffleval/errors.hpp"
#include "shuffleval/permute.hpp"
#include "shuffleval/rng.hpp"

using namespace shuffleval;

TEST(Rng, UniformIndexStaysInRange) {
  Rng rng(7);
  for (std::uint64_t bound : {1ull, 2ull, 3ull, 7ull, 1000ull, (1ull << 40) + 3}) {
    for (int i = 0; i < 2000; ++i) EXPECT_LT(uniform_index(rng, bound), bound);
  }
}

TEST(Rng, Uniform01IsHalfOpen) {
  Rng rng(3);
  double sum = 0;
  for (int i = 0; i < 100000; ++i) {
    const double u = uniform01(rng);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000, 0.5, 0.005);
}

TEST(Rng, StandardNormalMoments) {
  Rng rng(11);
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = standard_normal(rng);
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

TEST(Rng, DeriveSeedIsDeterministicAndSpreads) {
  EXPECT_EQ(derive_seed(42, 0), derive_seed(42, 0));
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(42, i));
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_NE(derive_seed(1, 5), derive_seed(2, 5));
}

TEST(Rng, Fnv1aKnownVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cull);
}

TEST(Permutation, RejectsIdentityAndNonBijections) {
  EXPECT_THROW(SegmentPermutation({0, 1, 2}), ArgumentError);
  EXPECT_THROW(SegmentPermutation({0, 0, 1}), ArgumentError);
  EXPECT_THROW(SegmentPermutation({0, 3, 1}), ArgumentError);
  EXPECT_THROW(SegmentPermutation({0}), ArgumentError);
  EXPECT_NO_THROW(SegmentPermutation({1, 0}));
}

TEST(Enumerate, KTwoHasOnePermutation) {
  const auto perms = enumerate_nonidentity(2);
  ASSERT_EQ(perms.size(), 1u);
  EXPECT_EQ(perms[0].mapping(), (std::vector<std::size_t>{1, 0}));
}

TEST(Enumerate, KThreeMatchesBruteForce) {
  const auto perms = enumerate_nonidentity(3);
  std::set<std::vector<std::size_t>> expected;
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b)
      for (std::size_t c = 0; c < 3; ++c)
        if (a != b && b != c && a != c && !(a == 0 && b == 1 && c == 2)) expected.insert({a, b, c});
  std::set<std::vector<std::size_t>> got;
  for (const auto& p : perms) got.insert(p.mapping());
  EXPECT_EQ(perms.size(), 5u);
  EXPECT_EQ(got, expected);
}

TEST(Enumerate, CountsAndOrderUpToCeiling) {
  std::size_t fact = 1;
  for (std::size_t k = 2; k <= kEnumerationCeiling; ++k) {
    fact *= k;
    const auto perms = enumerate_nonidentity(k);
    EXPECT_EQ(perms.size(), fact - 1) << k;
    EXPECT_TRUE(std::is_sorted(perms.begin(), perms.end()));
    EXPECT_EQ(std::set<SegmentPermutation>(perms.begin(), perms.end()).size(), perms.size());
  }
}

TEST(Enumerate, Boundaries) {
  EXPECT_THROW(enumerate_nonidentity(1), ArgumentError);
  EXPECT_THROW(enumerate_nonidentity(0), ArgumentError);
  EXPECT_THROW(enumerate_nonidentity(kEnumerationCeiling + 1), CapacityError);
}

TEST(Sample, ReproducibleAndNonIdentity) {
  const auto a = sample_nonidentity(6, 10, 1234);
  const auto b = sample_nonidentity(6, 10, 1234);
  ASSERT_EQ(a.size(), 10u);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, sample_nonidentity(6, 10, 1235));
  for (const auto& p : a) EXPECT_EQ(p.k(), 6u);
}

TEST(Sample, KTwoRepeatsTheSwap) {
  const auto perms = sample_nonidentity(2, 5, 9);
  ASSERT_EQ(perms.size(), 5u);
  for (const auto& p : perms) EXPECT_EQ(p.mapping(), (std::vector<std::size_t>{1, 0}));
}

TEST(Sample, RejectsSmallK) { EXPECT_THROW(sample_nonidentity(1, 3, 0), ArgumentError); }

TEST(Sample, UniformOverS3MinusIdentity) {
  const std::size_t n = 100000;
  std::map<std::vector<std::size_t>, std::size_t> counts;
  for (const auto& p : sample_nonidentity(3, n, 2024)) ++counts[p.mapping()];
  ASSERT_EQ(counts.size(), 5u);
  const double p = 0.2;
  const double sigma = std::sqrt(n * p * (1 - p));
  double chi2 = 0;
  for (const auto& [perm, c] : counts) {
    EXPECT_LE(std::abs(static_cast<double>(c) - n * p), 3 * sigma);
    chi2 += std::pow(static_cast<double>(c) - n * p, 2) / (n * p);
  }
  // 4 degrees of freedom, 99.9th percentile.
  EXPECT_LT(chi2, 18.47);
}

TEST(Sample, LargeKWorks) {
  const auto perms = sample_nonidentity(40, 3, 5);
  for (const auto& p : perms) {
    std::vector<std::size_t> sorted = p.mapping();
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) EXPECT_EQ(sorted[i], i);
  }
}

TEST(Apply, SwapAndHandTrace) {
  EXPECT_EQ(apply_permutation(SegmentPermutation({1, 0}), std::vector<std::string>{"a", "b"}),
            (std::vector<std::string>{"b", "a"}));
  EXPECT_EQ(apply_permutation(SegmentPermutation({2, 0, 1}), std::vector<std::string>{"x", "y", "z"}),
            (std::vector<std::string>{"z", "x", "y"}));
}

TEST(Apply, LengthMismatch) {
  EXPECT_THROW(apply_permutation(SegmentPermutation({1, 0}), std::vector<int>{1, 2, 3}), ArgumentError);
}

TEST(Apply, InverseRoundTripProperty) {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 2 + uniform_index(rng, 12);
    const auto p = sample_nonidentity(k, 1, derive_seed(99, trial))[0];
    std::vector<int> s(k);
    for (auto& v : s) v = static_cast<int>(uniform_index(rng, 1000));
    EXPECT_EQ(apply_permutation(p, apply_permutation(p.inverse(), s)), s);
    EXPECT_EQ(apply_permutation(p.inverse(), apply_permutation(p, s)), s);
    auto sorted_in = s, sorted_out = apply_permutation(p, s);
    std::sort(sorted_in.begin(), sorted_in.end());
    std::sort(sorted_out.begin(), sorted_out.end());
    EXPECT_EQ(sorted_in, sorted_out);
  }
}

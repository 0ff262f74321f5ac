#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "invariant_checks.hpp"
#include "qcpt/errors.hpp"
#include "qcpt/estimation.hpp"
#include "qcpt/rdm.hpp"

using namespace qcpt;

TEST(Rdm, RankUnrankRoundTrip) {
  for (int k = 1; k <= 4; ++k) {
    const size_t m = RdmSet::binomial(9, k);
    for (size_t r = 0; r < m; ++r) {
      const auto t = RdmSet::unrank(k, r);
      ASSERT_EQ(static_cast<int>(t.size()), k);
      for (int i = 1; i < k; ++i) ASSERT_LT(t[i - 1], t[i]);
      ASSERT_EQ(RdmSet::rank(t), r);
    }
  }
  EXPECT_EQ(RdmSet::binomial(8, 4), 70u);
  EXPECT_EQ(RdmSet::binomial(3, 5), 0u);
}

TEST(Rdm, AntisymmetricLookup) {
  std::mt19937_64 rng(2);
  const RdmSet r = exact_rdms_from_state(checks::random_number_state(6, 3, rng), 3);
  const std::vector<int> c = {0, 2, 5}, a = {1, 3, 4};
  const double v = r.get(c, a);
  EXPECT_DOUBLE_EQ(r.get(std::vector<int>{2, 0, 5}, a), -v);
  EXPECT_DOUBLE_EQ(r.get(std::vector<int>{2, 5, 0}, std::vector<int>{3, 1, 4}), -v);
  EXPECT_DOUBLE_EQ(r.get(std::vector<int>{0, 0, 5}, a), 0.0);
  EXPECT_THROW(r.get(std::vector<int>{0, 1, 2, 3}, std::vector<int>{0, 1, 2, 3}), RankError);
  EXPECT_THROW(r.get(std::vector<int>{0}, std::vector<int>{0, 1}), RankError);
  EXPECT_THROW(r.get(std::vector<int>{6}, std::vector<int>{0}), InputError);
  EXPECT_THROW(RdmSet(4, 5, false), RankError);
}

TEST(Rdm, SpinTraceContractsToLowerOrder) {
  std::mt19937_64 rng(3);
  const RdmSet r = exact_rdms_from_state(checks::random_number_state(8, 4, rng), 2);
  const SpinFreeRdms sf = spin_trace(r, 2);
  double tr = 0.0;
  for (int p = 0; p < 4; ++p) tr += sf.d1(p, p);
  EXPECT_NEAR(tr, 4.0, 1e-12);
  // sum_r G2[p q r r] = (N - 1) G1[p q]
  for (int p = 0; p < 4; ++p)
    for (int q = 0; q < 4; ++q) {
      double s = 0.0;
      for (int x = 0; x < 4; ++x) s += sf.d2(p, q, x, x);
      EXPECT_NEAR(s, 3.0 * sf.d1(p, q), 1e-12);
    }
}

TEST(Rdm, FileRoundTrip) {
  std::mt19937_64 rng(4);
  const RdmSet r = exact_rdms_from_state(checks::random_number_state(6, 2, rng), 4);
  const auto prefix = std::filesystem::temp_directory_path() / "qcpt_rdm_roundtrip";
  write_rdms(prefix, r);
  const RdmSet b = read_rdms(prefix);
  ASSERT_EQ(b.max_order(), 4);
  EXPECT_EQ(b.n_spin_orbitals(), 6);
  for (int k = 1; k <= 4; ++k) {
    EXPECT_EQ(b.values(k), r.values(k));
    EXPECT_EQ(b.errors(k), r.errors(k));
  }
  EXPECT_THROW(read_rdms(prefix.string() + "_missing"), IoError);
}

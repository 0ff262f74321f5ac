#include <gtest/gtest.h>

#include <random>

#include "invariant_checks.hpp"
#include "qcpt/errors.hpp"
#include "qcpt/povm.hpp"

using namespace qcpt;

TEST(Povm, ClassNamesAndCounts) {
  EXPECT_EQ(parameter_count(PovmClass::FourP), 4);
  EXPECT_EQ(parameter_count(PovmClass::EightP), 8);
  EXPECT_EQ(parse_povm_class("4p"), PovmClass::FourP);
  EXPECT_EQ(parse_povm_class("8p"), PovmClass::EightP);
  EXPECT_EQ(to_string(PovmClass::EightP), "8p");
  EXPECT_THROW(parse_povm_class("6p"), ConfigError);
}

TEST(Povm, DualsAreBiorthogonalAndReconstructPaulis) {
  std::mt19937_64 rng(8);
  for (PovmClass cls : {PovmClass::FourP, PovmClass::EightP}) {
    for (int t = 0; t < 20; ++t) {
      const auto p = checks::random_params(cls, rng);
      const Effects e = cls == PovmClass::FourP ? effects_4p(p) : effects_8p(p);
      QubitDual d;
      try {
        d = single_qubit_dual(e);
      } catch (const NotInformationallyComplete&) {
        continue;  // random 8P angles can land near a degenerate point
      }
      for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n)
          EXPECT_NEAR(std::abs((d.duals[m] * e[n]).trace() - (m == n ? 1.0 : 0.0)), 0.0, 1e-9);
      // sum_m omega[m][P] prob[m][Q] = delta_PQ
      for (int P = 0; P < 4; ++P)
        for (int Q = 0; Q < 4; ++Q) {
          double s = 0.0;
          for (int m = 0; m < 4; ++m) s += d.omega[m][P] * d.prob[m][Q];
          EXPECT_NEAR(s, P == Q ? 1.0 : 0.0, 1e-9);
        }
    }
  }
}

TEST(Povm, SymmetricFrameIsWellConditioned) {
  for (PovmClass cls : {PovmClass::FourP, PovmClass::EightP}) {
    const auto duals = dual_frame(ProductPovm::symmetric(cls, 2));
    ASSERT_EQ(duals.size(), 2u);
    // F = (1 + 2 delta)/12 for the SIC; condition number 3.
    EXPECT_NEAR(duals[0].frame_condition, 3.0, 1e-9);
    // omega for Z on the SIC is 3 a_z = +-sqrt(3)
    EXPECT_NEAR(std::abs(duals[0].omega[0][3]), std::sqrt(3.0), 1e-9);
  }
}

TEST(Povm, IdsTrackParameters) {
  const ProductPovm a = ProductPovm::symmetric(PovmClass::FourP, 3);
  const ProductPovm b = ProductPovm::symmetric(PovmClass::FourP, 3);
  EXPECT_EQ(a.id(), b.id());
  auto p = a.all_params();
  p[1][0] += 1e-9;
  EXPECT_NE(ProductPovm(PovmClass::FourP, p).id(), a.id());
  EXPECT_NE(ProductPovm::symmetric(PovmClass::EightP, 3).id(), a.id());
}

TEST(Povm, StretchedTetrahedronApproachesProjector) {
  const Effects e = effects_4p(std::vector<double>{0.0, 0.0, 0.0, 0.95});
  EXPECT_TRUE(is_valid_povm(e));
  const QubitDual d = single_qubit_dual(e);
  EXPECT_GT(d.frame_condition, dual_frame(ProductPovm::symmetric(PovmClass::FourP, 1))[0].frame_condition);
}

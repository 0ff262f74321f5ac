#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <tuple>

#include "qcpt/errors.hpp"
#include "qcpt/fois_oracle.hpp"
#include "support.hpp"

using namespace qcpt;

TEST(FoisOracle, ProjectionsPartitionHPhi) {
  for (auto [name, core, act] : {std::tuple{"h4_r1.00_sto3g", 1, 2}, std::tuple{"h6_r1.00_sto3g", 1, 4},
                                 std::tuple{"lih_r1.60_sto3g", 1, 2}}) {
    const auto c = qcpt::testing::nevpt2_case(name, core, act);
    const OracleReport r = qcpt::testing::oracle(c);
    double s = r.reference_norm2;
    for (const auto& l : r.labels) s += l.norm;
    EXPECT_NEAR(s, r.hphi_norm2, 1e-10 * r.hphi_norm2) << name;
    // phi is a CASCI eigenvector, so its in-space image is E0 phi.
    EXPECT_NEAR(r.e0, c.casci.energy, 1e-10) << name;
    EXPECT_NEAR(r.reference_norm2, r.e0 * r.e0, 1e-8) << name;
    for (const auto& l : r.labels) {
      EXPECT_LE(l.holes.size(), 2u);
      EXPECT_LE(l.particles.size(), 2u);
      EXPECT_EQ(l.cls, class_from_counts(static_cast<int>(l.holes.size()), static_cast<int>(l.particles.size())));
      EXPECT_GT(l.energy, r.e0);  // perturbers lie above the reference
      EXPECT_LT(l.contribution, 0.0);
    }
  }
}

TEST(FoisOracle, EmbeddingKeepsNormAndFillsCore) {
  const auto c = qcpt::testing::nevpt2_case("h6_r1.00_sto3g", 2, 2);
  const DetVector phi = embed_reference(c.casci.ci, c.sys.part);
  double n2 = 0.0;
  for (const auto& [d, v] : phi) {
    n2 += v * v;
    EXPECT_EQ(d & 0xF, 0xFu);  // both core orbitals doubly occupied
    EXPECT_EQ(std::popcount(d), c.sys.ints.n_electrons);
  }
  EXPECT_NEAR(n2, 1.0, 1e-12);
}

TEST(FoisOracle, FullActiveSpaceHasNoPerturbers) {
  const auto c = qcpt::testing::nevpt2_case("h2_r0.74_sto3g", 0, 2);
  const OracleReport r = qcpt::testing::oracle(c);
  EXPECT_TRUE(r.labels.empty());
  EXPECT_EQ(r.e2, 0.0);
  EXPECT_NEAR(r.e0, -1.1372838344885023, 1e-9);
}

TEST(FoisOracle, InvariantUnderOrbitalSignFlips) {
  const auto c = qcpt::testing::nevpt2_case("h6_r1.00_sto3g", 1, 4);
  const double e2 = qcpt::testing::oracle(c).e2;
  // Flip the sign of one core and one virtual orbital; the determinant signs change, E2 does not.
  Eigen::MatrixXd u = Eigen::MatrixXd::Identity(c.sys.ints.norb, c.sys.ints.norb);
  u(c.sys.part.core[0], c.sys.part.core[0]) = -1.0;
  u(c.sys.part.virt[0], c.sys.part.virt[0]) = -1.0;
  const IntegralSet flipped = rotate_integrals(c.semi.integrals, u);
  EXPECT_NEAR(oracle_nevpt2(flipped, c.sys.part, c.casci.ci, c.semi.energies).e2, e2, 1e-12);
}

TEST(FoisOracle, RejectsNonSemicanonicalInput) {
  const auto c = qcpt::testing::nevpt2_case("h6_r1.00_sto3g", 2, 2);
  // Mixing the two core orbitals breaks the diagonal core Fock block.
  Eigen::MatrixXd u = Eigen::MatrixXd::Identity(c.sys.ints.norb, c.sys.ints.norb);
  const double a = 0.4;
  u(0, 0) = std::cos(a), u(0, 1) = -std::sin(a), u(1, 0) = std::sin(a), u(1, 1) = std::cos(a);
  const IntegralSet mixed = rotate_integrals(c.semi.integrals, u);
  EXPECT_THROW(oracle_nevpt2(mixed, c.sys.part, c.casci.ci, c.semi.energies), ConsistencyError);
  CIVector bad = c.casci.ci;
  bad.coeffs *= 2.0;
  EXPECT_THROW(oracle_nevpt2(c.semi.integrals, c.sys.part, bad, c.semi.energies), InputError);
}

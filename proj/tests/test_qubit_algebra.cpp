#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "qcpt/determinants.hpp"
#include "qcpt/errors.hpp"
#include "qcpt/qubit_algebra.hpp"
#include "support.hpp"

using namespace qcpt;

TEST(PauliString, ParseAndText) {
  const PauliString p = PauliString::parse("XIZY");
  EXPECT_EQ(p.at(0), Pauli::X);
  EXPECT_EQ(p.at(1), Pauli::I);
  EXPECT_EQ(p.at(2), Pauli::Z);
  EXPECT_EQ(p.at(3), Pauli::Y);
  EXPECT_EQ(p.text(4), "XIZY");
  EXPECT_EQ(p.weight(), 3);
  EXPECT_THROW(PauliString::parse("XQ"), InputError);
}

TEST(PauliString, SingleQubitMultiplicationTable) {
  const char* l = "IXYZ";
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const auto r = multiply(PauliString::parse(std::string(1, l[a])), PauliString::parse(std::string(1, l[b])));
      const Eigen::Matrix2cd want = pauli_matrix(Pauli(a)) * pauli_matrix(Pauli(b));
      const Eigen::Matrix2cd got = r.phase * pauli_matrix(r.result.at(0));
      EXPECT_LT((want - got).norm(), 1e-15) << l[a] << l[b];
    }
  EXPECT_TRUE(commutes(PauliString::parse("XX"), PauliString::parse("YY")));
  EXPECT_FALSE(commutes(PauliString::parse("XI"), PauliString::parse("ZI")));
}

TEST(QubitOperator, ProductMatchesDenseMatrices) {
  QubitOperator a(3), b(3);
  a.add(PauliString::parse("XYZ"), {0.3, 0.1});
  a.add(PauliString::parse("IZI"), -0.7);
  b.add(PauliString::parse("YYI"), 0.5);
  b.add(PauliString::parse("ZIX"), {0.0, 0.2});
  const Eigen::MatrixXcd want = to_dense(a) * to_dense(b);
  EXPECT_LT((to_dense(operator_product(a, b)) - want).norm(), 1e-14);
  EXPECT_LT((to_dense(commutator(a, b)) - (want - to_dense(b) * to_dense(a))).norm(), 1e-14);
  EXPECT_LT((to_dense(a.adjoint()) - to_dense(a).adjoint()).norm(), 1e-15);
  EXPECT_THROW(a += QubitOperator(2), MappingError);
}

TEST(JordanWigner, LadderOperatorsOnBasisStates) {
  // a+_1 on |q0=1, q1=0> picks up the Z string from qubit 0.
  const Eigen::MatrixXcd ad = to_dense(jordan_wigner({{1, true}}, 2));
  EXPECT_NEAR(ad(0b11, 0b01).real(), -1.0, 1e-15);
  EXPECT_NEAR(ad(0b10, 0b00).real(), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(ad(0b01, 0b00)), 0.0, 1e-15);
  EXPECT_THROW(jordan_wigner({{2, true}}, 2), MappingError);
}

TEST(JordanWigner, LocalFactorisationAgreesWithExpansion) {
  const FermionString s = {{3, true}, {0, true}, {2, false}, {1, false}};
  const LocalOperator loc = jordan_wigner_local(s, 4);
  EXPECT_LT((to_dense(expand_local(loc)) - to_dense(jordan_wigner(s, 4))).norm(), 1e-14);
}

TEST(QubitHamiltonian, SpectrumMatchesCasci) {
  for (auto [name, core, act] : {std::tuple{"h2_r0.74_sto3g", 0, 2}, std::tuple{"h4_r1.00_sto3g", 1, 2},
                                 std::tuple{"lih_r1.60_sto3g", 0, 4}}) {
    const auto s = qcpt::testing::load(name, core, act);
    const QubitOperator h = qubit_hamiltonian(s.h);
    EXPECT_LT(h.hermiticity_defect(), 1e-14);
    const Eigen::MatrixXcd m = to_dense(h);
    // Restrict to the right particle number and S_z before taking the lowest eigenvalue.
    std::vector<int> sector;
    for (int i = 0; i < m.rows(); ++i) {
      int na = 0, nb = 0;
      for (int q = 0; q < 2 * act; ++q)
        if ((i >> q) & 1) (q % 2 ? nb : na)++;
      if (na + nb == s.h.n_electrons && na - nb == s.h.ms2) sector.push_back(i);
    }
    Eigen::MatrixXcd sub(sector.size(), sector.size());
    for (size_t i = 0; i < sector.size(); ++i)
      for (size_t j = 0; j < sector.size(); ++j) sub(i, j) = m(sector[i], sector[j]);
    const double e = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(sub).eigenvalues()(0);
    EXPECT_NEAR(e, casci_solve(s.h).energy, 1e-10) << name;
  }
}

TEST(QubitHamiltonian, ConservesParticleNumber) {
  const auto s = qcpt::testing::load("h4_r1.00_sto3g", 0, 4);
  const QubitOperator h = qubit_hamiltonian(s.h);
  QubitOperator n(8);
  for (int q = 0; q < 8; ++q) n += jordan_wigner({{q, true}, {q, false}}, 8);
  QubitOperator c = commutator(h, n);
  c.prune(1e-12);
  EXPECT_EQ(c.size(), 0u);
}

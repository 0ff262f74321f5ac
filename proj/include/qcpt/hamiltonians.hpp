#pragma once

#include <Eigen/Dense>

#include "qcpt/integrals.hpp"
#include "qcpt/rdm.hpp"

namespace qcpt {

// Active-space Hamiltonian with the closed core folded in:
//   H = e_const + sum h_eff[t,u] E_tu + 1/2 sum (tu|vw) (E_tu E_vw - delta_uv E_tw)
struct ActiveHamiltonian {
  double e_const = 0.0;
  Eigen::MatrixXd h_eff;
  Tensor4 g;
  int n_electrons = 0;
  int ms2 = 0;

  int n_active() const { return static_cast<int>(h_eff.rows()); }
};

struct OrbitalEnergies {
  Eigen::VectorXd core;
  Eigen::VectorXd active;  // diagonal of the active Fock block, informational
  Eigen::VectorXd virt;
};

struct SemicanonicalResult {
  IntegralSet integrals;       // rotated
  Eigen::MatrixXd rotation;    // columns are new orbitals in the old basis
  Eigen::MatrixXd fock;        // rotated generalised Fock matrix
  OrbitalEnergies energies;
};

ActiveHamiltonian fold_core(const IntegralSet& ints, const SpacePartition& part);

// Generalised Fock matrix over all orbitals from the spin-free active 1-RDM.
// The trace of dm1 must match the active electron count to within tol.
Eigen::MatrixXd build_fock(const IntegralSet& ints, const SpacePartition& part,
                           const Eigen::MatrixXd& dm1_active, double tol = 1e-6);

// Diagonalises the core-core and virtual-virtual Fock blocks (ascending
// orbital energies) and rotates the integrals accordingly. The active block
// is left in its original basis so densities measured there stay valid; the
// active Hamiltonian enters in full, so nothing downstream depends on it.
SemicanonicalResult semicanonicalize(const Eigen::MatrixXd& fock, const IntegralSet& ints,
                                     const SpacePartition& part);

double dyall_expectation(const ActiveHamiltonian& h, const SpinFreeRdms& rdms);

// Spin-free active 1-RDM as a matrix.
Eigen::MatrixXd dm1_matrix(const SpinFreeRdms& rdms);

// Full four-index transform of the integrals by an orthogonal matrix.
IntegralSet rotate_integrals(const IntegralSet& ints, const Eigen::MatrixXd& u);

}  // namespace qcpt

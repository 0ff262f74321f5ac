#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "qcpt/hamiltonians.hpp"
#include "qcpt/rdm.hpp"
#include "qcpt/statevector.hpp"

namespace qcpt {

// Bit 2p+s set when spatial orbital p holds an electron of spin s.
using Determinant = uint64_t;
using DetVector = std::unordered_map<Determinant, double>;

struct DeterminantBasis {
  int n_orbitals = 0;
  int n_alpha = 0;
  int n_beta = 0;
  std::vector<Determinant> dets;
  std::unordered_map<Determinant, size_t> index;

  static DeterminantBasis build(int n_orbitals, int n_alpha, int n_beta);
  size_t size() const { return dets.size(); }
};

struct CIVector {
  DeterminantBasis basis;
  Eigen::VectorXd coeffs;
};

struct CasciResult {
  double energy = 0.0;
  CIVector ci;
};

inline constexpr size_t kMaxDenseCiDimension = 6000;

// Applies a string (rightmost operator first) to a determinant. Returns the sign, or 0
// when the result vanishes.
int apply_string(Determinant& det, std::span<const int> indices, std::span<const bool> dagger);

CasciResult casci_solve(const ActiveHamiltonian& h);

// Amplitudes on the 2*n_orbitals-qubit register; qubit q is spin orbital q.
StateVector ci_to_state(const CIVector& ci);

RdmSet oracle_rdms(const CIVector& ci, int max_order);

}  // namespace qcpt

#pragma once

#include <algorithm>
#include <random>
#include <string>

#include "qcpt/determinants.hpp"
#include "qcpt/fois_oracle.hpp"
#include "qcpt/hamiltonians.hpp"
#include "qcpt/integrals.hpp"
#include "qcpt/sc_nevpt2.hpp"
#include "qcpt/statevector.hpp"

namespace qcpt::testing {

inline std::string fixture(const std::string& name) { return std::string(QCPT_FIXTURE_DIR) + "/" + name + ".fcidump"; }

struct System {
  IntegralSet ints;
  SpacePartition part;
  ActiveHamiltonian h;
};

inline System load(const std::string& name, int core, int active) {
  System s;
  s.ints = read_fcidump(fixture(name));
  s.part = load_partition(core, active, s.ints);
  s.h = fold_core(s.ints, s.part);
  return s;
}

// CASCI reference with exact densities, semicanonical orbitals and both E2 routes.
struct Nevpt2Case {
  System sys;
  CasciResult casci;
  RdmSet rdms;
  SemicanonicalResult semi;
};

inline Nevpt2Case nevpt2_case(const std::string& name, int core, int active) {
  Nevpt2Case c;
  c.sys = load(name, core, active);
  c.casci = casci_solve(c.sys.h);
  c.rdms = oracle_rdms(c.casci.ci, std::min(4, 2 * active));
  const Eigen::MatrixXd dm1 = dm1_matrix(spin_trace(c.rdms, 2));
  c.semi = semicanonicalize(build_fock(c.sys.ints, c.sys.part, dm1), c.sys.ints, c.sys.part);
  return c;
}

inline Nevpt2Report contracted(const Nevpt2Case& c) {
  return sc_nevpt2(c.semi.integrals, c.sys.part, c.semi.energies, c.rdms);
}

inline OracleReport oracle(const Nevpt2Case& c) {
  return oracle_nevpt2(c.semi.integrals, c.sys.part, c.casci.ci, c.semi.energies);
}

// Haar-ish random normalized state.
inline StateVector random_state(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  StateVector psi(n);
  for (auto& a : psi.amplitudes()) a = cplx(g(rng), g(rng));
  psi.normalize();
  return psi;
}

}  // namespace qcpt::testing

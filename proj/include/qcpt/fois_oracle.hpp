#pragma once

#include <array>
#include <map>
#include <vector>

#include "qcpt/determinants.hpp"
#include "qcpt/hamiltonians.hpp"
#include "qcpt/integrals.hpp"
#include "qcpt/sc_nevpt2.hpp"

namespace qcpt {

// Brute-force reference for the perturbation step: perturbers are built explicitly as
// projections of H|phi> in the full determinant space, with no contraction formulas.

struct OracleLabel {
  PerturberClass cls;
  std::vector<int> holes;      // core positions
  std::vector<int> particles;  // virtual positions
  double norm = 0.0;
  double energy = 0.0;
  double contribution = 0.0;
};

struct OracleReport {
  double e0 = 0.0;
  double e2 = 0.0;
  std::array<double, 8> class_e2{};
  std::vector<OracleLabel> labels;
  double hphi_norm2 = 0.0;       // ||H phi||^2
  double reference_norm2 = 0.0;  // part of it left in the CAS space
};

using LabelKey = std::pair<std::vector<int>, std::vector<int>>;
struct ProjectedComponent {
  PerturberClass cls;
  DetVector vec;
};

// Closed core, active CI vector, empty virtuals; global spin-orbital bits.
DetVector embed_reference(const CIVector& ci, const SpacePartition& part);
DetVector apply_full_hamiltonian(const DetVector& v, const IntegralSet& ints);
// Components keyed by spatial (holes, particles); the reference-space part is returned separately.
std::map<LabelKey, ProjectedComponent> project_classes(const DetVector& hphi, const SpacePartition& part,
                                                       DetVector* reference_part = nullptr);

OracleReport oracle_nevpt2(const IntegralSet& semicanonical, const SpacePartition& part, const CIVector& ci,
                           const OrbitalEnergies& eps);

}  // namespace qcpt

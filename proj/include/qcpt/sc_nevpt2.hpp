#pragma once

#include <array>
#include <string>
#include <vector>

#include "qcpt/hamiltonians.hpp"
#include "qcpt/integrals.hpp"
#include "qcpt/rdm.hpp"

namespace qcpt {

// The eight strongly contracted subspaces: core holes i,j, virtual particles r,s and
// the change k in the active electron count.
enum class PerturberClass : int {
  IJRS = 0,  // S(ijrs, 0)
  IJR,       // S(ijr, +1)
  IRS,       // S(irs, -1)
  IJ,        // S(ij, +2)
  RS,        // S(rs, -2)
  IR,        // S(ir, 0)
  I,         // S(i, +1)
  R,         // S(r, -1)
};
inline constexpr int kPerturberClassCount = 8;
inline constexpr std::array<PerturberClass, 8> kAllPerturberClasses = {
    PerturberClass::IJRS, PerturberClass::IJR, PerturberClass::IRS, PerturberClass::IJ,
    PerturberClass::RS,   PerturberClass::IR,  PerturberClass::I,   PerturberClass::R};

std::string class_name(PerturberClass cls);
int active_electron_change(PerturberClass cls);
int required_rdm_order(PerturberClass cls);
// Class of an external pattern with the given numbers of core holes and virtual particles.
PerturberClass class_from_counts(int holes, int particles);

inline constexpr double kIntruderThreshold = 1e-4;
inline constexpr double kNormFloor = -1e-10;

struct LabelContribution {
  std::vector<int> holes;      // spatial core orbitals (positions in the partition), ascending
  std::vector<int> particles;  // spatial virtual orbitals, ascending
  double norm = 0.0;
  double energy = 0.0;        // E_l
  double contribution = 0.0;  // norm / (E0 - E_l)
};

struct ClassResult {
  PerturberClass cls = PerturberClass::IJRS;
  double e2 = 0.0;
  std::vector<LabelContribution> labels;
  int intruders = 0;        // |E0 - E_l| below the threshold
  int clamped_norms = 0;    // norms below kNormFloor, set to zero
};

struct Nevpt2Report {
  double e0 = 0.0;
  double e2 = 0.0;
  std::array<ClassResult, 8> classes;
  std::vector<std::string> warnings;
};

// Everything the contraction needs. Integrals must be semicanonical in the core and
// virtual blocks; rdms are spin-orbital over the active space (2*n_active orbitals).
struct Nevpt2Inputs {
  const IntegralSet& integrals;
  const SpacePartition& partition;
  const ActiveHamiltonian& active_h;
  const OrbitalEnergies& eps;
  const RdmSet& rdms;
  double e0;
};

ClassResult class_contribution(PerturberClass cls, const Nevpt2Inputs& in);

// Sums the eight classes; warnings collect intruders, clamped norms and a positive e2.
Nevpt2Report e2_total(const std::array<ClassResult, 8>& classes, double e0);

// Convenience: E0 from the RDMs, then all classes.
Nevpt2Report sc_nevpt2(const IntegralSet& semicanonical, const SpacePartition& part,
                       const OrbitalEnergies& eps, const RdmSet& rdms);

}  // namespace qcpt

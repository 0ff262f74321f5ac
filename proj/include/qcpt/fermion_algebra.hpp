#pragma once

#include <array>
#include <cstdint>
#include <unordered_map>

#include "qcpt/rdm.hpp"

namespace qcpt {

// Second-quantized strings over at most 32 spin orbitals, small enough to live on the stack.
struct Ladder {
  int8_t index;
  bool dagger;
};

struct OpString {
  static constexpr int kCapacity = 20;
  std::array<Ladder, kCapacity> ops{};
  int len = 0;

  void push(int index, bool dagger);
  void append(const OpString& o);
  OpString adjoint() const;
};

// A normal-ordered monomial a+_{c1}..a+_{ck} a_{a1}..a_{al} with both index lists ascending,
// packed as (creation mask << 32) | annihilation mask.
using MonoKey = uint64_t;
inline uint32_t creation_mask(MonoKey k) { return static_cast<uint32_t>(k >> 32); }
inline uint32_t annihilation_mask(MonoKey k) { return static_cast<uint32_t>(k); }

using Poly = std::unordered_map<MonoKey, double>;

OpString monomial_string(MonoKey key);

// Wick reordering by repeated a_p a+_q = delta_pq - a+_q a_p.
void normal_order(const OpString& s, double coef, Poly& out);

// <psi| normal-ordered monomial |psi> from the RDMs; 1 for the empty monomial, 0 if the
// creation and annihilation counts differ.
double monomial_expectation(MonoKey key, const RdmSet& rdms);

// <psi| s |psi> for an arbitrary string.
double expectation(const OpString& s, const RdmSet& rdms);

}  // namespace qcpt

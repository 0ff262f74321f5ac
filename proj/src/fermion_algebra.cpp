#include "qcpt/fermion_algebra.hpp"

#include <bit>

#include "qcpt/errors.hpp"

namespace qcpt {

void OpString::push(int index, bool dagger) {
  if (len >= kCapacity) throw InternalError("operator string capacity exceeded");
  if (index < 0 || index >= 32) throw InternalError("operator index outside 0..31");
  ops[len++] = {static_cast<int8_t>(index), dagger};
}

void OpString::append(const OpString& o) {
  for (int i = 0; i < o.len; ++i) push(o.ops[i].index, o.ops[i].dagger);
}

OpString OpString::adjoint() const {
  OpString r;
  for (int i = len - 1; i >= 0; --i) r.push(ops[i].index, !ops[i].dagger);
  return r;
}

OpString monomial_string(MonoKey key) {
  OpString s;
  for (uint32_t m = creation_mask(key); m; m &= m - 1) s.push(std::countr_zero(m), true);
  for (uint32_t m = annihilation_mask(key); m; m &= m - 1) s.push(std::countr_zero(m), false);
  return s;
}

namespace {

// Visits (key, coefficient) for every normal-ordered term of s.
template <class Sink>
void reorder(const OpString& s, double coef, Sink& sink) {
  for (int i = 0; i + 1 < s.len; ++i) {
    const Ladder a = s.ops[i], b = s.ops[i + 1];
    if (a.dagger == b.dagger && a.index == b.index) return;  // a a or a+ a+ on one mode
  }
  for (int i = 0; i + 1 < s.len; ++i) {
    const Ladder a = s.ops[i], b = s.ops[i + 1];
    if (a.dagger || !b.dagger) continue;
    OpString swapped = s;
    std::swap(swapped.ops[i], swapped.ops[i + 1]);
    reorder(swapped, -coef, sink);
    if (a.index == b.index) {
      OpString contracted;
      for (int j = 0; j < s.len; ++j)
        if (j != i && j != i + 1) contracted.ops[contracted.len++] = s.ops[j];
      reorder(contracted, coef, sink);
    }
    return;
  }
  // creators then annihilators; sort each block, tracking parity
  uint32_t cre = 0, ann = 0;
  int parity = 0;
  for (int i = 0; i < s.len; ++i) {
    const uint32_t bit = uint32_t{1} << s.ops[i].index;
    uint32_t& mask = s.ops[i].dagger ? cre : ann;
    if (mask & bit) return;
    parity += std::popcount(mask & ~(bit - 1));  // earlier entries with larger index
    mask |= bit;
  }
  sink((static_cast<uint64_t>(cre) << 32) | ann, (parity & 1) ? -coef : coef);
}

}  // namespace

void normal_order(const OpString& s, double coef, Poly& out) {
  auto sink = [&out](MonoKey k, double c) { out[k] += c; };
  reorder(s, coef, sink);
}

double monomial_expectation(MonoKey key, const RdmSet& rdms) {
  const uint32_t cm = creation_mask(key), am = annihilation_mask(key);
  const int k = std::popcount(cm);
  if (k != std::popcount(am)) return 0.0;
  if (k == 0) return 1.0;
  if (k > rdms.max_order()) throw RankError("expectation needs a higher-order RDM");
  std::array<int, 8> c{}, a{};
  int i = 0;
  for (uint32_t m = cm; m; m &= m - 1) c[i++] = std::countr_zero(m);
  i = 0;
  for (uint32_t m = am; m; m &= m - 1) a[i++] = std::countr_zero(m);
  const size_t slot = rdms.slot(k, RdmSet::rank({c.data(), static_cast<size_t>(k)}),
                                RdmSet::rank({a.data(), static_cast<size_t>(k)}));
  // stored element has annihilators in descending order; ours ascend
  const double rev = ((k * (k - 1) / 2) & 1) ? -1.0 : 1.0;
  return rev * rdms.values(k)[slot];
}

double expectation(const OpString& s, const RdmSet& rdms) {
  double total = 0.0;
  auto sink = [&](MonoKey key, double c) { total += c * monomial_expectation(key, rdms); };
  reorder(s, 1.0, sink);
  return total;
}

}  // namespace qcpt

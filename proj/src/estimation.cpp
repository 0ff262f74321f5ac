#include "qcpt/estimation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "qcpt/errors.hpp"
#include "qcpt/local_transform.hpp"

namespace qcpt {

ObservableEstimate pool_estimates(std::span<const ObservableEstimate> parts) {
  ObservableEstimate out;
  if (parts.empty()) return out;
  if (parts.size() == 1) return parts[0];
  double wsum = 0.0, acc = 0.0;
  for (const auto& p : parts) {
    const double w = 1.0 / std::max(p.std_error * p.std_error, 1e-30);
    wsum += w;
    acc += w * p.mean;
    out.shots += p.shots;
  }
  out.mean = acc / wsum;
  out.std_error = std::sqrt(1.0 / wsum);
  return out;
}

Histogram histogram(const MeasurementRecord& rec, size_t generation) {
  Histogram h;
  for (size_t s = 0; s < rec.shots(); ++s)
    if (rec.generation[s] == generation) ++h[rec.outcomes[s]];
  return h;
}

size_t pauli_index(const PauliString& p, int n_qubits) {
  size_t idx = 0;
  for (int q = n_qubits - 1; q >= 0; --q) idx = idx * 4 + static_cast<size_t>(p.at(q));
  return idx;
}

std::vector<double> pauli_coefficients(const QubitOperator& obs) {
  const int n = obs.n_qubits();
  if (n > kDenseMaxQubits) throw ResourceError("dense Pauli tensor limited to 12 qubits");
  std::vector<double> c(pow4(n), 0.0);
  for (const auto& [p, v] : obs.real_terms()) c[pauli_index(p, n)] += v;
  return c;
}

std::vector<double> dense_omega(const std::vector<QubitDual>& duals, const std::vector<double>& coeffs) {
  std::vector<double> w = coeffs;
  for (size_t q = 0; q < duals.size(); ++q) apply_local_map(w, static_cast<int>(q), duals[q].omega);
  return w;
}

double omega_value(const std::vector<QubitDual>& duals, const std::vector<std::pair<PauliString, double>>& terms,
                   Outcome m) {
  double total = 0.0;
  for (const auto& [p, c] : terms) {
    double v = c;
    uint64_t support = p.x | p.z;
    while (support) {
      const int q = std::countr_zero(support);
      support &= support - 1;
      v *= duals[q].omega[outcome_digit(m, q)][static_cast<int>(p.at(q))];
    }
    total += v;
  }
  return total;
}

ObservableEstimate estimate_generation(const MeasurementRecord& rec, size_t generation,
                                       const QubitOperator& obs) {
  if (generation >= rec.generations()) throw InputError("generation index out of range");
  if (obs.n_qubits() != rec.n_qubits) throw InputError("observable and record sizes differ");
  const auto duals = dual_frame(rec.povms[generation]);
  const Histogram hist = histogram(rec, generation);
  const int n = rec.n_qubits;
  const auto terms = obs.real_terms();
  size_t shots = 0;
  double s1 = 0.0, s2 = 0.0;
  const double dense_cost = static_cast<double>(pow4(std::min(n, 30))) * n;
  const double sparse_cost = static_cast<double>(hist.size()) * terms.size() * 4.0;
  if (n <= kDenseMaxQubits && dense_cost < sparse_cost) {
    const auto w = dense_omega(duals, pauli_coefficients(obs));
    for (const auto& [m, cnt] : hist) {
      s1 += cnt * w[m];
      s2 += cnt * w[m] * w[m];
      shots += cnt;
    }
  } else {
    for (const auto& [m, cnt] : hist) {
      const double w = omega_value(duals, terms, m);
      s1 += cnt * w;
      s2 += cnt * w * w;
      shots += cnt;
    }
  }
  ObservableEstimate e;
  e.shots = shots;
  if (shots == 0) return e;
  e.mean = s1 / shots;
  const double var = std::max(0.0, s2 / shots - e.mean * e.mean);
  e.std_error = std::sqrt(var / shots);
  return e;
}

ObservableEstimate estimate_observable(const MeasurementRecord& rec, const ProductPovm& povm,
                                       const QubitOperator& obs) {
  if (rec.generations() == 0) throw InputError("empty record");
  for (const auto& p : rec.povms)
    if (p.id() != povm.id()) throw IdMismatchError("record was taken with POVM " + p.id() + ", not " + povm.id());
  std::vector<ObservableEstimate> parts;
  for (size_t g = 0; g < rec.generations(); ++g) parts.push_back(estimate_generation(rec, g, obs));
  return pool_estimates(parts);
}

ObservableEstimate estimate_observable(const MeasurementRecord& rec, const QubitOperator& obs) {
  if (rec.generations() == 0) throw InputError("empty record");
  std::vector<ObservableEstimate> parts;
  for (size_t g = 0; g < rec.generations(); ++g) parts.push_back(estimate_generation(rec, g, obs));
  return pool_estimates(parts);
}

namespace {

int alpha_count(std::span<const int> idx) {
  int c = 0;
  for (int i : idx) c += (i % 2 == 0);
  return c;
}

// Visits every stored pair (rank_c >= rank_a) of order k that conserves S_z.
template <class F>
void for_each_element(int n, int k, F&& f) {
  const size_t m = RdmSet::binomial(n, k);
  std::vector<std::vector<int>> tuples(m);
  std::vector<int> alphas(m);
  for (size_t r = 0; r < m; ++r) {
    tuples[r] = RdmSet::unrank(k, r);
    alphas[r] = alpha_count(tuples[r]);
  }
  for (size_t rc = 0; rc < m; ++rc)
    for (size_t ra = 0; ra <= rc; ++ra)
      if (alphas[rc] == alphas[ra]) f(rc, ra, tuples[rc], tuples[ra]);
}

FermionString element_string(const std::vector<int>& cre, const std::vector<int>& ann) {
  FermionString ops;
  for (int c : cre) ops.push_back({c, true});
  for (auto it = ann.rbegin(); it != ann.rend(); ++it) ops.push_back({*it, false});
  return ops;
}

struct GenerationData {
  std::vector<Outcome> outcomes;
  std::vector<double> counts;
  double shots = 0.0;
  std::vector<QubitDual> duals;
};

}  // namespace

RdmSet estimate_rdms(const MeasurementRecord& rec, int max_order) {
  const int n = rec.n_qubits;
  if (rec.generations() == 0) throw InputError("empty record");
  if (max_order < 1 || max_order > 4) throw RankError("RDM order must be 1..4");
  if (max_order > n) throw RankError("RDM order exceeds the register size");
  std::vector<GenerationData> gens(rec.generations());
  for (size_t g = 0; g < gens.size(); ++g) {
    gens[g].duals = dual_frame(rec.povms[g]);
    for (const auto& [m, c] : histogram(rec, g)) {
      gens[g].outcomes.push_back(m);
      gens[g].counts.push_back(static_cast<double>(c));
      gens[g].shots += static_cast<double>(c);
    }
  }
  RdmSet out(n, max_order, true);
  std::vector<ObservableEstimate> parts(gens.size());
  std::vector<int> support;
  std::vector<std::array<cplx, 4>> w;
  for (int k = 1; k <= max_order; ++k) {
    for_each_element(n, k, [&](size_t rc, size_t ra, const std::vector<int>& c, const std::vector<int>& a) {
      const LocalOperator loc = jordan_wigner_local(element_string(c, a), n);
      support.clear();
      for (int q = 0; q < n; ++q)
        if (loc.nontrivial[q]) support.push_back(q);
      for (size_t g = 0; g < gens.size(); ++g) {
        const auto& gd = gens[g];
        w.assign(support.size(), {});
        for (size_t i = 0; i < support.size(); ++i)
          for (int d = 0; d < 4; ++d)
            w[i][d] = (gd.duals[support[i]].duals[d] * loc.factors[support[i]]).trace();
        double s1 = 0.0, s2 = 0.0;
        for (size_t j = 0; j < gd.outcomes.size(); ++j) {
          cplx v = loc.coefficient;
          const Outcome m = gd.outcomes[j];
          for (size_t i = 0; i < support.size(); ++i) v *= w[i][outcome_digit(m, support[i])];
          const double re = v.real();
          s1 += gd.counts[j] * re;
          s2 += gd.counts[j] * re * re;
        }
        ObservableEstimate& e = parts[g];
        e.shots = static_cast<size_t>(gd.shots);
        e.mean = s1 / gd.shots;
        e.std_error = std::sqrt(std::max(0.0, s2 / gd.shots - e.mean * e.mean) / gd.shots);
      }
      const ObservableEstimate pooled = pool_estimates(parts);
      out.values(k)[out.slot(k, rc, ra)] = pooled.mean;
      out.values(k)[out.slot(k, ra, rc)] = pooled.mean;
      out.errors(k)[out.slot(k, rc, ra)] = pooled.std_error;
      out.errors(k)[out.slot(k, ra, rc)] = pooled.std_error;
    });
  }
  return out;
}

RdmSet estimate_rdms(const MeasurementRecord& rec, const ProductPovm& povm, int max_order) {
  for (const auto& p : rec.povms)
    if (p.id() != povm.id()) throw IdMismatchError("record was taken with POVM " + p.id() + ", not " + povm.id());
  return estimate_rdms(rec, max_order);
}

namespace {

// Applies a ladder operator to a determinant; returns false when it vanishes.
inline bool ladder(uint64_t& det, int idx, bool dagger, int& sign) {
  const uint64_t bit = uint64_t{1} << idx;
  if (dagger == static_cast<bool>(det & bit)) return false;
  if (std::popcount(det & (bit - 1)) & 1) sign = -sign;
  det ^= bit;
  return true;
}

template <class F>
void for_each_subset(const std::vector<int>& pool, int k, F&& f) {
  const int m = static_cast<int>(pool.size());
  if (k > m) return;
  std::vector<int> pick(k);
  for (int i = 0; i < k; ++i) pick[i] = i;
  std::vector<int> sel(k);
  while (true) {
    for (int i = 0; i < k; ++i) sel[i] = pool[pick[i]];
    f(sel);
    int i = k - 1;
    while (i >= 0 && pick[i] == m - k + i) --i;
    if (i < 0) return;
    ++pick[i];
    for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
}

}  // namespace

RdmSet exact_rdms_from_state(const StateVector& psi, int max_order) {
  const int n = psi.n_qubits();
  if (max_order < 1 || max_order > 4) throw RankError("RDM order must be 1..4");
  if (n > 30) throw ResourceError("state too large for exact RDMs");
  RdmSet out(n, max_order, false);
  std::vector<std::vector<cplx>> acc(max_order + 1);
  for (int k = 1; k <= max_order; ++k) acc[k].assign(out.values(k).size(), cplx{});
  const auto& amp = psi.amplitudes();
  std::vector<int> occ, emp;
  for (size_t b = 0; b < amp.size(); ++b) {
    if (std::norm(amp[b]) < 1e-30) continue;
    occ.clear();
    for (int q = 0; q < n; ++q)
      if ((b >> q) & 1) occ.push_back(q);
    for (int k = 1; k <= max_order; ++k) {
      for_each_subset(occ, k, [&](const std::vector<int>& a) {
        uint64_t mid = b;
        int sa = 1;
        for (int i = 0; i < k; ++i) ladder(mid, a[i], false, sa);
        emp.clear();
        for (int q = 0; q < n; ++q)
          if (!((mid >> q) & 1)) emp.push_back(q);
        const size_t ra = RdmSet::rank(a);
        for_each_subset(emp, k, [&](const std::vector<int>& c) {
          uint64_t fin = mid;
          int s = sa;
          for (int i = k - 1; i >= 0; --i) ladder(fin, c[i], true, s);
          acc[k][out.slot(k, RdmSet::rank(c), ra)] += std::conj(amp[fin]) * amp[b] * static_cast<double>(s);
        });
      });
    }
  }
  for (int k = 1; k <= max_order; ++k)
    for (size_t i = 0; i < acc[k].size(); ++i) out.values(k)[i] = acc[k][i].real();
  return out;
}

}  // namespace qcpt

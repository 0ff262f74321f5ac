#pragma once

// Property sweeps over generated toys; shared by the unit suite and the acceptance run.
// Each returns a list of human-readable violations (empty on success).

#include <bit>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "qcpt/errors.hpp"
#include "qcpt/estimation.hpp"
#include "qcpt/povm.hpp"
#include "qcpt/qubit_algebra.hpp"
#include "qcpt/rdm.hpp"
#include "qcpt/statevector.hpp"

namespace qcpt::checks {

using Failures = std::vector<std::string>;

inline std::vector<double> random_params(PovmClass cls, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  std::vector<double> p(parameter_count(cls));
  for (auto& v : p) v = ang(rng);
  if (cls == PovmClass::FourP) p[3] = std::uniform_real_distribution<double>(0.0, 0.9)(rng);
  return p;
}

inline Failures povm_guards() {
  Failures f;
  std::mt19937_64 rng(11);
  for (PovmClass cls : {PovmClass::FourP, PovmClass::EightP}) {
    for (int trial = 0; trial < 200; ++trial) {
      const auto p = random_params(cls, rng);
      const Effects e = cls == PovmClass::FourP ? effects_4p(p) : effects_8p(p);
      Eigen::Matrix2cd sum = Eigen::Matrix2cd::Zero();
      for (const auto& m : e) {
        sum += m;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(m);
        if (es.eigenvalues().minCoeff() < -1e-12) f.push_back(to_string(cls) + ": effect not PSD");
        if ((m - m.adjoint()).norm() > 1e-12) f.push_back(to_string(cls) + ": effect not Hermitian");
      }
      if ((sum - Eigen::Matrix2cd::Identity()).norm() > 1e-12) f.push_back(to_string(cls) + ": effects do not sum to 1");
      if (!is_valid_povm(e)) f.push_back(to_string(cls) + ": is_valid_povm rejected a valid set");
    }
    // Symmetric point is the regular tetrahedron.
    const auto sym = symmetric_parameters(cls);
    const Effects e = cls == PovmClass::FourP ? effects_4p(sym) : effects_8p(sym);
    const double a = 1.0 / std::sqrt(3.0);
    const double signs[4][3] = {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
    for (int m = 0; m < 4; ++m) {
      const Eigen::Matrix2cd want = 0.25 * (pauli_matrix(Pauli::I) + a * signs[m][0] * pauli_matrix(Pauli::X) +
                                            a * signs[m][1] * pauli_matrix(Pauli::Y) +
                                            a * signs[m][2] * pauli_matrix(Pauli::Z));
      if ((e[m] - want).norm() > 1e-10) f.push_back(to_string(cls) + ": symmetric point is not the tetrahedron");
    }
  }
  auto expect_throw = [&f](auto&& fn, const std::string& what, auto tag) {
    using E = decltype(tag);
    try {
      fn();
      f.push_back("no error for " + what);
    } catch (const E&) {
    } catch (const std::exception& ex) {
      f.push_back("wrong error for " + what + ": " + ex.what());
    }
  };
  expect_throw([] { effects_4p(std::vector<double>{0, 0, 0, 0.99}); }, "stretch above 0.95", ParameterError(""));
  expect_throw([] { effects_4p(std::vector<double>{0, 0, 0, -0.1}); }, "negative stretch", ParameterError(""));
  expect_throw([] { effects_4p(std::vector<double>{0, NAN, 0, 0.1}); }, "NaN angle", ParameterError(""));
  expect_throw([] { effects_8p(std::vector<double>{0, 0, 0}); }, "short 8P parameter list", ParameterError(""));
  expect_throw([] { ProductPovm(PovmClass::FourP, {{0, 0, 0}}); }, "short 4P parameter list", ParameterError(""));
  // All-zero 8P angles give a projective Z measurement, which is not IC.
  expect_throw([] { single_qubit_dual(effects_8p(std::vector<double>(8, 0.0))); }, "projective 8P",
               NotInformationallyComplete(""));
  Effects bad = effects_4p(symmetric_parameters(PovmClass::FourP));
  bad[0] *= 1.1;
  if (is_valid_povm(bad)) f.push_back("is_valid_povm accepted an incomplete set");
  return f;
}

// Random state with fixed particle number and S_z (alpha on even, beta on odd qubits).
inline StateVector random_number_state(int n, int ne, std::mt19937_64& rng, int ms2 = -1) {
  if (ms2 < 0) ms2 = ne % 2;
  std::normal_distribution<double> g;
  StateVector psi(n);
  for (size_t i = 0; i < psi.dim(); ++i) {
    const int na = std::popcount(i & 0x5555555555555555ULL), nb = std::popcount(i & 0xAAAAAAAAAAAAAAAAULL);
    psi.amplitudes()[i] = na + nb == ne && na - nb == ms2 ? cplx(g(rng), g(rng)) : cplx{};
  }
  psi.normalize();
  return psi;
}

inline Failures rdm_identities() {
  Failures f;
  std::mt19937_64 rng(5);
  for (auto [n, ne] : {std::pair{4, 2}, std::pair{6, 3}, std::pair{8, 4}}) {
    const StateVector psi = random_number_state(n, ne, rng);
    const RdmSet r = exact_rdms_from_state(psi, 4);
    for (int k = 1; k <= 4; ++k) {
      const double want = static_cast<double>(RdmSet::binomial(ne, k));
      if (std::abs(rdm_trace(r, k) - want) > 1e-10)
        f.push_back("trace of order " + std::to_string(k) + " for n=" + std::to_string(n));
    }
    // sum_r D_k(c.. r; a.. r) = (N - k + 1) D_{k-1}(c..; a..)
    for (int k = 2; k <= 4; ++k) {
      const size_t m = r.tuple_count(k - 1);
      double worst = 0.0;
      for (size_t rc = 0; rc < m; ++rc)
        for (size_t ra = 0; ra < m; ++ra) {
          auto c = RdmSet::unrank(k - 1, rc), a = RdmSet::unrank(k - 1, ra);
          double s = 0.0;
          for (int x = 0; x < n; ++x) {
            auto cc = c, aa = a;
            cc.push_back(x);
            aa.push_back(x);
            s += r.get(cc, aa);
          }
          worst = std::max(worst, std::abs(s - (ne - k + 1) * r.get(c, a)));
        }
      if (worst > 1e-12) f.push_back("partial trace of order " + std::to_string(k) + " off by " + std::to_string(worst));
    }
    // Hermiticity of the real densities.
    for (int k = 1; k <= 4; ++k) {
      const size_t m = r.tuple_count(k);
      for (size_t i = 0; i < m; ++i)
        for (size_t j = 0; j < i; ++j)
          if (std::abs(r.values(k)[r.slot(k, i, j)] - r.values(k)[r.slot(k, j, i)]) > 1e-12) {
            f.push_back("RDM not symmetric at order " + std::to_string(k));
            i = m;
            break;
          }
    }
  }
  return f;
}

inline Failures jw_anticommutation(int n = 6) {
  Failures f;
  const QubitOperator id = QubitOperator::identity(n);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int kind = 0; kind < 3; ++kind) {
        // {a_p, a+_q} = delta_pq, {a+_p, a+_q} = 0, {a_p, a_q} = 0
        const bool da = kind == 1, db = kind != 2;
        const QubitOperator a = jordan_wigner({{p, da}}, n);
        const QubitOperator b = jordan_wigner({{q, db}}, n);
        QubitOperator ac = operator_product(a, b) + operator_product(b, a);
        if (kind == 0 && p == q) ac -= id;
        ac.prune(1e-14);
        if (ac.size() != 0)
          f.push_back("anticommutator " + std::to_string(kind) + " wrong for " + std::to_string(p) + "," +
                      std::to_string(q));
      }
  // Number operator image: a+_p a_p = (1 - Z_p)/2.
  for (int p = 0; p < n; ++p) {
    QubitOperator np = jordan_wigner({{p, true}, {p, false}}, n);
    PauliString z;
    z.set(p, Pauli::Z);
    if (std::abs(np.coefficient(PauliString{}) - 0.5) > 1e-15 || std::abs(np.coefficient(z) + 0.5) > 1e-15 ||
        np.size() != 2)
      f.push_back("number operator image wrong for " + std::to_string(p));
  }
  return f;
}

// Both samplers against the exact outcome distribution via a chi-square statistic.
inline Failures sampler_equivalence() {
  Failures f;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int n : {1, 2, 3}) {
    for (PovmClass cls : {PovmClass::FourP, PovmClass::EightP}) {
      StateVector psi(n);
      for (auto& a : psi.amplitudes()) a = cplx(g(rng), g(rng));
      psi.normalize();
      std::vector<std::vector<double>> params;
      for (int q = 0; q < n; ++q) params.push_back(random_params(cls, rng));
      const ProductPovm povm(cls, params);
      const auto p = outcome_distribution(psi, povm);
      const size_t shots = 200000;
      for (SamplerMethod m : {SamplerMethod::Sequential, SamplerMethod::Distribution}) {
        const auto outs = sample_outcomes(psi, povm, shots, 99, 0, m);
        std::vector<double> count(p.size(), 0.0);
        for (Outcome o : outs) count[o] += 1.0;
        double chi2 = 0.0;
        int dof = -1;
        for (size_t i = 0; i < p.size(); ++i) {
          const double e = p[i] * shots;
          if (e < 5.0) continue;
          chi2 += (count[i] - e) * (count[i] - e) / e;
          ++dof;
        }
        const double z = (chi2 - dof) / std::sqrt(2.0 * dof);
        if (z > 5.0)
          f.push_back(std::string(m == SamplerMethod::Sequential ? "sequential" : "distribution") +
                      " sampler off for n=" + std::to_string(n) + " " + to_string(cls) + " (z=" + std::to_string(z) + ")");
      }
      // Batch splitting does not change the shots.
      const auto whole = sample_outcomes(psi, povm, 1000, 5);
      auto head = sample_outcomes(psi, povm, 400, 5, 0);
      const auto tail = sample_outcomes(psi, povm, 600, 5, 400);
      head.insert(head.end(), tail.begin(), tail.end());
      if (head != whole) f.push_back("batched sampling differs from one batch");
    }
  }
  return f;
}

}  // namespace qcpt::checks

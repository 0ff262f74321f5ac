#include "qcpt/statevector.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>

#include "qcpt/errors.hpp"
#include "qcpt/local_transform.hpp"

namespace qcpt {

StateVector::StateVector(int n_qubits) : n_(n_qubits) {
  if (n_qubits <= 0 || n_qubits > kMaxStateQubits) throw ResourceError("qubit count out of range");
  amp_.assign(size_t{1} << n_qubits, cplx{});
  amp_[0] = 1.0;
}

double StateVector::norm() const {
  double s = 0.0;
  for (const auto& a : amp_) s += std::norm(a);
  return std::sqrt(s);
}

void StateVector::normalize() {
  const double nrm = norm();
  if (nrm == 0.0) throw InputError("zero state cannot be normalised");
  for (auto& a : amp_) a /= nrm;
}

StateVector prepare_reference(uint64_t occupied, int n_qubits, int n_electrons) {
  if (n_qubits < 64 && (occupied >> n_qubits) != 0) throw InputError("occupation beyond the qubit register");
  if (std::popcount(occupied) != n_electrons) throw InputError("occupation does not match the electron count");
  StateVector s(n_qubits);
  s.amplitudes()[0] = 0.0;
  s.amplitudes()[occupied] = 1.0;
  return s;
}

void add_pauli_action(const PauliString& p, cplx c, const std::vector<cplx>& in, std::vector<cplx>& out) {
  static const cplx ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const cplx base = c * ipow[std::popcount(p.x & p.z) % 4];
  const size_t dim = in.size();
  for (size_t b = 0; b < dim; ++b) {
    if (in[b] == cplx{}) continue;
    const bool odd = std::popcount(p.z & b) & 1;
    out[b ^ p.x] += (odd ? -base : base) * in[b];
  }
}

std::vector<cplx> apply_operator(const QubitOperator& op, const StateVector& psi) {
  if (op.n_qubits() != psi.n_qubits()) throw InputError("operator and state sizes differ");
  std::vector<cplx> out(psi.dim(), cplx{});
  for (const auto& [p, c] : op.terms()) add_pauli_action(p, c, psi.amplitudes(), out);
  return out;
}

cplx inner(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  cplx s{};
  for (size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

double expectation(const StateVector& psi, const QubitOperator& op) {
  return inner(psi.amplitudes(), apply_operator(op, psi)).real();
}

StateVector apply_exp_pauli(const StateVector& psi, const QubitOperator& generator, double theta) {
  if (generator.n_qubits() != psi.n_qubits()) throw InputError("generator and state sizes differ");
  double l1 = 0.0;
  for (const auto& [p, c] : generator.terms()) {
    if (std::abs(c.real()) > 1e-12 * std::max(1.0, std::abs(c)))
      throw ParameterError("generator must be anti-Hermitian");
    l1 += std::abs(c);
  }
  bool all_commute = true;
  for (auto a = generator.terms().begin(); a != generator.terms().end() && all_commute; ++a)
    for (auto b = std::next(a); b != generator.terms().end(); ++b)
      if (!commutes(a->first, b->first)) {
        all_commute = false;
        break;
      }
  StateVector out = psi;
  auto& v = out.amplitudes();
  if (all_commute) {
    std::vector<cplx> pv(v.size());
    for (const auto& [p, c] : generator.terms()) {
      // exp(i phi P) = cos(phi) + i sin(phi) P
      const double phi = c.imag() * theta;
      std::fill(pv.begin(), pv.end(), cplx{});
      add_pauli_action(p, 1.0, v, pv);
      const double cs = std::cos(phi), sn = std::sin(phi);
      for (size_t i = 0; i < v.size(); ++i) v[i] = cs * v[i] + cplx(0, sn) * pv[i];
    }
    return out;
  }
  // Non-commuting terms: scaled Taylor steps, each with |theta|*l1/steps <= 0.5.
  const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(theta) * l1 / 0.5)));
  const double h = theta / steps;
  std::vector<cplx> term(v.size()), next(v.size());
  for (int s = 0; s < steps; ++s) {
    term = v;
    for (int k = 1; k < 60; ++k) {
      std::fill(next.begin(), next.end(), cplx{});
      for (const auto& [p, c] : generator.terms()) add_pauli_action(p, c * (h / k), term, next);
      double nn = 0.0;
      for (size_t i = 0; i < v.size(); ++i) {
        v[i] += next[i];
        nn += std::norm(next[i]);
      }
      term.swap(next);
      if (nn < 1e-34) break;
    }
  }
  out.normalize();
  return out;
}

namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t spread_bits(uint64_t v) {
  uint64_t out = 0;
  for (int q = 0; v; ++q, v >>= 1) out |= (v & 1) << (2 * q);
  return out;
}

constexpr int kDistributionMaxQubits = 10;

std::vector<Outcome> sample_sequential(const StateVector& psi, const ProductPovm& povm, size_t shots,
                                       uint64_t seed, uint64_t first_shot) {
  const int n = psi.n_qubits();
  // Kraus operators sqrt(Pi_m) per qubit
  std::vector<std::array<Eigen::Matrix2cd, 4>> kraus(n);
  for (int q = 0; q < n; ++q)
    for (int m = 0; m < 4; ++m) {
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(povm.effects(q)[m]);
      const Eigen::Vector2d ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
      kraus[q][m] = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
    }
  std::vector<Outcome> out(shots);
  std::vector<cplx> work;
  const size_t dim = psi.dim();
  for (size_t s = 0; s < shots; ++s) {
    work = psi.amplitudes();
    Outcome m_all = 0;
    for (int q = 0; q < n; ++q) {
      const size_t bit = size_t{1} << q;
      cplx r00{}, r11{}, r01{};
      for (size_t b = 0; b < dim; ++b) {
        if (b & bit) continue;
        const cplx a0 = work[b], a1 = work[b | bit];
        r00 += std::norm(a0);
        r11 += std::norm(a1);
        r01 += a0 * std::conj(a1);
      }
      Eigen::Matrix2cd rho;
      rho << r00, r01, std::conj(r01), r11;
      std::array<double, 4> p{};
      double tot = 0.0;
      for (int m = 0; m < 4; ++m) {
        p[m] = std::max(0.0, (povm.effects(q)[m] * rho).trace().real());
        tot += p[m];
      }
      const double u = counter_uniform(seed, first_shot + s, static_cast<uint64_t>(q)) * tot;
      int m = 0;
      double acc = p[0];
      while (m < 3 && u >= acc) acc += p[++m];
      const auto& k = kraus[q][m];
      for (size_t b = 0; b < dim; ++b) {
        if (b & bit) continue;
        const cplx a0 = work[b], a1 = work[b | bit];
        work[b] = k(0, 0) * a0 + k(0, 1) * a1;
        work[b | bit] = k(1, 0) * a0 + k(1, 1) * a1;
      }
      m_all |= static_cast<Outcome>(m) << (2 * q);
    }
    out[s] = m_all;
  }
  return out;
}

}  // namespace

double counter_uniform(uint64_t seed, uint64_t shot, uint64_t draw) {
  uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ shot);
  h = splitmix64(h ^ (draw * 0xd1b54a32d192ed03ULL));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

std::vector<double> outcome_distribution(const StateVector& psi, const ProductPovm& povm) {
  const int n = psi.n_qubits();
  if (n != povm.n_qubits()) throw InputError("POVM and state sizes differ");
  if (n > 11) throw ResourceError("outcome distribution limited to 11 qubits");
  const size_t dim = psi.dim();
  std::vector<cplx> rho(pow4(n));
  std::vector<uint64_t> spread(dim);
  for (size_t b = 0; b < dim; ++b) spread[b] = spread_bits(b);
  const auto& a = psi.amplitudes();
  for (size_t i = 0; i < dim; ++i)
    for (size_t j = 0; j < dim; ++j) rho[(spread[i] << 1) | spread[j]] = a[i] * std::conj(a[j]);
  for (int q = 0; q < n; ++q) {
    // digit d = 2i + j holds rho_ij; p(m) = sum_ij Pi_m(j,i) rho_ij
    std::array<std::array<cplx, 4>, 4> mat;
    for (int m = 0; m < 4; ++m)
      for (int d = 0; d < 4; ++d) mat[m][d] = povm.effects(q)[m](d & 1, d >> 1);
    apply_local_map(rho, q, mat);
  }
  std::vector<double> p(rho.size());
  for (size_t k = 0; k < rho.size(); ++k) p[k] = std::max(0.0, rho[k].real());
  return p;
}

std::vector<Outcome> sample_outcomes(const StateVector& psi, const ProductPovm& povm, size_t shots,
                                     uint64_t seed, uint64_t first_shot, SamplerMethod method) {
  const int n = psi.n_qubits();
  if (povm.n_qubits() != n) throw InputError("POVM and state sizes differ");
  if (n > kMaxRecordQubits) throw ResourceError("sampling limited to 16 qubits");
  if (std::abs(psi.norm() - 1.0) > 1e-9) throw InputError("state is not normalised");
  if (method == SamplerMethod::Auto)
    method = n <= kDistributionMaxQubits ? SamplerMethod::Distribution : SamplerMethod::Sequential;
  if (method == SamplerMethod::Sequential) return sample_sequential(psi, povm, shots, seed, first_shot);

  std::vector<double> cdf = outcome_distribution(psi, povm);
  for (size_t k = 1; k < cdf.size(); ++k) cdf[k] += cdf[k - 1];
  const double total = cdf.back();
  std::vector<Outcome> out(shots);
  for (size_t s = 0; s < shots; ++s) {
    const double u = counter_uniform(seed, first_shot + s, 0) * total;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    out[s] = static_cast<Outcome>(it - cdf.begin());
  }
  return out;
}

MeasurementRecord sample_product_povm(const StateVector& psi, const ProductPovm& povm, size_t shots,
                                      uint64_t seed, SamplerMethod method) {
  MeasurementRecord rec;
  rec.n_qubits = psi.n_qubits();
  rec.seed = seed;
  const auto outs = sample_outcomes(psi, povm, shots, seed, 0, method);
  rec.append(povm, outs);
  return rec;
}

}  // namespace qcpt

#include "qcpt/qubit_algebra.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "qcpt/errors.hpp"
#include "qcpt/hamiltonians.hpp"

namespace qcpt {

void PauliString::set(int q, Pauli p) {
  const uint64_t bit = uint64_t{1} << q;
  x &= ~bit;
  z &= ~bit;
  if (p == Pauli::X || p == Pauli::Y) x |= bit;
  if (p == Pauli::Y || p == Pauli::Z) z |= bit;
}

PauliString PauliString::parse(const std::string& text) {
  if (text.size() > 64) throw InputError("Pauli string longer than 64 qubits");
  PauliString p;
  for (size_t q = 0; q < text.size(); ++q) {
    switch (text[q]) {
      case 'I': break;
      case 'X': p.set(static_cast<int>(q), Pauli::X); break;
      case 'Y': p.set(static_cast<int>(q), Pauli::Y); break;
      case 'Z': p.set(static_cast<int>(q), Pauli::Z); break;
      default: throw InputError(std::string("bad Pauli letter '") + text[q] + "'");
    }
  }
  return p;
}

std::string PauliString::text(int n_qubits) const {
  static const char letters[] = {'I', 'X', 'Y', 'Z'};
  std::string s(n_qubits, 'I');
  for (int q = 0; q < n_qubits; ++q) s[q] = letters[static_cast<int>(at(q))];
  return s;
}

PauliProduct multiply(const PauliString& a, const PauliString& b) {
  PauliString r{a.x ^ b.x, a.z ^ b.z};
  const int e = std::popcount(a.x & a.z) + std::popcount(b.x & b.z) - std::popcount(r.x & r.z) +
                2 * std::popcount(a.z & b.x);
  static const cplx powers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return {powers[((e % 4) + 4) % 4], r};
}

bool commutes(const PauliString& a, const PauliString& b) {
  return ((std::popcount(a.x & b.z) + std::popcount(a.z & b.x)) & 1) == 0;
}

QubitOperator QubitOperator::identity(int n_qubits, cplx c) {
  QubitOperator op(n_qubits);
  op.add({}, c);
  return op;
}

void QubitOperator::add(const PauliString& p, cplx c) {
  if (c == cplx{}) return;
  auto [it, fresh] = terms_.emplace(p, c);
  if (!fresh) it->second += c;
}

cplx QubitOperator::coefficient(const PauliString& p) const {
  auto it = terms_.find(p);
  return it == terms_.end() ? cplx{} : it->second;
}

QubitOperator& QubitOperator::operator+=(const QubitOperator& o) {
  if (n_ != o.n_) throw MappingError("qubit count mismatch");
  for (const auto& [p, c] : o.terms_) add(p, c);
  return *this;
}

QubitOperator& QubitOperator::operator-=(const QubitOperator& o) {
  if (n_ != o.n_) throw MappingError("qubit count mismatch");
  for (const auto& [p, c] : o.terms_) add(p, -c);
  return *this;
}

QubitOperator& QubitOperator::operator*=(cplx c) {
  for (auto& kv : terms_) kv.second *= c;
  return *this;
}

QubitOperator QubitOperator::adjoint() const {
  QubitOperator out(n_);
  for (const auto& [p, c] : terms_) out.terms_.emplace(p, std::conj(c));
  return out;
}

double QubitOperator::hermiticity_defect() const {
  double d = 0.0;
  for (const auto& [p, c] : terms_) d = std::max(d, 2.0 * std::abs(c.imag()));
  return d;
}

void QubitOperator::prune(double tol) {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (std::abs(it->second) <= tol)
      it = terms_.erase(it);
    else
      ++it;
  }
}

std::vector<std::pair<PauliString, double>> QubitOperator::real_terms(double tol) const {
  if (hermiticity_defect() > tol) throw MappingError("operator is not Hermitian");
  std::vector<std::pair<PauliString, double>> out;
  out.reserve(terms_.size());
  for (const auto& [p, c] : terms_) out.emplace_back(p, c.real());
  return out;
}

QubitOperator operator_product(const QubitOperator& a, const QubitOperator& b) {
  if (a.n_qubits() != b.n_qubits()) throw MappingError("qubit count mismatch");
  QubitOperator out(a.n_qubits());
  for (const auto& [pa, ca] : a.terms())
    for (const auto& [pb, cb] : b.terms()) {
      const auto prod = multiply(pa, pb);
      out.add(prod.result, prod.phase * ca * cb);
    }
  out.prune(0.0);
  return out;
}

QubitOperator commutator(const QubitOperator& a, const QubitOperator& b) {
  if (a.n_qubits() != b.n_qubits()) throw MappingError("qubit count mismatch");
  QubitOperator out(a.n_qubits());
  for (const auto& [pa, ca] : a.terms())
    for (const auto& [pb, cb] : b.terms()) {
      if (commutes(pa, pb)) continue;
      const auto prod = multiply(pa, pb);
      out.add(prod.result, 2.0 * prod.phase * ca * cb);
    }
  out.prune(1e-15);
  return out;
}

const Eigen::Matrix2cd& pauli_matrix(Pauli p) {
  static const auto mats = [] {
    std::array<Eigen::Matrix2cd, 4> m;
    const cplx i(0, 1);
    m[0] << 1, 0, 0, 1;
    m[1] << 0, 1, 1, 0;
    m[2] << 0, -i, i, 0;
    m[3] << 1, 0, 0, -1;
    return m;
  }();
  return mats[static_cast<int>(p)];
}

LocalOperator jordan_wigner_local(const FermionString& ops, int n_qubits) {
  LocalOperator out;
  out.factors.assign(n_qubits, Eigen::Matrix2cd::Identity());
  out.nontrivial.assign(n_qubits, false);
  Eigen::Matrix2cd raise, lower;
  raise << 0, 0, 1, 0;
  lower << 0, 1, 0, 0;
  const Eigen::Matrix2cd& z = pauli_matrix(Pauli::Z);
  for (const auto& op : ops) {
    if (op.index < 0 || op.index >= n_qubits) throw MappingError("ladder index exceeds qubit count");
    for (int q = 0; q < op.index; ++q) {
      out.factors[q] = out.factors[q] * z;
      out.nontrivial[q] = true;
    }
    out.factors[op.index] = out.factors[op.index] * (op.dagger ? raise : lower);
    out.nontrivial[op.index] = true;
  }
  // strings of Z that cancelled are identities again
  for (int q = 0; q < n_qubits; ++q)
    if (out.nontrivial[q] && (out.factors[q] - Eigen::Matrix2cd::Identity()).norm() < 1e-15)
      out.nontrivial[q] = false;
  return out;
}

QubitOperator expand_local(const LocalOperator& op, double tol) {
  const int n = static_cast<int>(op.factors.size());
  std::vector<std::vector<std::pair<Pauli, cplx>>> pieces(n);
  for (int q = 0; q < n; ++q) {
    if (!op.nontrivial[q]) {
      pieces[q].push_back({Pauli::I, 1.0});
      continue;
    }
    for (int k = 0; k < 4; ++k) {
      const Pauli p = static_cast<Pauli>(k);
      const cplx c = 0.5 * (pauli_matrix(p) * op.factors[q]).trace();
      if (std::abs(c) > tol) pieces[q].push_back({p, c});
    }
    if (pieces[q].empty()) return QubitOperator(n);
  }
  QubitOperator out(n);
  std::vector<size_t> pick(n, 0);
  while (true) {
    PauliString ps;
    cplx c = op.coefficient;
    for (int q = 0; q < n; ++q) {
      ps.set(q, pieces[q][pick[q]].first);
      c *= pieces[q][pick[q]].second;
    }
    out.add(ps, c);
    int q = 0;
    while (q < n && ++pick[q] == pieces[q].size()) pick[q++] = 0;
    if (q == n) break;
  }
  return out;
}

QubitOperator jordan_wigner(const FermionString& ops, int n_qubits, cplx coefficient) {
  LocalOperator loc = jordan_wigner_local(ops, n_qubits);
  loc.coefficient *= coefficient;
  QubitOperator out = expand_local(loc);
  out.prune(1e-15);
  return out;
}

QubitOperator qubit_hamiltonian(const ActiveHamiltonian& h) {
  const int n = h.n_active();
  const int nq = 2 * n;
  if (nq > 64) throw MappingError("too many spin orbitals for the qubit encoding");
  QubitOperator out = QubitOperator::identity(nq, h.e_const);
  const double tol = 1e-14;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      if (std::abs(h.h_eff(p, q)) < tol) continue;
      for (int s = 0; s < 2; ++s)
        out += jordan_wigner({{2 * p + s, true}, {2 * q + s, false}}, nq, h.h_eff(p, q));
    }
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
          const double v = h.g(p, q, r, s);
          if (std::abs(v) < tol) continue;
          for (int sa = 0; sa < 2; ++sa)
            for (int sb = 0; sb < 2; ++sb) {
              const int a = 2 * p + sa, b = 2 * r + sb, c = 2 * s + sb, d = 2 * q + sa;
              if (a == b || c == d) continue;
              out += jordan_wigner({{a, true}, {b, true}, {c, false}, {d, false}}, nq, 0.5 * v);
            }
        }
  out.prune(1e-12);
  if (out.hermiticity_defect() > 1e-10) throw MappingError("qubit Hamiltonian is not Hermitian");
  // drop the round-off imaginary parts
  QubitOperator clean(nq);
  for (const auto& [ps, c] : out.terms()) clean.add(ps, c.real());
  return clean;
}

Eigen::MatrixXcd to_dense(const QubitOperator& op) {
  const int n = op.n_qubits();
  if (n > 14) throw ResourceError("dense matrix too large");
  const size_t dim = size_t{1} << n;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  static const cplx ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (const auto& [p, c] : op.terms()) {
    const cplx base = c * ipow[std::popcount(p.x & p.z) % 4];
    for (size_t b = 0; b < dim; ++b) {
      const double sign = (std::popcount(p.z & b) & 1) ? -1.0 : 1.0;
      m(b ^ p.x, b) += base * sign;
    }
  }
  return m;
}

}  // namespace qcpt

#pragma once

#include <bit>
#include <compare>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qcpt {

using cplx = std::complex<double>;

// Pauli letters in the order used for dense indexing: I=0, X=1, Y=2, Z=3.
enum class Pauli : int { I = 0, X = 1, Y = 2, Z = 3 };

// Tensor product of Paulis in symplectic form, P = i^{|x&z|} X^x Z^z.
// Bit q of x/z refers to qubit q; text form puts qubit 0 first.
struct PauliString {
  uint64_t x = 0;
  uint64_t z = 0;

  Pauli at(int q) const {
    const int bx = (x >> q) & 1, bz = (z >> q) & 1;
    return bx ? (bz ? Pauli::Y : Pauli::X) : (bz ? Pauli::Z : Pauli::I);
  }
  void set(int q, Pauli p);
  int weight() const { return std::popcount(x | z); }
  bool is_identity() const { return (x | z) == 0; }

  static PauliString parse(const std::string& text);
  std::string text(int n_qubits) const;

  auto operator<=>(const PauliString&) const = default;
};

// a*b = phase * result
struct PauliProduct {
  cplx phase;
  PauliString result;
};
PauliProduct multiply(const PauliString& a, const PauliString& b);
bool commutes(const PauliString& a, const PauliString& b);

class QubitOperator {
 public:
  using TermMap = std::map<PauliString, cplx>;

  explicit QubitOperator(int n_qubits = 0) : n_(n_qubits) {}
  static QubitOperator identity(int n_qubits, cplx c = 1.0);

  int n_qubits() const { return n_; }
  const TermMap& terms() const { return terms_; }
  size_t size() const { return terms_.size(); }

  void add(const PauliString& p, cplx c);
  cplx coefficient(const PauliString& p) const;

  QubitOperator& operator+=(const QubitOperator& o);
  QubitOperator& operator-=(const QubitOperator& o);
  QubitOperator& operator*=(cplx c);
  friend QubitOperator operator+(QubitOperator a, const QubitOperator& b) { return a += b; }
  friend QubitOperator operator-(QubitOperator a, const QubitOperator& b) { return a -= b; }
  friend QubitOperator operator*(QubitOperator a, cplx c) { return a *= c; }
  friend QubitOperator operator*(cplx c, QubitOperator a) { return a *= c; }

  QubitOperator adjoint() const;
  // Largest |c - conj(c)| over terms; zero for a Hermitian operator.
  double hermiticity_defect() const;
  void prune(double tol = 1e-12);

  // Real Pauli coefficients of a Hermitian operator; throws if not Hermitian.
  std::vector<std::pair<PauliString, double>> real_terms(double tol = 1e-10) const;

 private:
  int n_;
  TermMap terms_;
};

QubitOperator operator_product(const QubitOperator& a, const QubitOperator& b);
QubitOperator commutator(const QubitOperator& a, const QubitOperator& b);

struct LadderOp {
  int index;
  bool dagger;
};
using FermionString = std::vector<LadderOp>;

// A Jordan-Wigner image that is a single tensor product of 2x2 matrices.
// Every product of ladder operators has this form.
struct LocalOperator {
  cplx coefficient = 1.0;
  std::vector<Eigen::Matrix2cd> factors;  // one per qubit
  std::vector<bool> nontrivial;           // false where the factor is the identity
};

// a+_p = Z_0..Z_{p-1} (X_p - iY_p)/2, a_p = Z_0..Z_{p-1} (X_p + iY_p)/2; |1> is occupied.
LocalOperator jordan_wigner_local(const FermionString& ops, int n_qubits);
QubitOperator expand_local(const LocalOperator& op, double tol = 1e-14);
QubitOperator jordan_wigner(const FermionString& ops, int n_qubits, cplx coefficient = 1.0);

struct ActiveHamiltonian;
// Qubit image of the active Hamiltonian over 2*n_active spin orbitals.
QubitOperator qubit_hamiltonian(const ActiveHamiltonian& h);

// 2x2 matrix of a single-qubit Pauli letter.
const Eigen::Matrix2cd& pauli_matrix(Pauli p);

// Dense matrix in the computational basis, bit q of the row index is qubit q.
Eigen::MatrixXcd to_dense(const QubitOperator& op);

}  // namespace qcpt

#pragma once

#include <cstdint>
#include <vector>

#include "qcpt/measurement_record.hpp"
#include "qcpt/povm.hpp"
#include "qcpt/qubit_algebra.hpp"

namespace qcpt {

class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(int n_qubits);  // |0...0>

  int n_qubits() const { return n_; }
  size_t dim() const { return amp_.size(); }
  std::vector<cplx>& amplitudes() { return amp_; }
  const std::vector<cplx>& amplitudes() const { return amp_; }
  double norm() const;
  void normalize();

 private:
  int n_ = 0;
  std::vector<cplx> amp_;
};

inline constexpr int kMaxStateQubits = 26;

// Basis state with bit q set for each occupied spin orbital q.
StateVector prepare_reference(uint64_t occupied, int n_qubits, int n_electrons);

// out += c * P |in>
void add_pauli_action(const PauliString& p, cplx c, const std::vector<cplx>& in, std::vector<cplx>& out);
std::vector<cplx> apply_operator(const QubitOperator& op, const StateVector& psi);
double expectation(const StateVector& psi, const QubitOperator& hermitian_op);
cplx inner(const std::vector<cplx>& a, const std::vector<cplx>& b);

// exp(theta * G) |psi> for anti-Hermitian G (coefficients imaginary).
StateVector apply_exp_pauli(const StateVector& psi, const QubitOperator& generator, double theta);

// Uniform in [0,1) keyed by (seed, shot, draw); counter based so a shot does not
// depend on how the shots were split into batches.
double counter_uniform(uint64_t seed, uint64_t shot, uint64_t draw);

enum class SamplerMethod {
  Auto,          // picks the cheaper of the two below
  Sequential,    // qubit-by-qubit Kraus updates, O(n 2^n) per shot
  Distribution,  // full outcome distribution once, then inverse-CDF per shot
};

// Outcomes for shots first_shot .. first_shot + shots - 1.
std::vector<Outcome> sample_outcomes(const StateVector& psi, const ProductPovm& povm, size_t shots,
                                     uint64_t seed, uint64_t first_shot = 0,
                                     SamplerMethod method = SamplerMethod::Auto);

MeasurementRecord sample_product_povm(const StateVector& psi, const ProductPovm& povm, size_t shots,
                                      uint64_t seed, SamplerMethod method = SamplerMethod::Auto);

// Exact outcome probabilities over all 4^n outcomes (n <= 11).
std::vector<double> outcome_distribution(const StateVector& psi, const ProductPovm& povm);

}  // namespace qcpt

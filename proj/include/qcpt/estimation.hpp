#pragma once

#include <span>
#include <unordered_map>
#include <vector>

#include "qcpt/measurement_record.hpp"
#include "qcpt/qubit_algebra.hpp"
#include "qcpt/rdm.hpp"
#include "qcpt/statevector.hpp"

namespace qcpt {

struct ObservableEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // sqrt(sample variance / shots)
  size_t shots = 0;
};

// Inverse-variance combination; a zero-error entry is floored so it dominates without dividing by zero.
ObservableEstimate pool_estimates(std::span<const ObservableEstimate> parts);

// Shots of one generation. Throws IdMismatchError if povm is not the one that generation used.
ObservableEstimate estimate_observable(const MeasurementRecord& rec, const ProductPovm& povm,
                                       const QubitOperator& obs);
// Every generation, pooled.
ObservableEstimate estimate_observable(const MeasurementRecord& rec, const QubitOperator& obs);
ObservableEstimate estimate_generation(const MeasurementRecord& rec, size_t generation,
                                       const QubitOperator& obs);

// Spin-orbital RDMs up to max_order from the record, each generation estimated with its
// own duals and then pooled element by element. The qubit count is the spin-orbital count.
RdmSet estimate_rdms(const MeasurementRecord& rec, int max_order);
RdmSet estimate_rdms(const MeasurementRecord& rec, const ProductPovm& povm, int max_order);

RdmSet exact_rdms_from_state(const StateVector& psi, int max_order);

// Shot counts per distinct outcome.
using Histogram = std::unordered_map<Outcome, size_t>;
Histogram histogram(const MeasurementRecord& rec, size_t generation);

// Dense helpers over 4^n tensors, n <= 12.
inline constexpr int kDenseMaxQubits = 12;
size_t pauli_index(const PauliString& p, int n_qubits);
std::vector<double> pauli_coefficients(const QubitOperator& obs);
// omega(m) for every outcome m of the given duals.
std::vector<double> dense_omega(const std::vector<QubitDual>& duals, const std::vector<double>& coeffs);
// Single-shot estimator value for one outcome.
double omega_value(const std::vector<QubitDual>& duals, const std::vector<std::pair<PauliString, double>>& terms,
                   Outcome m);

}  // namespace qcpt

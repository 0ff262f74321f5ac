#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qcpt/adaptive_measurement.hpp"
#include "qcpt/hamiltonians.hpp"
#include "qcpt/qubit_algebra.hpp"
#include "qcpt/statevector.hpp"

namespace qcpt {

// A = T - T+ for an excitation T = a+_u.. a_t..; generator is its qubit image.
struct PoolOperator {
  std::string label;
  FermionString excitation;
  QubitOperator generator;
};
using OperatorPool = std::vector<PoolOperator>;

// Occupied-to-virtual excitations relative to the aufbau determinant: singles within each
// spin, and all S_z-conserving spin-orbital doubles.
OperatorPool build_pool(int n_active, int n_electrons, int ms2 = 0);

// Aufbau occupation, alpha on even qubits and beta on odd ones.
uint64_t reference_occupation(int n_active, int n_electrons, int ms2 = 0);

// g_k = <psi|[H, A_k]|psi> = 2 Re <H psi|A_k psi>
std::vector<double> pool_gradients(const StateVector& psi, const QubitOperator& h, const OperatorPool& pool);

enum class AdaptMode { Exact, Sampled };

struct AdaptSettings {
  AdaptMode mode = AdaptMode::Exact;
  double grad_threshold = 1e-6;
  int max_layers = 30;
  double optimizer_tol = 1e-8;  // on the parameter gradient norm
  int max_iterations = 500;
  // sampled mode
  PovmClass povm_class = PovmClass::FourP;
  size_t shots_per_evaluation = 20000;
  double fd_step = 0.05;
  double sigma_target = 1.6e-3;
  AdaptiveOptions final_measurement;
  uint64_t seed = 1;
};

struct Ansatz {
  uint64_t reference = 0;
  std::vector<int> ops;  // pool indices, first applied first
  std::vector<double> params;
};

struct AdaptLayer {
  int layer = 0;
  double energy = 0.0;
  double max_gradient = 0.0;  // of the pool, before the operator of this layer was added
  size_t shots_cumulative = 0;
};

struct AdaptResult {
  Ansatz ansatz;
  StateVector state;
  double energy = 0.0;
  std::vector<AdaptLayer> trace;
  bool converged = false;
  size_t shots = 0;
  std::optional<AdaptiveResult> measurement;  // sampled mode final energy
};

StateVector prepare_ansatz(const Ansatz& ansatz, const OperatorPool& pool, int n_qubits);

AdaptResult run_adapt(const ActiveHamiltonian& h, const AdaptSettings& settings);

void write_adapt_trace(const std::filesystem::path& path, const std::vector<AdaptLayer>& trace);

}  // namespace qcpt

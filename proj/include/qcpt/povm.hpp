#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qcpt {

enum class PovmClass {
  FourP,   // rotated, stretched tetrahedron: 3 Euler angles + stretch
  EightP,  // two-qubit dilation with an ancilla: 8 rotation angles
};

int parameter_count(PovmClass cls);
std::string to_string(PovmClass cls);
PovmClass parse_povm_class(const std::string& s);

using Effects = std::array<Eigen::Matrix2cd, 4>;
// table[m][P] with P over I, X, Y, Z
using PauliTable = std::array<std::array<double, 4>, 4>;

// Largest stretch accepted for a 4P effect set; at 1 the set degenerates.
inline constexpr double kMaxStretch = 0.95;
// Frame operators with a worse condition number are treated as not IC.
inline constexpr double kMaxFrameCondition = 1e6;

// 4P: tetrahedron rotated by Rz(t0) Ry(t1) Rz(t2), then pulled by t3 in [0, 0.95]
// towards the projective split {|n><n|, (1-|n><n|)/3 x3} along the first direction n.
Effects effects_4p(std::span<const double> params);

// 8P: rows of the system block of
//   U = (Ry(p6) x Ry(p7)) CNOT (R3(p0,p1,p2) x R3(p3,p4,p5)),  R3(a,b,c) = Rz(a) Ry(b) Rz(c),
// applied with the ancilla in |0>; outcome m = 2*system + ancilla.
Effects effects_8p(std::span<const double> params);

// Parameters of the symmetric tetrahedron, whose effects are (1 + a_m.sigma)/4 with
// a = (1,1,1), (1,-1,-1), (-1,1,-1), (-1,-1,1) over sqrt(3).
std::vector<double> symmetric_parameters(PovmClass cls);

// Product of single-qubit POVMs of one class.
class ProductPovm {
 public:
  ProductPovm() = default;
  ProductPovm(PovmClass cls, std::vector<std::vector<double>> params);

  static ProductPovm symmetric(PovmClass cls, int n_qubits);

  PovmClass povm_class() const { return cls_; }
  int n_qubits() const { return static_cast<int>(params_.size()); }
  const std::vector<double>& params(int q) const { return params_.at(q); }
  const std::vector<std::vector<double>>& all_params() const { return params_; }
  const Effects& effects(int q) const { return effects_.at(q); }

  // Stable digest of the class and parameters.
  const std::string& id() const { return id_; }

 private:
  PovmClass cls_ = PovmClass::FourP;
  std::vector<std::vector<double>> params_;
  std::vector<Effects> effects_;
  std::string id_;
};

struct QubitDual {
  Effects duals;          // Tr[Delta_m Pi_n] = delta_mn
  PauliTable omega;       // Tr[Delta_m sigma_P]
  PauliTable prob;        // Tr[Pi_m sigma_P] / 2, so p(m) = sum_P prob[m][P] <sigma_P>
  double frame_condition; // of F_mn = Tr[Pi_m Pi_n]
};

// Throws NotInformationallyComplete when a frame operator is singular or ill conditioned.
QubitDual single_qubit_dual(const Effects& effects);
std::vector<QubitDual> dual_frame(const ProductPovm& povm);

// Checks positivity and completeness of a single-qubit effect set.
bool is_valid_povm(const Effects& effects, double tol = 1e-10);

}  // namespace qcpt

#include "qcpt/povm.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <numbers>

#include "qcpt/errors.hpp"
#include "qcpt/qubit_algebra.hpp"

namespace qcpt {

namespace {

using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;

const double kTetra[4][3] = {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};

Mat2 ry(double t) {
  Mat2 m;
  m << std::cos(t / 2), -std::sin(t / 2), std::sin(t / 2), std::cos(t / 2);
  return m;
}

Mat2 rz(double t) {
  const cplx e(std::cos(t / 2), -std::sin(t / 2));
  Mat2 m;
  m << e, 0, 0, std::conj(e);
  return m;
}

Mat2 r3(double a, double b, double c) { return rz(a) * ry(b) * rz(c); }

Mat4 kron(const Mat2& a, const Mat2& b) {
  Mat4 m;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return m;
}

Mat2 bloch(const Eigen::Vector3d& v, double scale_identity) {
  return scale_identity * Mat2::Identity() + v(0) * pauli_matrix(Pauli::X) +
         v(1) * pauli_matrix(Pauli::Y) + v(2) * pauli_matrix(Pauli::Z);
}

Eigen::Matrix3d euler_zyz(double a, double b, double c) {
  auto rot_z = [](double t) {
    Eigen::Matrix3d m;
    m << std::cos(t), -std::sin(t), 0, std::sin(t), std::cos(t), 0, 0, 0, 1;
    return m;
  };
  Eigen::Matrix3d y;
  y << std::cos(b), 0, std::sin(b), 0, 1, 0, -std::sin(b), 0, std::cos(b);
  return rot_z(a) * y * rot_z(c);
}

uint64_t fnv1a(const void* data, size_t len, uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

int parameter_count(PovmClass cls) { return cls == PovmClass::FourP ? 4 : 8; }

std::string to_string(PovmClass cls) { return cls == PovmClass::FourP ? "4p" : "8p"; }

PovmClass parse_povm_class(const std::string& s) {
  if (s == "4p" || s == "4P") return PovmClass::FourP;
  if (s == "8p" || s == "8P") return PovmClass::EightP;
  throw ConfigError("unknown POVM class '" + s + "'");
}

Effects effects_4p(std::span<const double> p) {
  if (p.size() != 4) throw ParameterError("4P needs 4 parameters");
  for (double v : p)
    if (!std::isfinite(v)) throw ParameterError("non-finite POVM parameter");
  const double t = p[3];
  if (t < 0.0 || t > kMaxStretch) throw ParameterError("4P stretch outside [0, 0.95]");
  const Eigen::Matrix3d rot = euler_zyz(p[0], p[1], p[2]);
  const double s3 = 1.0 / std::sqrt(3.0);
  const Eigen::Vector3d n = rot * Eigen::Vector3d(kTetra[0][0], kTetra[0][1], kTetra[0][2]) * s3;
  Effects e;
  for (int m = 0; m < 4; ++m) {
    const Eigen::Vector3d a = rot * Eigen::Vector3d(kTetra[m][0], kTetra[m][1], kTetra[m][2]) * s3;
    const Mat2 tetra = 0.25 * bloch(a, 1.0);
    const Mat2 proj = m == 0 ? Mat2(0.5 * bloch(n, 1.0)) : Mat2(bloch(-n, 1.0) / 6.0);
    e[m] = (1.0 - t) * tetra + t * proj;
  }
  return e;
}

Effects effects_8p(std::span<const double> p) {
  if (p.size() != 8) throw ParameterError("8P needs 8 parameters");
  for (double v : p)
    if (!std::isfinite(v)) throw ParameterError("non-finite POVM parameter");
  Mat4 cnot = Mat4::Zero();
  cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
  const Mat4 u = kron(ry(p[6]), ry(p[7])) * cnot * kron(r3(p[0], p[1], p[2]), r3(p[3], p[4], p[5]));
  Effects e;
  for (int m = 0; m < 4; ++m) {
    Eigen::Vector2cd v(std::conj(u(m, 0)), std::conj(u(m, 2)));
    e[m] = v * v.adjoint();
  }
  return e;
}

std::vector<double> symmetric_parameters(PovmClass cls) {
  if (cls == PovmClass::FourP) return {0.0, 0.0, 0.0, 0.0};
  // solved once numerically (residual below 1e-30), then pinned
  return {1.5707963267948966,  -1.5707963267948966, 1.5707963267948966, 2.3561944901923448,
          -2.1862760354652839, 1.4804277780331709,  1.5707963267948966, 0.0};
}

ProductPovm::ProductPovm(PovmClass cls, std::vector<std::vector<double>> params)
    : cls_(cls), params_(std::move(params)) {
  if (params_.empty() || params_.size() > 32) throw ParameterError("qubit count out of range");
  effects_.reserve(params_.size());
  uint64_t h = 0xcbf29ce484222325ULL;
  const int c = static_cast<int>(cls_);
  h = fnv1a(&c, sizeof c, h);
  for (const auto& qp : params_) {
    if (static_cast<int>(qp.size()) != parameter_count(cls_))
      throw ParameterError("wrong parameter count for " + to_string(cls_));
    effects_.push_back(cls_ == PovmClass::FourP ? effects_4p(qp) : effects_8p(qp));
    h = fnv1a(qp.data(), qp.size() * sizeof(double), h);
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  id_ = buf;
}

ProductPovm ProductPovm::symmetric(PovmClass cls, int n_qubits) {
  if (n_qubits <= 0) throw ParameterError("qubit count must be positive");
  return ProductPovm(cls, std::vector<std::vector<double>>(n_qubits, symmetric_parameters(cls)));
}

bool is_valid_povm(const Effects& effects, double tol) {
  Mat2 sum = Mat2::Zero();
  for (const auto& e : effects) {
    if ((e - e.adjoint()).norm() > tol) return false;
    Eigen::SelfAdjointEigenSolver<Mat2> es(e);
    if (es.eigenvalues().minCoeff() < -tol) return false;
    sum += e;
  }
  return (sum - Mat2::Identity()).norm() < tol;
}

QubitDual single_qubit_dual(const Effects& effects) {
  Eigen::Matrix4d f;
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n) f(m, n) = (effects[m] * effects[n]).trace().real();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(f);
  const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > kMaxFrameCondition)
    throw NotInformationallyComplete("single-qubit POVM is not informationally complete");
  const Eigen::Matrix4d finv = f.inverse();
  QubitDual d;
  d.frame_condition = hi / lo;
  for (int m = 0; m < 4; ++m) {
    d.duals[m] = Mat2::Zero();
    for (int n = 0; n < 4; ++n) d.duals[m] += finv(m, n) * effects[n];
    for (int p = 0; p < 4; ++p) {
      const Mat2& s = pauli_matrix(static_cast<Pauli>(p));
      d.omega[m][p] = (d.duals[m] * s).trace().real();
      d.prob[m][p] = 0.5 * (effects[m] * s).trace().real();
    }
  }
  return d;
}

std::vector<QubitDual> dual_frame(const ProductPovm& povm) {
  std::vector<QubitDual> out;
  out.reserve(povm.n_qubits());
  for (int q = 0; q < povm.n_qubits(); ++q) out.push_back(single_qubit_dual(povm.effects(q)));
  return out;
}

}  // namespace qcpt

#include "qcpt/hamiltonians.hpp"

#include <cmath>

#include "qcpt/errors.hpp"

namespace qcpt {

ActiveHamiltonian fold_core(const IntegralSet& ints, const SpacePartition& part) {
  ActiveHamiltonian out;
  const int na = part.n_active();
  out.n_electrons = active_electron_count(part, ints);
  out.ms2 = ints.ms2;
  double e = ints.e_nuc_core;
  for (int i : part.core) {
    e += 2.0 * ints.h(i, i);
    for (int j : part.core) e += 2.0 * ints.g(i, i, j, j) - ints.g(i, j, j, i);
  }
  out.e_const = e;
  out.h_eff = Eigen::MatrixXd::Zero(na, na);
  out.g = Tensor4(na);
  for (int a = 0; a < na; ++a)
    for (int b = 0; b < na; ++b) {
      const int t = part.active[a], u = part.active[b];
      double v = ints.h(t, u);
      for (int i : part.core) v += 2.0 * ints.g(t, u, i, i) - ints.g(t, i, i, u);
      out.h_eff(a, b) = v;
      for (int c = 0; c < na; ++c)
        for (int d = 0; d < na; ++d)
          out.g(a, b, c, d) = ints.g(t, u, part.active[c], part.active[d]);
    }
  return out;
}

Eigen::MatrixXd build_fock(const IntegralSet& ints, const SpacePartition& part,
                           const Eigen::MatrixXd& dm1_active, double tol) {
  const int na = part.n_active();
  if (dm1_active.rows() != na || dm1_active.cols() != na)
    throw InputError("1-RDM dimension differs from the active space");
  const double expected = active_electron_count(part, ints);
  if (std::abs(dm1_active.trace() - expected) > tol)
    throw ConsistencyError("1-RDM trace " + std::to_string(dm1_active.trace()) +
                           " differs from the active electron count");
  const int n = ints.norb;
  Eigen::MatrixXd f = ints.h;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      double v = 0.0;
      for (int i : part.core) v += 2.0 * ints.g(p, q, i, i) - ints.g(p, i, i, q);
      for (int a = 0; a < na; ++a)
        for (int b = 0; b < na; ++b) {
          const int t = part.active[a], u = part.active[b];
          v += dm1_active(a, b) * (ints.g(p, q, t, u) - 0.5 * ints.g(p, t, u, q));
        }
      f(p, q) += v;
    }
  return 0.5 * (f + f.transpose());
}

IntegralSet rotate_integrals(const IntegralSet& ints, const Eigen::MatrixXd& u) {
  const int n = ints.norb;
  IntegralSet out = ints;
  out.h = u.transpose() * ints.h * u;
  // Four quarter transforms, each O(n^5).
  std::vector<double> a = ints.g.data(), b(a.size());
  auto idx = [n](int p, int q, int r, int s) {
    return ((static_cast<size_t>(p) * n + q) * n + r) * n + s;
  };
  for (int pass = 0; pass < 4; ++pass) {
    // transform the last index, then cycle indices (pqrs) -> (spqr)
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q)
        for (int r = 0; r < n; ++r)
          for (int s = 0; s < n; ++s) {
            double v = 0.0;
            for (int k = 0; k < n; ++k) v += a[idx(p, q, r, k)] * u(k, s);
            b[idx(s, p, q, r)] = v;
          }
    std::swap(a, b);
  }
  out.g.data() = a;
  return out;
}

SemicanonicalResult semicanonicalize(const Eigen::MatrixXd& fock, const IntegralSet& ints,
                                     const SpacePartition& part) {
  const int n = ints.norb;
  SemicanonicalResult res;
  res.rotation = Eigen::MatrixXd::Identity(n, n);
  auto diag_block = [&](const std::vector<int>& orbs, Eigen::VectorXd& eps) {
    const int m = static_cast<int>(orbs.size());
    eps.resize(m);
    if (m == 0) return;
    Eigen::MatrixXd blk(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) blk(a, b) = fock(orbs[a], orbs[b]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(blk);
    Eigen::MatrixXd vec = es.eigenvectors();
    // deterministic phase: largest component positive
    for (int c = 0; c < m; ++c) {
      Eigen::Index imax = 0;
      vec.col(c).cwiseAbs().maxCoeff(&imax);
      if (vec(imax, c) < 0) vec.col(c) *= -1.0;
    }
    eps = es.eigenvalues();
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) res.rotation(orbs[a], orbs[b]) = vec(a, b);
  };
  diag_block(part.core, res.energies.core);
  diag_block(part.virt, res.energies.virt);
  res.energies.active.resize(part.n_active());
  for (int a = 0; a < part.n_active(); ++a)
    res.energies.active(a) = fock(part.active[a], part.active[a]);
  res.integrals = rotate_integrals(ints, res.rotation);
  res.fock = res.rotation.transpose() * fock * res.rotation;
  return res;
}

double dyall_expectation(const ActiveHamiltonian& h, const SpinFreeRdms& rdms) {
  const int n = h.n_active();
  if (rdms.n != n || rdms.max_order < 2) throw RankError("need spin-free 1- and 2-RDMs");
  double e = h.e_const;
  for (int t = 0; t < n; ++t)
    for (int u = 0; u < n; ++u) {
      e += h.h_eff(t, u) * rdms.d1(t, u);
      for (int v = 0; v < n; ++v)
        for (int w = 0; w < n; ++w) e += 0.5 * h.g(t, u, v, w) * rdms.d2(t, u, v, w);
    }
  return e;
}

Eigen::MatrixXd dm1_matrix(const SpinFreeRdms& rdms) {
  Eigen::MatrixXd m(rdms.n, rdms.n);
  for (int p = 0; p < rdms.n; ++p)
    for (int q = 0; q < rdms.n; ++q) m(p, q) = rdms.d1(p, q);
  return m;
}

}  // namespace qcpt

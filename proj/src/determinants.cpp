#include "qcpt/determinants.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "qcpt/errors.hpp"

namespace qcpt {

DeterminantBasis DeterminantBasis::build(int n_orbitals, int n_alpha, int n_beta) {
  if (n_orbitals < 0 || n_orbitals > 32) throw ResourceError("at most 32 orbitals");
  if (n_alpha < 0 || n_beta < 0 || n_alpha > n_orbitals || n_beta > n_orbitals)
    throw InputError("electron counts do not fit the orbitals");
  auto strings = [n_orbitals](int k) {
    std::vector<uint64_t> out;
    if (k == 0) return std::vector<uint64_t>{0};
    uint64_t s = (uint64_t{1} << k) - 1;
    const uint64_t limit = uint64_t{1} << n_orbitals;
    while (s < limit) {
      out.push_back(s);
      const uint64_t c = s & -s, r = s + c;
      s = (((r ^ s) >> 2) / c) | r;
    }
    return out;
  };
  auto spread = [](uint64_t v, int shift) {
    uint64_t out = 0;
    for (int p = 0; v; ++p, v >>= 1) out |= (v & 1) << (2 * p + shift);
    return out;
  };
  DeterminantBasis b;
  b.n_orbitals = n_orbitals;
  b.n_alpha = n_alpha;
  b.n_beta = n_beta;
  for (uint64_t a : strings(n_alpha))
    for (uint64_t be : strings(n_beta)) b.dets.push_back(spread(a, 0) | spread(be, 1));
  std::sort(b.dets.begin(), b.dets.end());
  for (size_t i = 0; i < b.dets.size(); ++i) b.index.emplace(b.dets[i], i);
  return b;
}

int apply_string(Determinant& det, std::span<const int> indices, std::span<const bool> dagger) {
  int sign = 1;
  for (size_t k = indices.size(); k-- > 0;) {
    const uint64_t bit = uint64_t{1} << indices[k];
    if (dagger[k] == static_cast<bool>(det & bit)) return 0;
    if (std::popcount(det & (bit - 1)) & 1) sign = -sign;
    det ^= bit;
  }
  return sign;
}

namespace {

// H|det> over active spin orbitals with the folded one-body part.
void apply_active(const ActiveHamiltonian& h, Determinant det, double coef, DetVector& out) {
  const int n = h.n_active();
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      const double v = h.h_eff(p, q);
      if (std::abs(v) < 1e-14) continue;
      for (int s = 0; s < 2; ++s) {
        Determinant d = det;
        const int idx[2] = {2 * p + s, 2 * q + s};
        const bool dag[2] = {true, false};
        if (const int sg = apply_string(d, idx, dag)) out[d] += sg * v * coef;
      }
    }
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
          const double v = h.g(p, q, r, s);
          if (std::abs(v) < 1e-14) continue;
          for (int sa = 0; sa < 2; ++sa)
            for (int sb = 0; sb < 2; ++sb) {
              Determinant d = det;
              const int idx[4] = {2 * p + sa, 2 * r + sb, 2 * s + sb, 2 * q + sa};
              const bool dag[4] = {true, true, false, false};
              if (const int sg = apply_string(d, idx, dag)) out[d] += 0.5 * sg * v * coef;
            }
        }
}

}  // namespace

CasciResult casci_solve(const ActiveHamiltonian& h) {
  const int n = h.n_active();
  if ((h.n_electrons + h.ms2) % 2 != 0) throw InputError("electron count and MS2 parity differ");
  const int na = (h.n_electrons + h.ms2) / 2, nb = (h.n_electrons - h.ms2) / 2;
  CasciResult res;
  res.ci.basis = DeterminantBasis::build(n, na, nb);
  const size_t dim = res.ci.basis.size();
  if (dim > kMaxDenseCiDimension) throw ResourceError("active space too large for dense diagonalisation");
  Eigen::MatrixXd hm = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (size_t j = 0; j < dim; ++j) {
    DetVector col;
    apply_active(h, res.ci.basis.dets[j], 1.0, col);
    for (const auto& [d, v] : col) {
      auto it = res.ci.basis.index.find(d);
      if (it == res.ci.basis.index.end()) throw InternalError("Hamiltonian left the determinant space");
      hm(static_cast<Eigen::Index>(it->second), static_cast<Eigen::Index>(j)) += v;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hm);
  res.energy = es.eigenvalues()(0) + h.e_const;
  res.ci.coeffs = es.eigenvectors().col(0);
  Eigen::Index imax = 0;
  res.ci.coeffs.cwiseAbs().maxCoeff(&imax);
  if (res.ci.coeffs(imax) < 0) res.ci.coeffs *= -1.0;
  return res;
}

StateVector ci_to_state(const CIVector& ci) {
  StateVector s(2 * ci.basis.n_orbitals);
  s.amplitudes()[0] = 0.0;
  for (size_t i = 0; i < ci.basis.size(); ++i) s.amplitudes()[ci.basis.dets[i]] = ci.coeffs(static_cast<Eigen::Index>(i));
  return s;
}

RdmSet oracle_rdms(const CIVector& ci, int max_order) {
  const int n = 2 * ci.basis.n_orbitals;
  RdmSet out(n, max_order, false);
  std::vector<int> idx;
  std::vector<char> dag;
  for (int k = 1; k <= max_order; ++k) {
    const size_t m = out.tuple_count(k);
    for (size_t rc = 0; rc < m; ++rc) {
      const auto c = RdmSet::unrank(k, rc);
      for (size_t ra = 0; ra < m; ++ra) {
        const auto a = RdmSet::unrank(k, ra);
        idx.assign(c.begin(), c.end());
        idx.insert(idx.end(), a.rbegin(), a.rend());
        bool dg[8];
        for (int i = 0; i < 2 * k; ++i) dg[i] = i < k;
        double v = 0.0;
        for (size_t i = 0; i < ci.basis.size(); ++i) {
          const double ci_i = ci.coeffs(static_cast<Eigen::Index>(i));
          if (ci_i == 0.0) continue;
          Determinant d = ci.basis.dets[i];
          const int sg = apply_string(d, idx, std::span<const bool>(dg, 2 * k));
          if (!sg) continue;
          auto it = ci.basis.index.find(d);
          if (it != ci.basis.index.end()) v += sg * ci_i * ci.coeffs(static_cast<Eigen::Index>(it->second));
        }
        out.values(k)[out.slot(k, rc, ra)] = v;
      }
    }
  }
  return out;
}

}  // namespace qcpt

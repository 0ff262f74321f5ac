#include "qcpt/fois_oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "qcpt/errors.hpp"

namespace qcpt {

namespace {

double dot(const DetVector& a, const DetVector& b) {
  double s = 0.0;
  for (const auto& [d, v] : a) {
    auto it = b.find(d);
    if (it != b.end()) s += v * it->second;
  }
  return s;
}

void apply_terms(Determinant det, double coef, int n, const std::vector<int>& orbitals,
                 const auto& h1, const auto& g2, DetVector& out) {
  for (int p : orbitals)
    for (int q : orbitals) {
      const double v = h1(p, q);
      if (v == 0.0) continue;
      for (int s = 0; s < 2; ++s) {
        Determinant d = det;
        const int idx[2] = {2 * p + s, 2 * q + s};
        const bool dag[2] = {true, false};
        if (const int sg = apply_string(d, idx, dag)) out[d] += sg * v * coef;
      }
    }
  for (int p : orbitals)
    for (int q : orbitals)
      for (int r : orbitals)
        for (int s : orbitals) {
          const double v = g2(p, q, r, s);
          if (v == 0.0) continue;
          for (int sa = 0; sa < 2; ++sa)
            for (int sb = 0; sb < 2; ++sb) {
              Determinant d = det;
              const int idx[4] = {2 * p + sa, 2 * r + sb, 2 * s + sb, 2 * q + sa};
              const bool dag[4] = {true, true, false, false};
              if (const int sg = apply_string(d, idx, dag)) out[d] += 0.5 * sg * v * coef;
            }
        }
  (void)n;
}

}  // namespace

DetVector embed_reference(const CIVector& ci, const SpacePartition& part) {
  Determinant core = 0;
  for (int i : part.core) core |= Determinant{3} << (2 * i);
  DetVector out;
  for (size_t k = 0; k < ci.basis.size(); ++k) {
    const Determinant a = ci.basis.dets[k];
    Determinant d = core;
    for (int t = 0; t < part.n_active(); ++t)
      for (int s = 0; s < 2; ++s)
        if ((a >> (2 * t + s)) & 1) d |= Determinant{1} << (2 * part.active[t] + s);
    out[d] += ci.coeffs(static_cast<Eigen::Index>(k));
  }
  return out;
}

DetVector apply_full_hamiltonian(const DetVector& v, const IntegralSet& ints) {
  if (ints.norb > 32) throw ResourceError("at most 32 orbitals");
  std::vector<int> all(ints.norb);
  for (int p = 0; p < ints.norb; ++p) all[p] = p;
  auto h1 = [&](int p, int q) { return ints.h(p, q); };
  auto g2 = [&](int p, int q, int r, int s) { return ints.g(p, q, r, s); };
  DetVector out;
  for (const auto& [d, c] : v) {
    if (c == 0.0) continue;
    out[d] += ints.e_nuc_core * c;
    apply_terms(d, c, ints.norb, all, h1, g2, out);
  }
  return out;
}

std::map<LabelKey, ProjectedComponent> project_classes(const DetVector& hphi, const SpacePartition& part,
                                                       DetVector* reference_part) {
  std::vector<int> core_pos(64, -1), virt_pos(64, -1);
  for (int k = 0; k < part.n_core(); ++k) core_pos[part.core[k]] = k;
  for (int k = 0; k < part.n_virtual(); ++k) virt_pos[part.virt[k]] = k;
  std::map<LabelKey, ProjectedComponent> out;
  for (const auto& [d, c] : hphi) {
    std::vector<int> holes, parts;
    for (int i : part.core)
      for (int s = 0; s < 2; ++s)
        if (!((d >> (2 * i + s)) & 1)) holes.push_back(core_pos[i]);
    for (int r : part.virt)
      for (int s = 0; s < 2; ++s)
        if ((d >> (2 * r + s)) & 1) parts.push_back(virt_pos[r]);
    if (holes.empty() && parts.empty()) {
      if (reference_part) (*reference_part)[d] += c;
      continue;
    }
    if (holes.size() > 2 || parts.size() > 2)
      throw InternalError("H|phi> reached a determinant beyond double excitations");
    std::sort(holes.begin(), holes.end());
    std::sort(parts.begin(), parts.end());
    const PerturberClass cls = class_from_counts(static_cast<int>(holes.size()), static_cast<int>(parts.size()));
    auto [it, fresh] = out.try_emplace({holes, parts}, ProjectedComponent{cls, {}});
    it->second.vec[d] += c;
  }
  return out;
}

OracleReport oracle_nevpt2(const IntegralSet& ints, const SpacePartition& part, const CIVector& ci,
                           const OrbitalEnergies& eps) {
  const int n = ints.norb;
  if (eps.core.size() != part.n_core() || eps.virt.size() != part.n_virtual())
    throw InputError("orbital energies do not match the partition");
  const double norm = ci.coeffs.norm();
  if (std::abs(norm - 1.0) > 1e-10) throw InputError("CI vector is not normalised");

  OracleReport rep;
  const DetVector phi = embed_reference(ci, part);
  const DetVector hphi = apply_full_hamiltonian(phi, ints);
  rep.e0 = dot(phi, hphi);
  for (const auto& [d, c] : hphi) rep.hphi_norm2 += c * c;

  // Generalised Fock diagonal from the reference density, as a semicanonical check.
  Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [d, c] : phi)
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q)
        for (int s = 0; s < 2; ++s) {
          Determinant e = d;
          const int idx[2] = {2 * p + s, 2 * q + s};
          const bool dag[2] = {true, false};
          const int sg = apply_string(e, idx, dag);
          if (!sg) continue;
          auto it = phi.find(e);
          if (it != phi.end()) gamma(p, q) += sg * c * it->second;
        }
  auto fock = [&](int p, int q) {
    double f = ints.h(p, q);
    for (int r = 0; r < n; ++r)
      for (int s = 0; s < n; ++s) f += gamma(r, s) * (ints.g(p, q, r, s) - 0.5 * ints.g(p, s, r, q));
    return f;
  };
  auto check_block = [&](const std::vector<int>& orbs, const Eigen::VectorXd& e) {
    for (size_t a = 0; a < orbs.size(); ++a)
      for (size_t b = 0; b < orbs.size(); ++b) {
        const double f = fock(orbs[a], orbs[b]);
        const double want = a == b ? e(static_cast<Eigen::Index>(a)) : 0.0;
        if (std::abs(f - want) > 1e-7) throw ConsistencyError("integrals are not semicanonical for these energies");
      }
  };
  check_block(part.core, eps.core);
  check_block(part.virt, eps.virt);

  // Dyall operator: C + sum_ext eps n + H_act (core folded by hand here, not via fold_core)
  Eigen::MatrixXd heff = ints.h;
  for (int t : part.active)
    for (int u : part.active) {
      double v = ints.h(t, u);
      for (int i : part.core) v += 2.0 * ints.g(t, u, i, i) - ints.g(t, i, i, u);
      heff(t, u) = v;
    }
  auto h1 = [&](int p, int q) { return heff(p, q); };
  auto g2 = [&](int p, int q, int r, int s) { return ints.g(p, q, r, s); };
  auto apply_hact = [&](const DetVector& v) {
    DetVector out;
    for (const auto& [d, c] : v) apply_terms(d, c, n, part.active, h1, g2, out);
    return out;
  };
  auto ext_energy = [&](Determinant d) {
    double e = 0.0;
    for (int k = 0; k < part.n_core(); ++k)
      for (int s = 0; s < 2; ++s)
        if ((d >> (2 * part.core[k] + s)) & 1) e += eps.core(k);
    for (int k = 0; k < part.n_virtual(); ++k)
      for (int s = 0; s < 2; ++s)
        if ((d >> (2 * part.virt[k] + s)) & 1) e += eps.virt(k);
    return e;
  };
  double ref_ext = 0.0;
  for (int k = 0; k < part.n_core(); ++k) ref_ext += 2.0 * eps.core(k);
  const double c_shift = rep.e0 - ref_ext - dot(phi, apply_hact(phi));

  DetVector ref_part;
  const auto comps = project_classes(hphi, part, &ref_part);
  for (const auto& [d, c] : ref_part) rep.reference_norm2 += c * c;
  for (const auto& [key, comp] : comps) {
    OracleLabel lab;
    lab.cls = comp.cls;
    lab.holes = key.first;
    lab.particles = key.second;
    for (const auto& [d, c] : comp.vec) lab.norm += c * c;
    if (lab.norm == 0.0) continue;
    double hd = dot(comp.vec, apply_hact(comp.vec));
    for (const auto& [d, c] : comp.vec) hd += (c_shift + ext_energy(d)) * c * c;
    lab.energy = hd / lab.norm;
    lab.contribution = lab.norm / (rep.e0 - lab.energy);
    rep.class_e2[static_cast<int>(lab.cls)] += lab.contribution;
    rep.e2 += lab.contribution;
    rep.labels.push_back(std::move(lab));
  }
  return rep;
}

}  // namespace qcpt

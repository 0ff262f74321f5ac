#include "qcpt/sc_nevpt2.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

#include "qcpt/errors.hpp"
#include "qcpt/fermion_algebra.hpp"

namespace qcpt {

std::string class_name(PerturberClass cls) {
  switch (cls) {
    case PerturberClass::IJRS: return "S(ijrs,0)";
    case PerturberClass::IJR: return "S(ijr,+1)";
    case PerturberClass::IRS: return "S(irs,-1)";
    case PerturberClass::IJ: return "S(ij,+2)";
    case PerturberClass::RS: return "S(rs,-2)";
    case PerturberClass::IR: return "S(ir,0)";
    case PerturberClass::I: return "S(i,+1)";
    case PerturberClass::R: return "S(r,-1)";
  }
  return "?";
}

int active_electron_change(PerturberClass cls) {
  switch (cls) {
    case PerturberClass::IJRS: return 0;
    case PerturberClass::IJR: return 1;
    case PerturberClass::IRS: return -1;
    case PerturberClass::IJ: return 2;
    case PerturberClass::RS: return -2;
    case PerturberClass::IR: return 0;
    case PerturberClass::I: return 1;
    case PerturberClass::R: return -1;
  }
  return 0;
}

int required_rdm_order(PerturberClass cls) {
  switch (cls) {
    case PerturberClass::IJRS: return 1;
    case PerturberClass::IJR:
    case PerturberClass::IRS: return 2;
    case PerturberClass::IJ:
    case PerturberClass::RS:
    case PerturberClass::IR: return 3;
    case PerturberClass::I:
    case PerturberClass::R: return 4;
  }
  return 4;
}

PerturberClass class_from_counts(int holes, int particles) {
  if (holes == 2 && particles == 2) return PerturberClass::IJRS;
  if (holes == 2 && particles == 1) return PerturberClass::IJR;
  if (holes == 1 && particles == 2) return PerturberClass::IRS;
  if (holes == 2 && particles == 0) return PerturberClass::IJ;
  if (holes == 0 && particles == 2) return PerturberClass::RS;
  if (holes == 1 && particles == 1) return PerturberClass::IR;
  if (holes == 1 && particles == 0) return PerturberClass::I;
  if (holes == 0 && particles == 1) return PerturberClass::R;
  throw InternalError("external pattern with " + std::to_string(holes) + " holes and " +
                      std::to_string(particles) + " particles is outside the first-order space");
}

namespace {

enum Space : int { kVirt = 0, kCore = 1, kAct = 2 };

struct Orbitals {
  std::vector<int> space;  // per spatial orbital
  std::vector<int> local;  // position within its block
  uint64_t core_mask = 0;  // spin orbitals
  uint64_t virt_mask = 0;
};

Orbitals classify(const SpacePartition& part, int norb) {
  Orbitals o;
  o.space.assign(norb, -1);
  o.local.assign(norb, -1);
  auto mark = [&](const std::vector<int>& orbs, int sp, uint64_t* mask) {
    for (size_t k = 0; k < orbs.size(); ++k) {
      o.space[orbs[k]] = sp;
      o.local[orbs[k]] = static_cast<int>(k);
      if (mask) *mask |= uint64_t{3} << (2 * orbs[k]);
    }
  };
  mark(part.core, kCore, &o.core_mask);
  mark(part.active, kAct, nullptr);
  mark(part.virt, kVirt, &o.virt_mask);
  for (int s : o.space)
    if (s < 0) throw InputError("partition does not cover every orbital");
  return o;
}

using ExtKey = std::pair<uint64_t, uint64_t>;  // hole mask, particle mask (full spin orbitals)

// Spin-orbital terms of the full Hamiltonian, split into the external determinant they
// create from the closed core and the active operator left over.
std::map<ExtKey, Poly> external_buckets(const IntegralSet& ints, const Orbitals& orb, PerturberClass want) {
  const int n = ints.norb;
  std::map<ExtKey, Poly> buckets;
  struct Term {
    int idx[4];
    bool dag[4];
    int len;
  };
  auto process = [&](const Term& t, double coef) {
    int n_ext = 0;
    for (int i = 0; i < t.len; ++i) n_ext += orb.space[t.idx[i] / 2] != kAct;
    if (n_ext == 0) return;
    // stable sort by space (virtual, core, active), tracking the permutation sign
    int order[4], len = t.len;
    for (int i = 0; i < len; ++i) order[i] = i;
    int parity = 0;
    for (int i = 1; i < len; ++i)
      for (int j = i; j > 0 && orb.space[t.idx[order[j - 1]] / 2] > orb.space[t.idx[order[j]] / 2]; --j) {
        std::swap(order[j - 1], order[j]);
        ++parity;
      }
    uint64_t occ = orb.core_mask;
    int sign = (parity & 1) ? -1 : 1;
    int first_active = len;
    for (int i = 0; i < len; ++i)
      if (orb.space[t.idx[order[i]] / 2] == kAct) {
        first_active = i;
        break;
      }
    for (int i = first_active - 1; i >= 0; --i) {
      const int so = t.idx[order[i]];
      const uint64_t bit = uint64_t{1} << so;
      const bool d = t.dag[order[i]];
      if (d == static_cast<bool>(occ & bit)) return;
      if (std::popcount(occ & (bit - 1)) & 1) sign = -sign;
      occ ^= bit;
    }
    const uint64_t holes = orb.core_mask & ~occ;
    const uint64_t parts = occ & orb.virt_mask;
    if (holes == 0 && parts == 0) return;
    const int h = std::popcount(holes), p = std::popcount(parts);
    if (h > 2 || p > 2) return;
    if (class_from_counts(h, p) != want) return;
    OpString act;
    for (int i = first_active; i < len; ++i) {
      const int so = t.idx[order[i]];
      act.push(2 * orb.local[so / 2] + (so & 1), t.dag[order[i]]);
    }
    normal_order(act, sign * coef, buckets[{holes, parts}]);
  };
  const double tol = 1e-14;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      if (std::abs(ints.h(p, q)) < tol) continue;
      for (int s = 0; s < 2; ++s) process(Term{{2 * p + s, 2 * q + s}, {true, false}, 2}, ints.h(p, q));
    }
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
          const double v = ints.g(p, q, r, s);
          if (std::abs(v) < tol) continue;
          for (int sa = 0; sa < 2; ++sa)
            for (int sb = 0; sb < 2; ++sb) {
              const int a = 2 * p + sa, b = 2 * r + sb, c = 2 * s + sb, d = 2 * q + sa;
              if (a == b || c == d) continue;
              process(Term{{a, b, c, d}, {true, true, false, false}, 4}, 0.5 * v);
            }
        }
  for (auto& [k, poly] : buckets)
    for (auto it = poly.begin(); it != poly.end();)
      it = std::abs(it->second) < 1e-14 ? poly.erase(it) : std::next(it);
  return buckets;
}

// Leibniz expansion of [H_act, O] over active spin orbitals.
class ActiveCommutator {
 public:
  explicit ActiveCommutator(const ActiveHamiltonian& h) : h_(h), n_(2 * h.n_active()) {}

  Poly apply(const OpString& o) const {
    Poly out;
    for (int j = 0; j < o.len; ++j) {
      const int t = o.ops[j].index;
      const bool dag = o.ops[j].dagger;
      auto emit = [&](const OpString& mid, double c) {
        OpString s;
        for (int i = 0; i < j; ++i) s.push(o.ops[i].index, o.ops[i].dagger);
        s.append(mid);
        for (int i = j + 1; i < o.len; ++i) s.push(o.ops[i].index, o.ops[i].dagger);
        normal_order(s, c, out);
      };
      // [H, a_t] = -sum h_tq a_q - sum g_tqrs a+_r a_s a_q
      // [H, a+_t] = sum h_tq a+_q + sum g_tqrs a+_q a+_s a_r
      const double sgn = dag ? 1.0 : -1.0;
      for (int q = 0; q < n_; ++q) {
        if ((q & 1) != (t & 1)) continue;
        const double hv = h_.h_eff(t / 2, q / 2);
        if (std::abs(hv) > 1e-14) {
          OpString mid;
          mid.push(q, dag);
          emit(mid, sgn * hv);
        }
        for (int r = 0; r < n_; ++r)
          for (int s = 0; s < n_; ++s) {
            if ((r & 1) != (s & 1)) continue;
            const double gv = h_.g(t / 2, q / 2, r / 2, s / 2);
            if (std::abs(gv) < 1e-14) continue;
            OpString mid;
            if (dag) {
              mid.push(q, true);
              mid.push(s, true);
              mid.push(r, false);
            } else {
              mid.push(r, true);
              mid.push(s, false);
              mid.push(q, false);
            }
            emit(mid, sgn * gv);
          }
      }
    }
    for (auto it = out.begin(); it != out.end();)
      it = std::abs(it->second) < 1e-14 ? out.erase(it) : std::next(it);
    return out;
  }

 private:
  const ActiveHamiltonian& h_;
  int n_;
};

struct Sector {
  std::vector<MonoKey> basis;
  std::map<MonoKey, int> index;
  Eigen::MatrixXd s, a;
};

int64_t sector_of(MonoKey k) {
  const uint32_t c = creation_mask(k), a = annihilation_mask(k);
  const int dn = std::popcount(c) - std::popcount(a);
  const int dsz = std::popcount(c & 0x55555555u) - std::popcount(c & 0xAAAAAAAAu) -
                  std::popcount(a & 0x55555555u) + std::popcount(a & 0xAAAAAAAAu);
  return static_cast<int64_t>(dn + 16) * 64 + (dsz + 16);
}

void build_sector(Sector& sec, const ActiveCommutator& comm, const RdmSet& rdms) {
  const int m = static_cast<int>(sec.basis.size());
  std::vector<OpString> strings(m), adjoints(m);
  for (int i = 0; i < m; ++i) {
    strings[i] = monomial_string(sec.basis[i]);
    adjoints[i] = strings[i].adjoint();
  }
  sec.s.resize(m, m);
  for (int x = 0; x < m; ++x)
    for (int y = x; y < m; ++y) {
      OpString s = adjoints[x];
      s.append(strings[y]);
      sec.s(x, y) = sec.s(y, x) = expectation(s, rdms);
    }
  // A_xy = <O_x+ [H, O_y]> = sum_T G(x,T) C(T,y)
  std::map<MonoKey, int> t_index;
  std::vector<std::vector<std::pair<int, double>>> cols(m);
  for (int y = 0; y < m; ++y)
    for (const auto& [key, c] : comm.apply(strings[y])) {
      auto [it, fresh] = t_index.emplace(key, static_cast<int>(t_index.size()));
      cols[y].emplace_back(it->second, c);
    }
  std::vector<OpString> t_strings(t_index.size());
  for (const auto& [key, i] : t_index) t_strings[i] = monomial_string(key);
  Eigen::MatrixXd g(m, static_cast<Eigen::Index>(t_strings.size()));
  for (int x = 0; x < m; ++x)
    for (size_t t = 0; t < t_strings.size(); ++t) {
      OpString s = adjoints[x];
      s.append(t_strings[t]);
      g(x, static_cast<Eigen::Index>(t)) = expectation(s, rdms);
    }
  sec.a = Eigen::MatrixXd::Zero(m, m);
  for (int y = 0; y < m; ++y)
    for (const auto& [t, c] : cols[y]) sec.a.col(y) += c * g.col(t);
}

}  // namespace

ClassResult class_contribution(PerturberClass cls, const Nevpt2Inputs& in) {
  ClassResult res;
  res.cls = cls;
  const int na = in.partition.n_active();
  if (in.rdms.n_spin_orbitals() != 2 * na) throw InputError("RDMs do not match the active space");
  const int need = std::min(required_rdm_order(cls), 2 * na);
  if (in.rdms.max_order() < need)
    throw RankError(class_name(cls) + " needs RDMs up to order " + std::to_string(need));
  if (in.active_h.n_active() != na) throw InputError("active Hamiltonian does not match the partition");
  if (in.eps.core.size() != in.partition.n_core() || in.eps.virt.size() != in.partition.n_virtual())
    throw InputError("orbital energies do not match the partition");

  const Orbitals orb = classify(in.partition, in.integrals.norb);
  const auto buckets = external_buckets(in.integrals, orb, cls);
  if (buckets.empty()) return res;

  // union basis per sector
  std::map<int64_t, Sector> sectors;
  for (const auto& [ext, poly] : buckets)
    for (const auto& [key, c] : poly) {
      Sector& sec = sectors[sector_of(key)];
      if (sec.index.emplace(key, static_cast<int>(sec.basis.size())).second) sec.basis.push_back(key);
    }
  const ActiveCommutator comm(in.active_h);
  for (auto& [id, sec] : sectors) build_sector(sec, comm, in.rdms);

  // group external determinants by spatial label
  struct Acc {
    double norm = 0.0, a = 0.0;
  };
  std::map<std::pair<std::vector<int>, std::vector<int>>, Acc> labels;
  for (const auto& [ext, poly] : buckets) {
    if (poly.empty()) continue;
    const Sector& sec = sectors.at(sector_of(poly.begin()->first));
    Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sec.basis.size()));
    for (const auto& [key, v] : poly) c(sec.index.at(key)) = v;
    std::vector<int> holes, parts;
    for (uint64_t m = ext.first; m; m &= m - 1) holes.push_back(orb.local[std::countr_zero(m) / 2]);
    for (uint64_t m = ext.second; m; m &= m - 1) parts.push_back(orb.local[std::countr_zero(m) / 2]);
    std::sort(holes.begin(), holes.end());
    std::sort(parts.begin(), parts.end());
    Acc& acc = labels[{holes, parts}];
    acc.norm += c.dot(sec.s * c);
    acc.a += c.dot(sec.a * c);
  }

  for (const auto& [key, acc] : labels) {
    LabelContribution lc;
    lc.holes = key.first;
    lc.particles = key.second;
    double de = 0.0;
    for (int i : lc.holes) de -= in.eps.core(i);
    for (int r : lc.particles) de += in.eps.virt(r);
    double norm = acc.norm;
    if (norm < kNormFloor) ++res.clamped_norms;
    if (norm < 0.0) norm = 0.0;
    lc.norm = norm;
    if (norm > 0.0) {
      lc.energy = in.e0 + de + acc.a / norm;
      lc.contribution = norm / (in.e0 - lc.energy);
      if (std::abs(in.e0 - lc.energy) < kIntruderThreshold) ++res.intruders;
    } else {
      lc.energy = in.e0 + de;
    }
    res.e2 += lc.contribution;
    res.labels.push_back(std::move(lc));
  }
  return res;
}

Nevpt2Report e2_total(const std::array<ClassResult, 8>& classes, double e0) {
  Nevpt2Report rep;
  rep.e0 = e0;
  rep.classes = classes;
  for (const auto& c : classes) {
    rep.e2 += c.e2;
    if (c.intruders > 0)
      rep.warnings.push_back(class_name(c.cls) + ": " + std::to_string(c.intruders) +
                             " perturber(s) within the intruder threshold");
    if (c.clamped_norms > 0)
      rep.warnings.push_back(class_name(c.cls) + ": " + std::to_string(c.clamped_norms) +
                             " negative norm(s) clamped to zero");
  }
  if (rep.e2 > 0.0) rep.warnings.push_back("second-order correction is positive");
  return rep;
}

Nevpt2Report sc_nevpt2(const IntegralSet& semicanonical, const SpacePartition& part,
                       const OrbitalEnergies& eps, const RdmSet& rdms) {
  const ActiveHamiltonian act = fold_core(semicanonical, part);
  const double e0 = dyall_expectation(act, spin_trace(rdms, 2));
  const Nevpt2Inputs in{semicanonical, part, act, eps, rdms, e0};
  std::array<ClassResult, 8> classes;
  for (int c = 0; c < kPerturberClassCount; ++c) classes[c] = class_contribution(kAllPerturberClasses[c], in);
  return e2_total(classes, e0);
}

}  // namespace qcpt

#include "qcpt/rdm.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "qcpt/errors.hpp"

namespace qcpt {

namespace {

constexpr int kMaxIndex = 64;

const std::vector<std::vector<uint64_t>>& binomials() {
  static const auto table = [] {
    std::vector<std::vector<uint64_t>> t(kMaxIndex + 1, std::vector<uint64_t>(kMaxIndex + 1, 0));
    for (int n = 0; n <= kMaxIndex; ++n) {
      t[n][0] = 1;
      for (int k = 1; k <= n; ++k) t[n][k] = t[n - 1][k - 1] + (k <= n - 1 ? t[n - 1][k] : 0);
    }
    return t;
  }();
  return table;
}

}  // namespace

uint64_t RdmSet::binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  return binomials()[n][k];
}

RdmSet::RdmSet(int n_spin_orbitals, int max_order, bool estimated)
    : n_(n_spin_orbitals), max_order_(max_order), estimated_(estimated) {
  if (n_ <= 0 || n_ > kMaxIndex) throw InputError("spin orbital count out of range");
  if (max_order_ < 1 || max_order_ > 4) throw RankError("RDM order must be 1..4");
  values_.resize(max_order_ + 1);
  errors_.resize(max_order_ + 1);
  for (int k = 1; k <= max_order_; ++k) {
    const size_t m = tuple_count(k);
    values_[k].assign(m * m, 0.0);
    errors_[k].assign(m * m, 0.0);
  }
}

size_t RdmSet::tuple_count(int k) const { return binomial(n_, k); }

size_t RdmSet::rank(std::span<const int> sorted) {
  size_t r = 0;
  for (size_t i = 0; i < sorted.size(); ++i) r += binomial(sorted[i], static_cast<int>(i) + 1);
  return r;
}

std::vector<int> RdmSet::unrank(int k, size_t r) {
  std::vector<int> out(k);
  for (int i = k; i >= 1; --i) {
    int c = i - 1;
    while (binomial(c + 1, i) <= r) ++c;
    out[i - 1] = c;
    r -= binomial(c, i);
  }
  return out;
}

int RdmSet::sort_with_sign(std::span<const int> in, int* out) {
  const size_t k = in.size();
  std::copy(in.begin(), in.end(), out);
  int sign = 1;
  for (size_t i = 1; i < k; ++i)
    for (size_t j = i; j > 0 && out[j - 1] >= out[j]; --j) {
      if (out[j - 1] == out[j]) return 0;
      std::swap(out[j - 1], out[j]);
      sign = -sign;
    }
  for (size_t i = 1; i < k; ++i)
    if (out[i - 1] == out[i]) return 0;
  return sign;
}

double RdmSet::lookup(const std::vector<std::vector<double>>& table, std::span<const int> cre,
                      std::span<const int> ann, bool signed_lookup) const {
  const int k = static_cast<int>(cre.size());
  if (k != static_cast<int>(ann.size())) throw RankError("creation/annihilation counts differ");
  if (k == 0) return signed_lookup ? 1.0 : 0.0;
  if (k > max_order_) throw RankError("requested order exceeds the stored RDMs");
  std::array<int, 8> c{}, a{};
  for (int i = 0; i < k; ++i)
    if (cre[i] < 0 || cre[i] >= n_ || ann[i] < 0 || ann[i] >= n_)
      throw InputError("RDM index out of range");
  const int sc = sort_with_sign(cre, c.data());
  const int sa = sort_with_sign(ann, a.data());
  if (sc == 0 || sa == 0) return 0.0;
  const double v = table[k][slot(k, rank({c.data(), static_cast<size_t>(k)}),
                                 rank({a.data(), static_cast<size_t>(k)}))];
  return signed_lookup ? sc * sa * v : v;
}

double RdmSet::get(std::span<const int> cre, std::span<const int> ann) const {
  return lookup(values_, cre, ann, true);
}

double RdmSet::std_error(std::span<const int> cre, std::span<const int> ann) const {
  return lookup(errors_, cre, ann, false);
}

double SpinFreeRdms::at(int k, std::span<const int> idx) const {
  size_t off = 0;
  for (int i = 0; i < 2 * k; ++i) off = off * n + idx[i];
  return g[k][off];
}

SpinFreeRdms spin_trace(const RdmSet& rdms, int max_order) {
  if (rdms.n_spin_orbitals() % 2 != 0) throw InputError("odd spin-orbital count");
  if (max_order > rdms.max_order()) throw RankError("spin trace order exceeds stored RDMs");
  SpinFreeRdms out;
  out.n = rdms.n_spin_orbitals() / 2;
  out.max_order = max_order;
  out.g.resize(max_order + 1);
  const int n = out.n;
  for (int k = 1; k <= max_order; ++k) {
    size_t total = 1;
    for (int i = 0; i < 2 * k; ++i) total *= n;
    out.g[k].assign(total, 0.0);
    std::vector<int> idx(2 * k), cre(k), ann(k);
    for (size_t flat = 0; flat < total; ++flat) {
      size_t rem = flat;
      for (int i = 2 * k - 1; i >= 0; --i) {
        idx[i] = static_cast<int>(rem % n);
        rem /= n;
      }
      double sum = 0.0;
      for (int spins = 0; spins < (1 << k); ++spins) {
        for (int i = 0; i < k; ++i) {
          const int s = (spins >> i) & 1;
          cre[i] = 2 * idx[2 * i] + s;
          ann[i] = 2 * idx[2 * i + 1] + s;
        }
        sum += rdms.get(cre, ann);
      }
      out.g[k][flat] = sum;
    }
  }
  return out;
}

double rdm_trace(const RdmSet& rdms, int k) {
  const size_t m = rdms.tuple_count(k);
  double t = 0.0;
  for (size_t r = 0; r < m; ++r) t += rdms.values(k)[rdms.slot(k, r, r)];
  return t;
}

void write_rdms(const std::filesystem::path& prefix, const RdmSet& rdms) {
  auto bin = prefix;
  bin += ".bin";
  auto hdr = prefix;
  hdr += ".json";
  std::ofstream out(bin, std::ios::binary);
  if (!out) throw IoError("cannot write " + bin.string());
  nlohmann::json h;
  h["n_spin_orbitals"] = rdms.n_spin_orbitals();
  h["max_order"] = rdms.max_order();
  h["estimated"] = rdms.estimated();
  h["element"] = "D(C;A) = <a+_c1..a+_ck a_ak..a_a1>, spin orbital 2*t+spin";
  h["layout"] =
      "per order k: values then std errors, each a row-major C(N,k) x C(N,k) float64 "
      "matrix, rows = colex rank of increasing C, columns = colex rank of increasing A";
  nlohmann::json orders = nlohmann::json::array();
  size_t offset = 0;
  for (int k = 1; k <= rdms.max_order(); ++k) {
    const auto& v = rdms.values(k);
    const auto& e = rdms.errors(k);
    orders.push_back({{"order", k},
                      {"tuples", rdms.tuple_count(k)},
                      {"values_offset_bytes", offset},
                      {"errors_offset_bytes", offset + v.size() * sizeof(double)}});
    out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(e.data()), static_cast<std::streamsize>(e.size() * sizeof(double)));
    offset += 2 * v.size() * sizeof(double);
  }
  h["orders"] = orders;
  std::ofstream hout(hdr);
  if (!hout) throw IoError("cannot write " + hdr.string());
  hout << h.dump(2) << "\n";
}

RdmSet read_rdms(const std::filesystem::path& prefix) {
  auto bin = prefix;
  bin += ".bin";
  auto hdr = prefix;
  hdr += ".json";
  std::ifstream hin(hdr);
  if (!hin) throw IoError("cannot open " + hdr.string());
  nlohmann::json h;
  try {
    hin >> h;
  } catch (const std::exception& e) {
    throw IoError(std::string("bad RDM header: ") + e.what());
  }
  RdmSet rdms(h.at("n_spin_orbitals").get<int>(), h.at("max_order").get<int>(),
              h.at("estimated").get<bool>());
  std::ifstream in(bin, std::ios::binary);
  if (!in) throw IoError("cannot open " + bin.string());
  for (int k = 1; k <= rdms.max_order(); ++k) {
    auto& v = rdms.values(k);
    auto& e = rdms.errors(k);
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
    in.read(reinterpret_cast<char*>(e.data()), static_cast<std::streamsize>(e.size() * sizeof(double)));
    if (!in) throw IoError("truncated RDM payload " + bin.string());
  }
  return rdms;
}

}  // namespace qcpt

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace qcpt {

// Spin-orbital reduced density matrices up to some order.
//
//   D(C; A) = < a+_{c1} ... a+_{ck} a_{ak} ... a_{a1} >
//
// Only strictly increasing tuples are stored. For order k the table is a
// C(N,k) x C(N,k) matrix indexed by the colex ranks of C and A; everything
// else follows from antisymmetry. Spin orbital 2t+s is spatial t, spin s.
class RdmSet {
 public:
  RdmSet() = default;
  RdmSet(int n_spin_orbitals, int max_order, bool estimated);

  int n_spin_orbitals() const { return n_; }
  int max_order() const { return max_order_; }
  bool estimated() const { return estimated_; }

  // Any index order; repeated indices give zero. Order must be 1..max_order.
  double get(std::span<const int> cre, std::span<const int> ann) const;
  double std_error(std::span<const int> cre, std::span<const int> ann) const;

  size_t tuple_count(int k) const;
  std::vector<double>& values(int k) { return values_.at(k); }
  const std::vector<double>& values(int k) const { return values_.at(k); }
  std::vector<double>& errors(int k) { return errors_.at(k); }
  const std::vector<double>& errors(int k) const { return errors_.at(k); }

  size_t slot(int k, size_t rank_c, size_t rank_a) const { return rank_c * tuple_count(k) + rank_a; }

  // Colex rank of a strictly increasing tuple and its inverse.
  static size_t rank(std::span<const int> sorted);
  static std::vector<int> unrank(int k, size_t r);
  static uint64_t binomial(int n, int k);

 private:
  // Sorts a copy and returns the permutation sign, or 0 on a repeat.
  static int sort_with_sign(std::span<const int> in, int* out);
  double lookup(const std::vector<std::vector<double>>& table, std::span<const int> cre,
                std::span<const int> ann, bool signed_lookup) const;

  int n_ = 0;
  int max_order_ = 0;
  bool estimated_ = false;
  std::vector<std::vector<double>> values_;  // index k = order, [0] unused
  std::vector<std::vector<double>> errors_;
};

// Spin-summed densities over spatial orbitals,
//   G_k[t1 u1 t2 u2 ...] = sum_spins D(t1s1 .. tksk; u1s1 .. uksk),
// so G_2[p q r s] = sum < a+_p a+_r a_s a_q > in the usual chemist layout.
struct SpinFreeRdms {
  int n = 0;
  int max_order = 0;
  std::vector<std::vector<double>> g;  // g[k] dense n^(2k)

  double d1(int p, int q) const { return g[1][static_cast<size_t>(p) * n + q]; }
  double d2(int p, int q, int r, int s) const {
    return g[2][((static_cast<size_t>(p) * n + q) * n + r) * n + s];
  }
  double at(int k, std::span<const int> idx) const;
};

SpinFreeRdms spin_trace(const RdmSet& rdms, int max_order = 2);

// Sum of diagonal elements over increasing tuples; equals binomial(N_electrons, k) for a pure state.
double rdm_trace(const RdmSet& rdms, int k);

// Binary payload (<prefix>.bin) with a JSON header (<prefix>.json).
void write_rdms(const std::filesystem::path& prefix, const RdmSet& rdms);
RdmSet read_rdms(const std::filesystem::path& prefix);

}  // namespace qcpt

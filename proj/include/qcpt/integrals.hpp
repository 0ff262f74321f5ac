#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

namespace qcpt {

// Dense chemist-notation two-electron tensor (pq|rs), stored row-major.
class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(int n) : n_(n), data_(static_cast<size_t>(n) * n * n * n, 0.0) {}

  int dim() const { return n_; }
  double& operator()(int p, int q, int r, int s) { return data_[index(p, q, r, s)]; }
  double operator()(int p, int q, int r, int s) const { return data_[index(p, q, r, s)]; }

  // Writes all eight permutations of a real orbital integral.
  void set_symmetric(int p, int q, int r, int s, double v);

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

 private:
  size_t index(int p, int q, int r, int s) const {
    return ((static_cast<size_t>(p) * n_ + q) * n_ + r) * n_ + s;
  }
  int n_ = 0;
  std::vector<double> data_;
};

struct IntegralSet {
  int norb = 0;
  int n_electrons = 0;
  int ms2 = 0;
  double e_nuc_core = 0.0;
  Eigen::MatrixXd h;  // one-electron, symmetric
  Tensor4 g;          // (pq|rs), eightfold symmetric

  // Throws ConsistencyError when the stored tensors break the real orbital symmetries.
  void check_symmetry(double tol = 1e-10) const;
};

// Core, active and virtual spatial orbitals; together they cover 0..norb-1.
struct SpacePartition {
  std::vector<int> core;
  std::vector<int> active;
  std::vector<int> virt;

  int n_core() const { return static_cast<int>(core.size()); }
  int n_active() const { return static_cast<int>(active.size()); }
  int n_virtual() const { return static_cast<int>(virt.size()); }
};

IntegralSet parse_fcidump(std::istream& in);
IntegralSet read_fcidump(const std::filesystem::path& path);

// Writes unique integrals above 1e-15 in canonical index order, 17 significant digits.
void write_fcidump(std::ostream& out, const IntegralSet& ints);
void write_fcidump(const std::filesystem::path& path, const IntegralSet& ints);

// The lowest n_core orbitals become core, the next n_active active, the rest virtual.
SpacePartition load_partition(int n_core, int n_active, const IntegralSet& ints);

// Electrons left in the active space after the closed core is removed.
int active_electron_count(const SpacePartition& part, const IntegralSet& ints);

}  // namespace qcpt

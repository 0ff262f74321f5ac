#pragma once

#include <cstddef>
#include <vector>

namespace qcpt {

// Applies a 4x4 map to digit q of a tensor with n base-4 digits:
//   out[.. m ..] = sum_d mat[m][d] in[.. d ..]
// mat is anything indexable as mat[m][d]. Works in place with one scratch buffer.
template <class T, class Mat>
void apply_local_map(std::vector<T>& data, int q, const Mat& mat) {
  const size_t stride = size_t{1} << (2 * q);
  const size_t block = stride * 4;
  const size_t total = data.size();
  for (size_t base = 0; base < total; base += block)
    for (size_t off = 0; off < stride; ++off) {
      T* p = data.data() + base + off;
      const T v0 = p[0], v1 = p[stride], v2 = p[2 * stride], v3 = p[3 * stride];
      for (int m = 0; m < 4; ++m)
        p[m * stride] = mat[m][0] * v0 + mat[m][1] * v1 + mat[m][2] * v2 + mat[m][3] * v3;
    }
}

inline size_t pow4(int n) { return size_t{1} << (2 * n); }

}  // namespace qcpt

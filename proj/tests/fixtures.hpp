#pragma once

#include <vector>

#include "mltp/algebra.hpp"
#include "mltp/random.hpp"

namespace mltp::testing {

inline Element vec(std::initializer_list<Complex> values) {
  Element v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (Complex c : values) v(i++) = c;
  return v;
}

/// C with a * b = c ab.
inline Multiplication scaled_line(Complex c, const NormContext& ctx = {}) {
  return make_multiplication(StructureTensor(1, {c}), ctx);
}

/// Coordinatewise product on C^n, optionally with per-coordinate scales.
inline Multiplication pointwise(std::size_t n, std::vector<Complex> scales = {}, const NormContext& ctx = {}) {
  StructureTensor shape(n);
  std::vector<Complex> entries(n * n * n);
  for (std::size_t i = 0; i < n; ++i) entries[shape.index(i, i, i)] = scales.empty() ? Complex(1.0) : scales[i];
  return make_multiplication(StructureTensor(n, std::move(entries)), ctx);
}

inline Multiplication zero_algebra(std::size_t n, const NormContext& ctx = {}) {
  return make_multiplication(StructureTensor(n), ctx);
}

/// 2x2 matrices as the convolution algebra on {1,2} with counting weights.
inline Multiplication matrix_algebra(const NormContext& ctx = {}) {
  const double w[] = {1.0, 1.0};
  return convolution_algebra(2, w, ctx);
}

/// Coordinates of a 2x2 matrix in the convolution basis E_xy -> x*2+y.
inline Element from_matrix(const Eigen::Matrix2cd& a) { return vec({a(0, 0), a(0, 1), a(1, 0), a(1, 1)}); }

inline Eigen::Matrix2cd to_matrix(const Element& v) {
  Eigen::Matrix2cd a;
  a << v(0), v(1), v(2), v(3);
  return a;
}

}  // namespace mltp::testing

#include "mltp/moduli.hpp"

namespace mltp::testing {

/// Cyclic group Z/n as a semigroup algebra.
inline Multiplication cyclic_group_algebra(std::size_t n, const NormContext& ctx = {}) {
  std::vector<std::size_t> table(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) table[a * n + b] = (a + b) % n;
  return semigroup_algebra(SemigroupTable(n, table), ctx);
}

/// A unital instance of dimension n: a transport of a pointwise, cyclic-group
/// or (for n >= 4) matrix-block algebra by a group element with cond <= max_cond.
inline Multiplication random_unital_fixture(std::size_t n, Rng& rng, double max_cond = 10.0) {
  Multiplication base = pointwise(n);
  switch (rng.index(3)) {
    case 0: break;
    case 1: base = cyclic_group_algebra(n); break;
    default:
      if (n >= 4) base = n == 4 ? matrix_algebra() : direct_sum(matrix_algebra(), pointwise(n - 4));
      else base = cyclic_group_algebra(n);
  }
  return act(random_group_element(n, max_cond, rng), base);
}

}  // namespace mltp::testing

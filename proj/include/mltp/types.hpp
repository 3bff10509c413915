#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace mltp {

using Complex = std::complex<double>;

/// A point of the underlying coordinate space E = C^n.
using Element = Eigen::VectorXcd;

/// An n x n complex matrix; left/right multiplication operators and group elements.
using LinearMap = Eigen::MatrixXcd;

/// Bilinear map on C^n given by structure constants:
/// alpha_i * alpha_j = sum_k lambda(i, j, k) alpha_k  (indices are 0-based).
///
/// Entries are stored i-major, then j, then k, which is also the order of the
/// "lambda" array in the instance JSON format.
class StructureTensor {
 public:
  StructureTensor() = default;

  /// Zero tensor of dimension `dim`.
  explicit StructureTensor(std::size_t dim);

  /// Throws std::invalid_argument on wrong length or non-finite entries.
  StructureTensor(std::size_t dim, std::vector<Complex> entries);

  std::size_t dim() const { return dim_; }
  std::span<const Complex> entries() const { return entries_; }

  Complex operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return entries_[index(i, j, k)];
  }

  /// Coordinates of alpha_i * alpha_j.
  Element basis_product(std::size_t i, std::size_t j) const;

  double max_abs() const;

  StructureTensor operator-(const StructureTensor& other) const;
  StructureTensor operator+(const StructureTensor& other) const;
  StructureTensor scaled(Complex factor) const;

  bool operator==(const StructureTensor&) const = default;

  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
    return (i * dim_ + j) * dim_ + k;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<Complex> entries_;
};

/// Multiplication table of a finite semigroup on {0, ..., size-1}.
class SemigroupTable {
 public:
  /// `table[a * size + b]` is the product a.b. Throws std::invalid_argument if
  /// the shape or range is wrong or the operation is not associative.
  SemigroupTable(std::size_t size, std::vector<std::size_t> table);

  std::size_t size() const { return size_; }
  std::size_t operator()(std::size_t a, std::size_t b) const { return table_[a * size_ + b]; }
  std::span<const std::size_t> table() const { return table_; }

  std::optional<std::size_t> identity() const;

 private:
  std::size_t size_;
  std::vector<std::size_t> table_;
};

}  // namespace mltp

#include "mltp/types.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mltp/error.hpp"

namespace mltp {

StructureTensor::StructureTensor(std::size_t dim) : dim_(dim), entries_(dim * dim * dim) {
  if (dim == 0) throw std::invalid_argument("structure tensor dimension must be positive");
}

StructureTensor::StructureTensor(std::size_t dim, std::vector<Complex> entries)
    : dim_(dim), entries_(std::move(entries)) {
  if (dim == 0) throw std::invalid_argument("structure tensor dimension must be positive");
  if (entries_.size() != dim * dim * dim)
    throw std::invalid_argument("structure tensor of dimension " + std::to_string(dim) + " needs " +
                                std::to_string(dim * dim * dim) + " entries, got " +
                                std::to_string(entries_.size()));
  for (const Complex& c : entries_)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw std::invalid_argument("structure tensor has a non-finite entry");
}

Element StructureTensor::basis_product(std::size_t i, std::size_t j) const {
  Element out(static_cast<Eigen::Index>(dim_));
  const std::size_t base = index(i, j, 0);
  for (std::size_t k = 0; k < dim_; ++k) out(static_cast<Eigen::Index>(k)) = entries_[base + k];
  return out;
}

double StructureTensor::max_abs() const {
  double m = 0.0;
  for (const Complex& c : entries_) m = std::max(m, std::abs(c));
  return m;
}

StructureTensor StructureTensor::operator-(const StructureTensor& other) const {
  if (other.dim_ != dim_) throw DimensionMismatch("tensor difference: dimensions differ");
  std::vector<Complex> out(entries_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = entries_[i] - other.entries_[i];
  return StructureTensor(dim_, std::move(out));
}

StructureTensor StructureTensor::operator+(const StructureTensor& other) const {
  if (other.dim_ != dim_) throw DimensionMismatch("tensor sum: dimensions differ");
  std::vector<Complex> out(entries_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = entries_[i] + other.entries_[i];
  return StructureTensor(dim_, std::move(out));
}

StructureTensor StructureTensor::scaled(Complex factor) const {
  std::vector<Complex> out(entries_);
  for (Complex& c : out) c *= factor;
  return StructureTensor(dim_, std::move(out));
}

SemigroupTable::SemigroupTable(std::size_t size, std::vector<std::size_t> table)
    : size_(size), table_(std::move(table)) {
  if (size == 0) throw std::invalid_argument("semigroup must be non-empty");
  if (table_.size() != size * size)
    throw std::invalid_argument("semigroup table needs size^2 entries");
  for (std::size_t v : table_)
    if (v >= size) throw std::invalid_argument("semigroup table entry out of range");
  for (std::size_t a = 0; a < size; ++a)
    for (std::size_t b = 0; b < size; ++b)
      for (std::size_t c = 0; c < size; ++c) {
        const std::size_t left = (*this)((*this)(a, b), c);
        const std::size_t right = (*this)(a, (*this)(b, c));
        if (left != right)
          throw AssociativityViolation("semigroup table is not associative at (" + std::to_string(a + 1) +
                                           "," + std::to_string(b + 1) + "," + std::to_string(c + 1) + ")",
                                       {a, b, c, 0}, 1.0);
      }
}

std::optional<std::size_t> SemigroupTable::identity() const {
  for (std::size_t u = 0; u < size_; ++u) {
    bool ok = true;
    for (std::size_t a = 0; a < size_ && ok; ++a) ok = (*this)(u, a) == a && (*this)(a, u) == a;
    if (ok) return u;
  }
  return std::nullopt;
}

}  // namespace mltp

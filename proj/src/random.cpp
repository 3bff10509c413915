#include "mltp/random.hpp"

#include <cmath>
#include <numbers>

namespace mltp {

std::uint64_t splitmix64(std::uint64_t state) {
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
  return splitmix64(root + (index + 1) * 0x9E3779B97F4A7C15ULL);
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::size_t Rng::index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

double Rng::normal() {
  // Box-Muller; 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Complex Rng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return {re, im};
}

Element Rng::gaussian_vector(std::size_t n) {
  Element v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = complex_normal();
  return v;
}

LinearMap Rng::gaussian_matrix(std::size_t rows, std::size_t cols) {
  LinearMap m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = complex_normal();
  return m;
}

}  // namespace mltp

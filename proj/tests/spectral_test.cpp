#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "fixtures.hpp"
#include "mltp/error.hpp"
#include "mltp/spectral.hpp"

using namespace mltp;
using namespace mltp::testing;

namespace {

bool same_points(const std::vector<Complex>& got, std::vector<Complex> want, double tol) {
  if (got.size() != want.size()) return false;
  for (Complex z : got) {
    auto it = std::find_if(want.begin(), want.end(), [&](Complex w) { return std::abs(w - z) <= tol; });
    if (it == want.end()) return false;
    want.erase(it);
  }
  return true;
}

}  // namespace

TEST_CASE("invertibility and inverses") {
  const auto pw = pointwise(2);
  CHECK(is_invertible(pw, vec({1, 1})));
  CHECK(invert(pw, vec({1, 1})).inverse->isApprox(vec({1, 1})));
  CHECK_FALSE(is_invertible(pw, vec({2, 0})));
  CHECK_FALSE(invert(pw, vec({2, 0})).inverse);
  CHECK(invert(pw, vec({1, 1e-12})).near_singular);

  const auto m = matrix_algebra();
  Eigen::Matrix2cd i2 = Eigen::Matrix2cd::Identity(), e12 = Eigen::Matrix2cd::Zero();
  e12(0, 1) = 1.0;
  const auto inv = invert(m, from_matrix(i2 - 0.1 * e12));
  REQUIRE(inv.inverse);
  CHECK((to_matrix(*inv.inverse) - (i2 + 0.1 * e12)).norm() < 1e-14);
  CHECK_FALSE(inv.near_singular);
  CHECK_THROWS_AS(invert(zero_algebra(1), vec({1})), HypothesisViolation);
}

TEST_CASE("two-sided criterion matches direct solves") {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.index(5);
    const auto m = random_unital_fixture(n, rng);
    // Mix generic elements with projections of the unit, which are singular.
    Element a = rng.gaussian_vector(n);
    if (trial % 3 == 0) a = left_mult_matrix(m, rng.gaussian_vector(n)).col(0);
    const Element e = *find_unit(m);
    const Eigen::FullPivLU<LinearMap> lu(left_mult_matrix(m, a));
    bool direct = false;
    if (lu.isInvertible()) {
      const Element x = lu.solve(e);
      direct = (multiply(m, x, a) - e).norm() < 1e-8 * std::max(1.0, x.norm());
    }
    CHECK(is_invertible(m, a) == direct);
  }
}

TEST_CASE("spectrum fixtures") {
  const auto pw = pointwise(2);
  CHECK(same_points(spectrum(pw, vec({2, 5})).points, {2.0, 5.0}, 1e-12));
  CHECK(same_points(spectrum(pw, vec({1, 1})).points, {1.0}, 1e-12));
  const auto m = matrix_algebra();
  CHECK(same_points(spectrum(m, basis(4, 0)).points, {0.0, 1.0}, 1e-10));
  CHECK(same_points(spectrum(m, *find_unit(m)).points, {1.0}, 1e-12));
  CHECK_THROWS_AS(spectrum(zero_algebra(2), vec({1, 1})), HypothesisViolation);
}

TEST_CASE("spectrum sets are separated and sorted") {
  const auto s = make_spectrum_set({1.0, {1.0, 1e-9}, 2.0, {0.5, 3.0}, {0.5, -1.0}, 1.0 + 5e-9}, 1e-8);
  REQUIRE(s.points.size() == 4);
  CHECK(s.points[0] == Complex(0.5, -1.0));
  CHECK(s.points[1] == Complex(0.5, 3.0));
  CHECK(std::abs(s.points[2] - 1.0) < 1e-8);
  for (std::size_t i = 0; i < s.points.size(); ++i)
    for (std::size_t j = i + 1; j < s.points.size(); ++j) CHECK(std::abs(s.points[i] - s.points[j]) > 1e-8);
}

TEST_CASE("spectrum_bruteforce fixtures") {
  const auto pw = pointwise(2);
  const std::vector<Complex> grid{0.0, 1.0, 2.0, 3.0, 5.0};
  CHECK(spectrum_bruteforce(pw, vec({2, 5}), grid) == std::vector<Complex>{2.0, 5.0});
  const std::vector<Complex> g2{0.0, 1.0, 2.0};
  CHECK(spectrum_bruteforce(pw, vec({1, 1}), g2) == std::vector<Complex>{1.0});
}

TEST_CASE("spectrum matches brute force on random instances") {
  Rng rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + rng.index(4);
    const auto m = random_unital_fixture(n, rng);
    const Element a = rng.gaussian_vector(n);
    const SpectrumSet sigma = spectrum(m, a);
    std::vector<Complex> grid = sigma.points;
    std::vector<Complex> off;
    while (off.size() < 20) {
      const Complex z = 3.0 * rng.complex_normal();
      if (sigma.distance(z) > 1e-3) off.push_back(z);
    }
    grid.insert(grid.end(), off.begin(), off.end());
    CHECK(spectrum_bruteforce(m, a, grid) == sigma.points);

    const Element e = *find_unit(m);
    CHECK(is_invertible(m, a) == !sigma.contains(0.0, sigma.dedup_tol));
    const double scale = left_mult_matrix(m, a).norm() + 10.0 * left_mult_matrix(m, e).norm();
    for (Complex z : sigma.points) CHECK_FALSE(is_invertible(m, a - z * e, kSingularRelTol, scale));
  }
}

TEST_CASE("spectral semicontinuity") {
  const auto line = scaled_line(1.0);
  std::vector<Multiplication> constant(10, line);
  const auto c = spectral_semicontinuity(constant, line, vec({2}), 1e-6);
  CHECK(c.passed);
  REQUIRE(c.persistent.size() == 1);
  CHECK(std::abs(c.persistent[0] - 2.0) < 1e-12);
  CHECK(c.worst_distance < 1e-12);

  std::vector<Multiplication> seq;
  for (int n = 1; n <= 50; ++n) seq.push_back(scaled_line(1.0 + 1.0 / n));
  const auto r = spectral_semicontinuity(seq, line, vec({1}), 1e-6);
  CHECK(r.passed);
  CHECK(r.persistent.empty());
  CHECK(r.tail_excess.back() == doctest::Approx(1.0 / 50));
  // Each sigma_n(1) = {1 + 1/n}.
  CHECK(std::abs(spectrum(seq[3], vec({1})).points[0] - 1.25) < 1e-14);

  // A limit whose spectrum misses the persistent point fails.
  const auto bad = spectral_semicontinuity(constant, scaled_line(2.0), vec({1}), 1e-6);
  CHECK_FALSE(bad.passed);
}

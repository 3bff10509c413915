#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "fixtures.hpp"
#include "mltp/error.hpp"
#include "mltp/perturbation.hpp"
#include "mltp/spectral.hpp"

using namespace mltp;
using namespace mltp::testing;

namespace {

// Right-hand side of the proof chain for ||a^-1_<> - a^-1_*||, evaluated on the
// actual ingredient norms:
//   |l^-1_<>a - l^-1_*a| ||e_<>|| + |l^-1_*a| ||e_<> - e_*||
// with |l^-1_<>a - l^-1_*a| <= s |*|^2 ||a^-1||^2 ||a|| d,
//      ||e_<> - e_*||       <= s ||e_*||^2 d,
//      ||e_<>||             <= ||e_*|| + s ||e_*||^2 d,
//      |l^-1_*a|            <= |*| ||a^-1||.
double proof_chain(double s, double star, double e, double a, double a_inv, double d) {
  const double unit_gap = s * e * e * d;
  return s * star * star * a_inv * a_inv * a * d * (e + unit_gap) + star * a_inv * unit_gap;
}

}  // namespace

TEST_CASE("s_factor") {
  CHECK(s_factor(0.0) == 1.0);
  CHECK(s_factor(0.5) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(s_factor(0.9) == doctest::Approx(10.0).epsilon(1e-12));
  for (int i = 0; i < 100; ++i) {
    const double r = 0.0099 * i;
    CHECK(std::abs(s_factor(r) * (1.0 - r) - 1.0) <= 1e-12);
  }
  CHECK_THROWS_AS(s_factor(1.0), std::invalid_argument);
  CHECK_THROWS_AS(s_factor(-0.1), std::invalid_argument);
}

TEST_CASE("C_M from the proof chain") {
  CHECK(inverse_perturbation_constant(2.0) == 96.0);
  CHECK(inverse_perturbation_constant(4.0) == 4096.0 + 512.0);
  // With every cap at M and d = r M^-3 the chain is the worst case; it must
  // stay below s^2 C_M d for every r and M >= 1 (the caps force M >= 1).
  for (double M : {1.0, 1.5, 2.0, 4.0, 10.0})
    for (double r : {0.0, 0.1, 0.5, 0.9, 0.99}) {
      const double s = s_factor(r);
      const double d = r / (M * M * M);
      const double chain = proof_chain(s, M, M, M, M, d);
      CHECK(chain <= s * s * inverse_perturbation_constant(M) * d * (1 + 1e-14) + 1e-300);
    }
}

TEST_CASE("neumann_invert scalar equality witness") {
  const auto line = scaled_line(1.0);
  const auto res = neumann_invert(line, vec({1}), vec({1}), vec({0.9}), 0.1);
  CHECK(std::abs(res.inverse(0) - 1.0 / 0.9) < 1e-14);
  CHECK(res.certificate.bound == doctest::Approx(1.0 / 9.0).epsilon(1e-13));
  CHECK(res.certificate.measured == doctest::Approx(1.0 / 9.0).epsilon(1e-13));
  CHECK(std::abs(res.certificate.ratio() - 1.0) <= 1e-12);
  CHECK(res.certificate.satisfied);

  const auto same = neumann_invert(line, vec({2}), vec({0.5}), vec({2}), 0.3);
  CHECK(same.certificate.measured == 0.0);
  CHECK(same.certificate.bound == 0.0);
  CHECK(same.inverse(0) == Complex(0.5));
}

TEST_CASE("neumann_invert in the matrix algebra") {
  const auto m = matrix_algebra();
  Eigen::Matrix2cd i2 = Eigen::Matrix2cd::Identity(), e12 = Eigen::Matrix2cd::Zero();
  e12(0, 1) = 1.0;
  const auto res = neumann_invert(m, from_matrix(i2), from_matrix(i2), from_matrix(i2 - 0.1 * e12), 0.2);
  const Eigen::Matrix2cd expected = (i2 - 0.1 * e12).inverse();
  CHECK((to_matrix(res.inverse) - expected).norm() < 1e-14);
  CHECK(res.certificate.measured == doctest::Approx(0.1));
  CHECK(res.certificate.bound == doctest::Approx(0.9));
}

TEST_CASE("neumann_invert hypotheses") {
  const auto line = scaled_line(1.0);
  CHECK_THROWS_AS(neumann_invert(line, vec({1}), vec({1}), vec({0.5}), 0.1), HypothesisViolation);
  CHECK_THROWS_AS(neumann_invert(line, vec({1}), vec({2}), vec({1}), 0.1), HypothesisViolation);
  CHECK_THROWS_AS(neumann_invert(zero_algebra(1), vec({1}), vec({1}), vec({1}), 0.1), HypothesisViolation);
  CHECK_THROWS_AS(neumann_invert(line, vec({1}), vec({1}), vec({1}), 1.0), std::invalid_argument);
}

TEST_CASE("neumann_invert agrees with direct inversion on random instances") {
  Rng rng(1234);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + rng.index(5);
    const auto m = random_unital_fixture(n, rng);
    const Element e = *find_unit(m);
    const Element a = e + 0.3 * rng.gaussian_vector(n) / std::max(1.0, m.opnorm().value);
    const auto a_inv = invert(m, a).inverse;
    if (!a_inv) continue;
    const double r = 0.1 + 0.8 * rng.uniform();
    const NormContext& ctx = m.norm();
    const double radius = r / (vector_norm(*a_inv, ctx) * std::pow(m.opnorm().value, 2));
    Element dir = rng.gaussian_vector(n);
    dir /= vector_norm(dir, ctx);
    const Element b = a + rng.uniform() * radius * dir;
    const auto res = neumann_invert(m, a, *a_inv, b, r);
    CHECK(res.certificate.satisfied);
    CHECK(is_invertible(m, b));
    const Element direct = *invert(m, b).inverse;
    CHECK(vector_norm(res.inverse - direct, ctx) <= 1e-10 * vector_norm(direct, ctx));
  }
}

TEST_CASE("perturbed_unit") {
  const auto line = scaled_line(1.0);
  const auto same = perturbed_unit(line, line, 0.5);
  CHECK(same.certificate.measured == 0.0);
  CHECK(std::abs(same.unit(0) - 1.0) < 1e-15);

  const auto res = perturbed_unit(line, scaled_line(1.1), 0.1);
  CHECK(std::abs(res.unit(0) - 1.0 / 1.1) < 1e-15);
  CHECK(std::abs(res.certificate.measured - 0.1 / 1.1) <= 1e-12);
  CHECK(std::abs(res.certificate.bound - 0.1 / 0.9) <= 1e-12);
  CHECK(res.certificate.satisfied);

  // ||e_*||_1 = 2 on C^2, so a distance of 0.05 needs r >= 0.1 here.
  const auto pw = perturbed_unit(pointwise(2), pointwise(2, {1.0, 1.05}), 0.1);
  CHECK((pw.unit - vec({1.0, 1.0 / 1.05})).norm() < 1e-14);
  CHECK(pw.certificate.satisfied);
  CHECK_THROWS_AS(perturbed_unit(pointwise(2), pointwise(2, {1.0, 1.05}), 0.05), HypothesisViolation);
  const NormContext linf{NormKind::Linf};
  const auto pw_inf = perturbed_unit(pointwise(2, {}, linf), pointwise(2, {1.0, 1.05}, linf), 0.05);
  CHECK((pw_inf.unit - vec({1.0, 1.0 / 1.05})).norm() < 1e-14);
  CHECK(pw_inf.certificate.satisfied);

  CHECK_THROWS_AS(perturbed_unit(line, scaled_line(1.2), 0.1), HypothesisViolation);
}

TEST_CASE("unit_distance_bound") {
  const auto line = scaled_line(1.0);
  const auto same = unit_distance_bound(line, line);
  CHECK(same.measured == 0.0);
  CHECK(same.bound == 0.0);
  const auto b = unit_distance_bound(line, scaled_line(1.1));
  CHECK(std::abs(b.measured - 0.1 / 1.1) <= 1e-12);
  CHECK(std::abs(b.bound - b.measured) <= 1e-12);
  CHECK_THROWS_AS(unit_distance_bound(line, zero_algebra(1)), HypothesisViolation);
}

TEST_CASE("perturbed_inverse_bound") {
  const auto line = scaled_line(1.0);
  const double eps = 0.01;
  const auto res = perturbed_inverse_bound(line, scaled_line(1.0 + eps), vec({1}), 0.08, 2.0);
  // e_<> = 1/(1+eps) and 1 <> x = (1+eps) x, so x = 1/(1+eps)^2.
  const double expected = 1.0 / ((1.0 + eps) * (1.0 + eps));
  CHECK(std::abs(res.inverse(0) - expected) < 1e-15);
  CHECK(std::abs(res.certificate.measured - (1.0 - expected)) < 1e-14);
  CHECK(res.certificate.satisfied);
  const double s = s_factor(0.08);
  CHECK(res.certificate.bound == doctest::Approx(s * s * 96.0 * eps));
  CHECK(res.certificate.hypothesis.C_M == 96.0);

  const auto same = perturbed_inverse_bound(line, line, vec({1}), 0.5, 2.0);
  CHECK(same.certificate.measured == 0.0);

  try {
    perturbed_inverse_bound(line, line, vec({3}), 0.5, 2.0);
    FAIL("expected cap failure");
  } catch (const HypothesisViolation& e) {
    CHECK(std::string(e.what()).find("||a||") != std::string::npos);
  }
  CHECK_THROWS_AS(perturbed_inverse_bound(line, scaled_line(1.2), vec({1}), 0.5, 2.0), HypothesisViolation);
}

TEST_CASE("perturbed_inverse_bound respects the proof chain on random instances") {
  Rng rng(77);
  int checked = 0;
  for (int trial = 0; trial < 200 && checked < 50; ++trial) {
    const std::size_t n = 1 + rng.index(4);
    const auto m = random_unital_fixture(n, rng, 2.0);
    const NormContext& ctx = m.norm();
    const Element e = *find_unit(m);
    const Element a = e + 0.2 * rng.gaussian_vector(n) / std::max(1.0, m.opnorm().value);
    const auto a_inv = invert(m, a).inverse;
    if (!a_inv) continue;
    const double M = 4.0;
    if (std::max({m.opnorm().value, vector_norm(e, ctx), vector_norm(a, ctx), vector_norm(*a_inv, ctx)}) > M)
      continue;
    const double r = rng.uniform(0.05, 0.9);
    const auto t = GroupElement(LinearMap::Identity(n, n) + 1e-3 * rng.gaussian_matrix(n, n));
    const auto diamond = act(t, m);
    const double d = mult_distance(diamond, m).value;
    if (d > r / (M * M * M)) continue;
    const auto res = perturbed_inverse_bound(m, diamond, a, r, M);
    const double s = s_factor(r);
    const double chain = proof_chain(s, m.opnorm().value, vector_norm(e, ctx), vector_norm(a, ctx),
                                     vector_norm(*a_inv, ctx), d);
    CHECK(res.certificate.measured <= chain * (1 + 1e-9) + 1e-15);
    CHECK(chain <= res.certificate.bound * (1 + 1e-12));
    ++checked;
  }
  CHECK(checked >= 20);
}

TEST_CASE("certificates with non-exact norms are flagged") {
  const NormContext l2{NormKind::L2};
  const auto line = scaled_line(1.0, l2);
  const auto res = perturbed_unit(pointwise(2, {}, l2), pointwise(2, {1.0, 1.01}, l2), 0.1);
  CHECK_FALSE(res.certificate.exact_norms);
  CHECK_FALSE(neumann_invert(line, vec({1}), vec({1}), vec({0.95}), 0.1).certificate.exact_norms);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <chrono>
#include <cmath>

#include "fixtures.hpp"
#include "mltp/cohomology.hpp"
#include "mltp/error.hpp"
#include "mltp/moduli.hpp"

using namespace mltp;
using namespace mltp::testing;

namespace {

double tensor_gap(const Multiplication& a, const Multiplication& b) {
  return (a.tensor() - b.tensor()).max_abs() / std::max(1.0, a.tensor().max_abs());
}

}  // namespace

TEST_CASE("group elements") {
  Rng rng(4);
  for (std::size_t n : {1u, 2u, 5u}) {
    const auto g = random_group_element(n, 100.0, rng);
    CHECK(g.cond() <= 100.0 * (1 + 1e-9));
    CHECK((g.map() * g.inverse() - LinearMap::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-10 * g.cond());
  }
  CHECK_THROWS_AS(GroupElement(LinearMap::Zero(2, 2)), std::invalid_argument);
  CHECK_THROWS_AS(GroupElement(LinearMap::Zero(2, 3)), std::invalid_argument);
}

TEST_CASE("act fixtures") {
  const auto line = scaled_line(1.0);
  CHECK(tensor_gap(act(GroupElement::identity(1), line), line) == 0.0);
  const auto doubled = act(GroupElement::scalar(1, 2.0), line);
  CHECK(std::abs(doubled.tensor()(0, 0, 0) - 2.0) < 1e-15);
  CHECK(doubled.opnorm().value == doctest::Approx(2.0));

  // Relabelling Z/3 by a permutation gives the semigroup algebra of the relabelled table.
  const std::size_t perm[] = {2, 0, 1};  // t(alpha_i) = alpha_perm[i]
  LinearMap p = LinearMap::Zero(3, 3);
  for (std::size_t i = 0; i < 3; ++i) p(perm[i], i) = 1.0;
  std::vector<std::size_t> relabelled(9);
  std::size_t inv[3];
  for (std::size_t i = 0; i < 3; ++i) inv[perm[i]] = i;
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b) relabelled[a * 3 + b] = inv[(perm[a] + perm[b]) % 3];
  const auto moved = act(GroupElement(p), cyclic_group_algebra(3));
  CHECK(tensor_gap(moved, semigroup_algebra(SemigroupTable(3, relabelled))) < 1e-15);
}

TEST_CASE("action composition law and inverses") {
  Rng rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + rng.index(4);
    const auto m = random_unital_fixture(n, rng);
    const auto s = random_group_element(n, 10.0, rng);
    const auto t = random_group_element(n, 10.0, rng);
    CHECK(tensor_gap(act(t, act(s, m)), act(compose(s, t), m)) <= 1e-10);
    CHECK(tensor_gap(act(t.inverted(), act(t, m)), m) <= 1e-10);
  }
}

TEST_CASE("scaling orbit") {
  CHECK(scaling_orbit_norm(zero_algebra(2), 7) == 0.0);
  CHECK(scaling_orbit_norm(pointwise(2), 4) == doctest::Approx(0.25).epsilon(1e-15));
  Rng rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    const auto m = random_unital_fixture(1 + rng.index(4), rng);
    for (std::size_t k = 1; k <= 10; ++k)
      CHECK(std::abs(scaling_orbit_norm(m, k) * static_cast<double>(k) / m.opnorm().value - 1.0) <= 1e-12);
  }
}

TEST_CASE("action continuity bound") {
  const auto line = scaled_line(1.0);
  const auto id = GroupElement::identity(1);
  const auto trivial = action_continuity_bound(id, id, line, line);
  CHECK(trivial.measured == 0.0);
  CHECK(trivial.bound == 0.0);
  const auto b = action_continuity_bound(GroupElement::scalar(1, 2.0), id, line, line);
  CHECK(b.measured == doctest::Approx(1.0));
  CHECK(b.bound == doctest::Approx(5.0));
  CHECK(b.satisfied);

  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.index(4);
    const auto m1 = random_unital_fixture(n, rng);
    const auto m2 = act(random_group_element(n, 2.0, rng), m1);
    const auto cert = action_continuity_bound(random_group_element(n, 10.0, rng), random_group_element(n, 10.0, rng), m1, m2);
    CHECK(cert.satisfied);
    CHECK(cert.exact_norms);
  }
}

TEST_CASE("joint continuity") {
  const auto line = scaled_line(1.0);
  std::vector<Multiplication> ms(5, line);
  std::vector<Element> as(5, vec({2})), bs(5, vec({3}));
  const auto c = joint_continuity_check(ms, line, as, vec({2}), bs, vec({3}), 1e-12);
  CHECK(c.passed);
  CHECK(c.converges);
  for (const auto& row : c.rows) CHECK((row.lhs == 0.0 && row.rhs == 0.0));

  ms.clear();
  as.clear();
  bs.clear();
  for (int n = 1; n <= 40; ++n) {
    ms.push_back(scaled_line(1.0 + 1.0 / n));
    as.push_back(vec({1.0 + 1.0 / n}));
    bs.push_back(vec({1.0}));
  }
  const auto s = joint_continuity_check(ms, line, as, vec({1}), bs, vec({1}), 0.1);
  CHECK(s.passed);
  CHECK(s.converges);
  for (int n = 1; n <= 40; ++n) {
    const double lhs = std::pow(1.0 + 1.0 / n, 2) - 1.0;
    CHECK(s.rows[n - 1].lhs == doctest::Approx(lhs).epsilon(1e-12));
    // |*_n - *| ||a_n|| ||b_n|| + |*| ||b|| ||a_n - a||
    CHECK(s.rows[n - 1].rhs == doctest::Approx((1.0 + 1.0 / n) / n + 1.0 / n).epsilon(1e-12));
  }
}

TEST_CASE("boundary blowup") {
  const auto zero = zero_algebra(1);
  const auto r = boundary_blowup_experiment([](double eps) { return scaled_line(eps); }, zero, {1, 0.5, 0.25, 0.125});
  CHECK(r.all_unital);
  CHECK(r.monotone);
  const double expected[] = {1, 2, 4, 8};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(std::abs(*r.rows[i].unit_norm - expected[i]) <= 4e-16 * expected[i]);
    CHECK(r.rows[i].distance == doctest::Approx(r.rows[i].eps));
  }

  const auto flat = boundary_blowup_experiment([](double) { return pointwise(2); }, zero_algebra(2), {1, 0.5});
  CHECK(flat.monotone);
  CHECK(*flat.rows[0].unit_norm == doctest::Approx(*flat.rows[1].unit_norm));

  const auto two = boundary_blowup_experiment([](double eps) { return pointwise(2, {1.0, eps}); }, pointwise(2, {1.0, 0.0}),
                                              {1, 0.5, 0.25, 0.125});
  for (const auto& row : two.rows) CHECK(*row.unit_norm == doctest::Approx(1.0 + 1.0 / row.eps));
}

TEST_CASE("coboundary matrices") {
  CHECK(coboundary_matrix(zero_algebra(2), 2).isZero());
  const LinearMap d0 = coboundary_matrix(scaled_line(1.0), 0);
  CHECK(d0.rows() == 1);
  CHECK(d0.isZero());
  CHECK_THROWS_AS(coboundary_matrix(scaled_line(1.0), 5), std::length_error);
  CHECK_THROWS_AS(coboundary_matrix(pointwise(11), 4), std::length_error);

  // delta^0 x (a) = a x - x a, checked against multiply.
  const auto m = matrix_algebra();
  const LinearMap c0 = coboundary_matrix(m, 0);
  Rng rng(2);
  const Element x = rng.gaussian_vector(4);
  const Element image = c0 * x;
  for (std::size_t i = 0; i < 4; ++i) {
    const Element expect = multiply(m, basis(4, i), x) - multiply(m, x, basis(4, i));
    CHECK((image.segment(4 * i, 4) - expect).norm() < 1e-13);
  }

  Rng rng2(6);
  std::vector<Multiplication> corpus{scaled_line(1.0), zero_algebra(2), matrix_algebra(),
                                     semigroup_algebra(SemigroupTable(2, {0, 0, 1, 1}))};
  for (int i = 0; i < 4; ++i) corpus.push_back(random_unital_fixture(1 + rng2.index(3), rng2));
  for (const auto& mm : corpus)
    for (std::size_t d = 0; d + 1 <= 3 && std::pow(mm.dim(), d + 3) <= 1e6; ++d)
      CHECK((coboundary_matrix(mm, d + 1) * coboundary_matrix(mm, d)).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("Hochschild dimensions") {
  const auto line = hochschild_dims(scaled_line(1.0));
  CHECK(line.dims == std::vector<std::size_t>{1, 0, 0, 0});
  CHECK(line.rigid_certificate);

  const auto start = std::chrono::steady_clock::now();
  const auto m2 = hochschild_dims(matrix_algebra());
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(m2.dims == std::vector<std::size_t>{1, 0, 0, 0});
  CHECK(m2.rigid_certificate);
  CHECK_FALSE(m2.rank_ambiguous());
  CHECK(secs < 10.0);

  const auto zero = hochschild_dims(zero_algebra(1));
  CHECK(zero.dims == std::vector<std::size_t>{1, 1, 1, 1});
  CHECK_FALSE(zero.rigid_certificate);

  CHECK(hochschild_dims(pointwise(2)).dims == std::vector<std::size_t>{2, 0, 0, 0});
  CHECK_FALSE(hochschild_dims(scaled_line(1.0), 2).rigid_certificate);
}

TEST_CASE("invariant signatures") {
  const auto pw = invariant_signature(pointwise(2));
  CHECK(pw.unital);
  CHECK(pw.commutative);
  CHECK(pw.cohomology.dims == std::vector<std::size_t>{2, 0, 0, 0});
  const auto zero = invariant_signature(zero_algebra(1));
  CHECK_FALSE(zero.unital);
  CHECK(zero.commutative);
  CHECK(zero.cohomology.dims == std::vector<std::size_t>{1, 1, 1, 1});

  Rng rng(17);
  const auto base = semigroup_algebra(SemigroupTable(2, {0, 0, 1, 1}));
  const auto sig = invariant_signature(base);
  for (int i = 0; i < 20; ++i) CHECK(invariant_signature(act(random_group_element(2, 1e3, rng), base)) == sig);
}

namespace {

// C[x]/(x^2) in the basis (1, x).
Multiplication dual_numbers() {
  StructureTensor t(2);
  std::vector<Complex> e(8, 0.0);
  e[t.index(0, 0, 0)] = 1.0;
  e[t.index(0, 1, 1)] = 1.0;
  e[t.index(1, 0, 1)] = 1.0;
  return make_multiplication(StructureTensor(2, e));
}

// Cohomology from ranks of the full, unbalanced coboundaries.
std::vector<std::size_t> full_complex_dims(const Multiplication& m, std::size_t max_deg) {
  std::vector<std::size_t> ranks;
  std::vector<std::vector<double>> svs;
  double scale = 0.0;
  for (std::size_t d = 0; d <= max_deg; ++d) {
    Eigen::JacobiSVD<LinearMap> svd(coboundary_matrix(m, d));
    svs.emplace_back(svd.singularValues().data(), svd.singularValues().data() + svd.singularValues().size());
    if (!svs.back().empty()) scale = std::max(scale, svs.back().front());
  }
  std::vector<std::size_t> dims;
  for (std::size_t d = 0; d <= max_deg; ++d) {
    std::size_t rank = 0;
    for (double v : svs[d]) rank += v > 1e-8 * scale;
    ranks.push_back(rank);
    dims.push_back(static_cast<std::size_t>(std::pow(m.dim(), d + 1)) - rank - (d ? ranks[d - 1] : 0));
  }
  return dims;
}

}  // namespace

TEST_CASE("dual numbers") {
  const auto m = dual_numbers();
  const auto sig = invariant_signature(m);
  CHECK(sig.unital);
  CHECK(sig.commutative);
  CHECK(sig.cohomology.dims == std::vector<std::size_t>{2, 1, 1, 1});
  CHECK_FALSE(sig.cohomology.rigid_certificate);
  CHECK(hochschild_dims(direct_sum(scaled_line(1.0), m)).dims == std::vector<std::size_t>{3, 1, 1, 1});
  Rng rng(23);
  for (int i = 0; i < 20; ++i) CHECK(invariant_signature(act(random_group_element(2, 1e3, rng), m)) == sig);
}

TEST_CASE("normalized balanced cohomology agrees with the full complex") {
  Rng rng(31);
  std::vector<Multiplication> corpus{matrix_algebra(), dual_numbers(), pointwise(3), cyclic_group_algebra(3),
                                     semigroup_algebra(SemigroupTable(3, {0, 1, 2, 1, 1, 1, 2, 2, 2}))};
  for (int i = 0; i < 6; ++i) corpus.push_back(random_unital_fixture(1 + rng.index(3), rng, 2.0));
  for (const auto& m : corpus) {
    const auto sig = hochschild_dims(m);
    CHECK(sig.normalized == find_unit(m).has_value());
    CHECK(sig.dims == full_complex_dims(m, 3));
  }
}

TEST_CASE("balanced representative") {
  Rng rng(41);
  const auto base = pointwise(3);
  const auto moved = act(random_group_element(3, 500.0, rng), base);
  const auto bal = balanced_representative(moved);
  CHECK(bal.iterations < kBalanceMaxIterations);
  REQUIRE(bal.unit.has_value());
  const auto back = act(GroupElement(bal.transport), moved);
  CHECK((back.tensor() - bal.tensor).max_abs() <= 1e-8 * std::max(1.0, bal.tensor.max_abs()));
  // The balanced form is as well conditioned as the untransported algebra.
  CHECK(bal.tensor.max_abs() <= 2.0);
  CHECK(moved.tensor().max_abs() > bal.tensor.max_abs());

  const auto zero = balanced_representative(zero_algebra(2));
  CHECK(zero.iterations == 0);
  CHECK_FALSE(zero.unit.has_value());
}

#include "mltp/perturbation.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "mltp/error.hpp"
#include "mltp/spectral.hpp"

namespace mltp {

namespace {

constexpr double kHypothesisSlack = 1e-12;
constexpr std::size_t kMaxTerms = 1'000'000;

bool within(double lhs, double rhs, double slack) { return lhs <= rhs + slack * std::max(1.0, std::abs(rhs)); }

Element require_unit(const Multiplication& m, const char* what) {
  auto e = find_unit(m);
  if (!e) throw HypothesisViolation(std::string(what) + ": multiplication is not unital");
  return *std::move(e);
}

void require_r(double r) {
  if (!(r >= 0.0 && r < 1.0)) throw std::invalid_argument("r must satisfy 0 <= r < 1");
}

}  // namespace

double CertifiedBound::ratio() const {
  if (bound > 0) return measured / bound;
  return measured > 0 ? std::numeric_limits<double>::infinity() : 0.0;
}

CertifiedBound CertifiedBound::assess(Hypothesis hypothesis, double bound, double measured, bool exact_norms) {
  CertifiedBound b;
  b.hypothesis = std::move(hypothesis);
  b.bound = bound;
  b.measured = measured;
  b.exact_norms = exact_norms;
  b.satisfied = measured <= bound + kBoundSlack * (1.0 + bound);
  return b;
}

double s_factor(double r) {
  require_r(r);
  return 1.0 + r / (1.0 - r);
}

double inverse_perturbation_constant(double M) {
  const double m2 = M * M;
  return m2 * m2 * m2 + 2.0 * m2 * m2;
}

LinearMap neumann_inverse(const LinearMap& id_minus_c, const NormContext& ctx, double tail_target) {
  const Eigen::Index n = id_minus_c.rows();
  const LinearMap c = LinearMap::Identity(n, n) - id_minus_c;
  const double q = linear_opnorm(c, ctx);
  if (!(q < 1.0)) throw ConvergenceFailure("neumann_inverse: |id - L| >= 1");
  LinearMap sum = LinearMap::Identity(n, n);
  LinearMap power = LinearMap::Identity(n, n);
  double tail = q / (1.0 - q);
  for (std::size_t k = 1; tail >= tail_target; ++k) {
    if (k > kMaxTerms) throw ConvergenceFailure("neumann_inverse: term cap reached");
    power = power * c;
    sum += power;
    tail *= q;
  }
  return sum;
}

NeumannInversion neumann_invert(const Multiplication& m, const Element& a, const Element& a_inv, const Element& b,
                                double r) {
  require_r(r);
  const NormContext& ctx = m.norm();
  const Element e = require_unit(m, "neumann_invert");
  const double star = m.opnorm().value;
  const double norm_e = vector_norm(e, ctx);
  const double norm_ainv = vector_norm(a_inv, ctx);

  const double inv_err =
      std::max(vector_norm(multiply(m, a, a_inv) - e, ctx), vector_norm(multiply(m, a_inv, a) - e, ctx));
  if (inv_err > 1e-9 * std::max(1.0, star * vector_norm(a, ctx) * norm_ainv))
    throw HypothesisViolation("neumann_invert: a_inv is not a two-sided inverse of a");

  const double dist = vector_norm(b - a, ctx);
  const double radius = r / (norm_ainv * star * star);
  if (!within(dist, radius, kHypothesisSlack)) {
    std::ostringstream msg;
    msg << "neumann_invert: ||b - a|| = " << dist << " exceeds r (||a^-1|| |*|^2)^-1 = " << radius;
    throw HypothesisViolation(msg.str());
  }

  // c = e - a^-1 b; b^-1 = sum_k c^k a^-1, each term obtained as c * previous.
  const Element c = e - multiply(m, a_inv, b);
  const double norm_c = vector_norm(c, ctx);
  const double q = star * norm_c;
  if (!(q < 1.0)) throw ConvergenceFailure("neumann_invert: |*| ||c|| >= 1, inputs are inconsistent");

  Element sum = a_inv;
  Element term = a_inv;
  std::size_t k = 0;
  // Tail after the k-th term: |*|^k ||c||^(k+1) ||a^-1|| / (1 - |*| ||c||).
  double tail = norm_c * norm_ainv / (1.0 - q);
  while (tail >= 1e-14) {
    if (++k > kMaxTerms) throw ConvergenceFailure("neumann_invert: term cap reached");
    term = multiply(m, c, term);
    sum += term;
    tail *= q;
  }

  Hypothesis h;
  h.r = r;
  h.s = s_factor(r);
  h.norms = {{"|*|", star}, {"||e||", norm_e}, {"||a^-1||", norm_ainv}, {"||b-a||", dist}};
  const double bound = (norm_e * star + r / (1.0 - r)) * star * star * norm_ainv * norm_ainv * dist;
  const double measured = vector_norm(sum - a_inv, ctx);
  return {sum, CertifiedBound::assess(std::move(h), bound, measured, m.opnorm().exact), k + 1};
}

PerturbedUnit perturbed_unit(const Multiplication& star, const Multiplication& diamond, double r) {
  require_r(r);
  const NormContext& ctx = star.norm();
  const Element e_star = require_unit(star, "perturbed_unit");
  const double norm_e = vector_norm(e_star, ctx);
  const OpNorm dist = mult_distance(diamond, star);
  if (!within(dist.value, r / norm_e, kHypothesisSlack)) {
    std::ostringstream msg;
    msg << "perturbed_unit: |<> - *| = " << dist.value << " exceeds r / ||e_*|| = " << r / norm_e;
    throw HypothesisViolation(msg.str());
  }

  // |l_{<>, e_*} - id| <= |<> - *| ||e_*|| <= r, so the Neumann series converges.
  const LinearMap left = left_mult_matrix(diamond, e_star);
  const Element unit = neumann_inverse(left, ctx) * e_star;

  const auto reference = find_unit(diamond);
  if (!reference || vector_norm(*reference - unit, ctx) > 1e-9 * std::max(1.0, vector_norm(unit, ctx)))
    throw ConsistencyFailure("perturbed_unit: Neumann unit disagrees with find_unit");

  Hypothesis h;
  h.r = r;
  h.s = s_factor(r);
  h.norms = {{"|<>-*|", dist.value}, {"||e_*||", norm_e}};
  const double bound = h.s * dist.value * norm_e * norm_e;
  const double measured = vector_norm(unit - e_star, ctx);
  const bool exact = dist.exact && star.opnorm().exact;
  return {unit, CertifiedBound::assess(std::move(h), bound, measured, exact)};
}

CertifiedBound unit_distance_bound(const Multiplication& star, const Multiplication& diamond) {
  const NormContext& ctx = star.norm();
  const Element e_star = require_unit(star, "unit_distance_bound");
  const Element e_diamond = require_unit(diamond, "unit_distance_bound");
  const OpNorm dist = mult_distance(diamond, star);
  Hypothesis h;
  const double ne_star = vector_norm(e_star, ctx);
  const double ne_diamond = vector_norm(e_diamond, ctx);
  h.norms = {{"|<>-*|", dist.value}, {"||e_<>||", ne_diamond}, {"||e_*||", ne_star}};
  return CertifiedBound::assess(std::move(h), dist.value * ne_diamond * ne_star,
                                vector_norm(e_diamond - e_star, ctx), dist.exact);
}

PerturbedInverse perturbed_inverse_bound(const Multiplication& star, const Multiplication& diamond,
                                         const Element& a, double r, double M) {
  require_r(r);
  if (!(M > 0)) throw std::invalid_argument("perturbed_inverse_bound: M must be positive");
  const NormContext& ctx = star.norm();
  const Element e_star = require_unit(star, "perturbed_inverse_bound");
  const auto a_inv_star = invert(star, a).inverse;
  if (!a_inv_star) throw HypothesisViolation("perturbed_inverse_bound: a is not invertible in (E, *)");

  const double norm_star = star.opnorm().value;
  const double norm_e = vector_norm(e_star, ctx);
  const double norm_a = vector_norm(a, ctx);
  const double norm_ainv = vector_norm(*a_inv_star, ctx);
  std::string failed;
  const auto cap = [&](const char* name, double value) {
    if (!within(value, M, kHypothesisSlack)) {
      std::ostringstream part;
      part << (failed.empty() ? "" : ", ") << name << " = " << value;
      failed += part.str();
    }
  };
  cap("|*|", norm_star);
  cap("||e_*||", norm_e);
  cap("||a||", norm_a);
  cap("||a^-1_*||", norm_ainv);
  if (!failed.empty())
    throw HypothesisViolation("perturbed_inverse_bound: M-cap " + std::to_string(M) + " exceeded by " + failed);

  const OpNorm dist = mult_distance(diamond, star);
  if (!within(dist.value, r / (M * M * M), kHypothesisSlack)) {
    std::ostringstream msg;
    msg << "perturbed_inverse_bound: |<> - *| = " << dist.value << " exceeds r M^-3 = " << r / (M * M * M);
    throw HypothesisViolation(msg.str());
  }

  const auto e_diamond = find_unit(diamond);
  if (!e_diamond) throw ConsistencyFailure("perturbed_inverse_bound: <> is not unital under the hypotheses");
  const Element inverse = left_mult_matrix(diamond, a).fullPivLu().solve(*e_diamond);
  const double scale = std::max(1.0, diamond.opnorm().value * norm_a * vector_norm(inverse, ctx));
  const double err = std::max(vector_norm(multiply(diamond, a, inverse) - *e_diamond, ctx),
                              vector_norm(multiply(diamond, inverse, a) - *e_diamond, ctx));
  if (err > 1e-9 * scale) throw ConsistencyFailure("perturbed_inverse_bound: a is not invertible in (E, <>)");

  Hypothesis h;
  h.r = r;
  h.s = s_factor(r);
  h.M = M;
  h.C_M = inverse_perturbation_constant(M);
  h.norms = {{"|*|", norm_star}, {"||e_*||", norm_e}, {"||a||", norm_a}, {"||a^-1_*||", norm_ainv},
             {"|<>-*|", dist.value}};
  const double bound = h.s * h.s * *h.C_M * dist.value;
  const double measured = vector_norm(inverse - *a_inv_star, ctx);
  const bool exact = dist.exact && star.opnorm().exact;
  return {inverse, CertifiedBound::assess(std::move(h), bound, measured, exact)};
}

}  // namespace mltp

#include "mltp/norms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mltp/algebra.hpp"
#include "mltp/error.hpp"
#include "mltp/random.hpp"

namespace mltp {

namespace {

double lp_norm(const Element& x, NormKind kind) {
  switch (kind) {
    case NormKind::L1: return x.cwiseAbs().sum();
    case NormKind::L2: return x.norm();
    case NormKind::Linf: return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
  }
  return 0.0;
}

// Random point of the unit sphere of l^p: alternates Gaussian directions with
// unimodular vectors (the extreme points of the l^inf ball).
Element sample_unit(Rng& rng, std::size_t n, NormKind kind, bool unimodular) {
  Element x(static_cast<Eigen::Index>(n));
  if (unimodular) {
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = std::polar(1.0, 2.0 * M_PI * rng.uniform());
  } else {
    x = rng.gaussian_vector(n);
  }
  const double nx = lp_norm(x, kind);
  return nx > 0 ? Element(x / nx) : basis(n, 0);
}

}  // namespace

std::string_view to_string(NormKind kind) {
  switch (kind) {
    case NormKind::L1: return "l1";
    case NormKind::L2: return "l2";
    case NormKind::Linf: return "linf";
  }
  return "l1";
}

NormKind parse_norm_kind(std::string_view name) {
  if (name == "l1") return NormKind::L1;
  if (name == "l2") return NormKind::L2;
  if (name == "linf") return NormKind::Linf;
  throw std::invalid_argument("unknown norm '" + std::string(name) + "' (expected l1, l2 or linf)");
}

double vector_norm(const Element& x, const NormContext& ctx) { return lp_norm(x, ctx.kind); }

double linear_opnorm(const LinearMap& m, const NormContext& ctx) {
  if (m.size() == 0) return 0.0;
  switch (ctx.kind) {
    case NormKind::L1: return m.cwiseAbs().colwise().sum().maxCoeff();
    case NormKind::Linf: return m.cwiseAbs().rowwise().sum().maxCoeff();
    case NormKind::L2: {
      Eigen::JacobiSVD<LinearMap> svd(m);
      return svd.singularValues()(0);
    }
  }
  return 0.0;
}

OpNorm bilinear_opnorm(const StructureTensor& tensor, const NormContext& ctx) {
  const std::size_t n = tensor.dim();
  const auto col = [&](std::size_t i, std::size_t j) { return tensor.basis_product(i, j); };

  double basis_max = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) basis_max = std::max(basis_max, lp_norm(col(i, j), ctx.kind));

  // The l^1 unit ball is the closed convex hull of the unimodular multiples of
  // basis vectors, so the supremum is attained on basis pairs.
  if (ctx.kind == NormKind::L1) return {basis_max, basis_max, true};

  double upper = 0.0;
  if (ctx.kind == NormKind::Linf) {
    for (std::size_t k = 0; k < n; ++k) {
      double row = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) row += std::abs(tensor(i, j, k));
      upper = std::max(upper, row);
    }
  } else {
    // x * y = sum_i x_i L_i y, and ||x||_1 <= sqrt(n) ||x||_2.
    double max_left = 0.0;
    double frob_slices = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      LinearMap left(n, n);
      for (std::size_t j = 0; j < n; ++j) left.col(static_cast<Eigen::Index>(j)) = col(i, j);
      max_left = std::max(max_left, linear_opnorm(left, ctx));
    }
    for (std::size_t k = 0; k < n; ++k) {
      LinearMap slice(n, n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) slice(i, j) = tensor(i, j, k);
      const double s = linear_opnorm(slice, ctx);
      frob_slices += s * s;
    }
    upper = std::min(std::sqrt(static_cast<double>(n)) * max_left, std::sqrt(frob_slices));
  }

  double lower = basis_max;
  Rng rng(ctx.sample_seed);
  for (int s = 0; s < ctx.samples; ++s) {
    const bool unimodular = (s % 2) == 1;
    const Element x = sample_unit(rng, n, ctx.kind, unimodular);
    const Element y = sample_unit(rng, n, ctx.kind, unimodular);
    lower = std::max(lower, lp_norm(multiply(tensor, x, y), ctx.kind));
  }
  return {std::max(upper, lower), lower, false};
}

OpNorm mult_distance(const Multiplication& m1, const Multiplication& m2) {
  if (m1.dim() != m2.dim()) throw DimensionMismatch("mult_distance: dimensions differ");
  if (!(m1.norm() == m2.norm())) throw DimensionMismatch("mult_distance: norm contexts differ");
  return bilinear_opnorm(m1.tensor() - m2.tensor(), m1.norm());
}

bool mult_norm_sandwich_check(const Multiplication& m, const Element& x) {
  const auto e = find_unit(m);
  if (!e) throw HypothesisViolation("mult_norm_sandwich_check: multiplication is not unital");
  const NormContext& ctx = m.norm();
  const double nx = vector_norm(x, ctx);
  const double lower = nx / vector_norm(*e, ctx);
  const double upper = m.opnorm().value * nx;
  const auto within = [](double lhs, double rhs) { return lhs <= rhs + 1e-9 * std::max(1.0, std::abs(rhs)); };
  for (const LinearMap& op : {left_mult_matrix(m, x), right_mult_matrix(m, x)}) {
    const double norm = linear_opnorm(op, ctx);
    if (!within(lower, norm) || !within(norm, upper)) return false;
  }
  return true;
}

}  // namespace mltp

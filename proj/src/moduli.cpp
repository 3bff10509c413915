#include "mltp/moduli.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mltp/error.hpp"

namespace mltp {

GroupElement::GroupElement(LinearMap map) {
  if (map.rows() != map.cols() || map.rows() == 0) throw std::invalid_argument("group element must be square");
  Eigen::JacobiSVD<LinearMap> svd(map);
  const auto& sv = svd.singularValues();
  if (!(sv(sv.size() - 1) > 1e-14 * sv(0))) throw std::invalid_argument("group element is singular");
  cond_ = sv(0) / sv(sv.size() - 1);
  inverse_ = map.fullPivLu().inverse();
  const Eigen::Index n = map.rows();
  const double err = (map * inverse_ - LinearMap::Identity(n, n)).cwiseAbs().maxCoeff();
  if (err > 1e-10 * cond_) throw std::invalid_argument("group element inverse is inaccurate");
  map_ = std::move(map);
}

GroupElement GroupElement::identity(std::size_t n) {
  const auto i = static_cast<Eigen::Index>(n);
  return GroupElement(LinearMap::Identity(i, i), LinearMap::Identity(i, i), 1.0);
}

GroupElement GroupElement::scalar(std::size_t n, Complex c) {
  if (c == Complex{}) throw std::invalid_argument("group element is singular");
  const auto i = static_cast<Eigen::Index>(n);
  return GroupElement(LinearMap::Identity(i, i) * c, LinearMap::Identity(i, i) / c, 1.0);
}

GroupElement GroupElement::inverted() const { return GroupElement(inverse_, map_, cond_); }

GroupElement compose(const GroupElement& s, const GroupElement& t) {
  if (s.dim() != t.dim()) throw DimensionMismatch("compose: dimensions differ");
  return GroupElement(s.map() * t.map());
}

GroupElement random_group_element(std::size_t n, double max_cond, Rng& rng) {
  if (!(max_cond >= 1.0)) throw std::invalid_argument("max_cond must be at least 1");
  const double log_c = rng.uniform() * std::log(max_cond);
  if (n == 1) {
    const double magnitude = std::exp(log_c - 0.5 * std::log(max_cond));
    return GroupElement::scalar(1, std::polar(magnitude, 2.0 * std::numbers::pi * rng.uniform()));
  }
  const auto dim = static_cast<Eigen::Index>(n);
  const LinearMap u = rng.gaussian_matrix(n, n).householderQr().householderQ();
  const LinearMap v = rng.gaussian_matrix(n, n).householderQr().householderQ();
  Eigen::VectorXd sigma(dim);
  sigma(0) = 1.0;
  sigma(dim - 1) = std::exp(log_c);
  for (Eigen::Index i = 1; i + 1 < dim; ++i) sigma(i) = std::exp(rng.uniform() * log_c);
  sigma *= std::exp(-0.5 * log_c);
  return GroupElement(u * sigma.cast<Complex>().asDiagonal() * v.adjoint());
}

Multiplication act(const GroupElement& t, const Multiplication& m) {
  const std::size_t n = m.dim();
  if (t.dim() != n) throw DimensionMismatch("act: dimensions differ");
  const LinearMap& fwd = t.map();
  const LinearMap& inv = t.inverse();
  StructureTensor shape(n);
  std::vector<Complex> entries(n * n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const Element prod = inv * multiply(m, fwd.col(static_cast<Eigen::Index>(i)), fwd.col(static_cast<Eigen::Index>(j)));
      for (std::size_t k = 0; k < n; ++k) entries[shape.index(i, j, k)] = prod(static_cast<Eigen::Index>(k));
    }
  StructureTensor moved(n, std::move(entries));

  const NormContext& ctx = m.norm();
  const double nt = linear_opnorm(fwd, ctx);
  const double ninv = linear_opnorm(inv, ctx);
  const double inflation = static_cast<double>(n * n * n) * nt * nt * nt * ninv;
  const double tol = default_assoc_tolerance(moved) + m.assoc_defect() * inflation;
  Multiplication out = make_multiplication(std::move(moved), ctx, tol);

  // t^-1 carries * to *_t.
  const double scale = std::max(1.0, out.opnorm().value * ninv * ninv);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const Element lhs = inv * m.tensor().basis_product(i, j);
      const Element rhs = multiply(out, inv.col(static_cast<Eigen::Index>(i)), inv.col(static_cast<Eigen::Index>(j)));
      if (vector_norm(lhs - rhs, ctx) > 1e-9 * scale * std::max(1.0, t.cond()))
        throw ConsistencyFailure("act: t^-1 is not an isomorphism onto the transported algebra");
    }
  return out;
}

double scaling_orbit_norm(const Multiplication& m, std::size_t n) {
  if (n == 0) throw std::invalid_argument("scaling_orbit_norm: n must be positive");
  const Multiplication moved = act(GroupElement::scalar(m.dim(), 1.0 / static_cast<double>(n)), m);
  const double value = moved.opnorm().value;
  if (m.opnorm().exact) {
    const double expected = m.opnorm().value / static_cast<double>(n);
    if (std::abs(value - expected) > 1e-12 * expected)
      throw ConsistencyFailure("scaling_orbit_norm: |t_n . *| differs from |*| / n");
  }
  return value;
}

CertifiedBound action_continuity_bound(const GroupElement& s, const GroupElement& t, const Multiplication& diamond,
                                       const Multiplication& star) {
  if (s.dim() != diamond.dim() || t.dim() != diamond.dim() || star.dim() != diamond.dim())
    throw DimensionMismatch("action_continuity_bound: dimensions differ");
  const NormContext& ctx = diamond.norm();
  const double nd = diamond.opnorm().value;
  const double ns = linear_opnorm(s.map(), ctx);
  const double nt = linear_opnorm(t.map(), ctx);
  const double nt_inv = linear_opnorm(t.inverse(), ctx);
  const double inv_gap = linear_opnorm(s.inverse() - t.inverse(), ctx);
  const double gap = linear_opnorm(s.map() - t.map(), ctx);
  const OpNorm dist = mult_distance(diamond, star);
  const OpNorm measured = mult_distance(act(s, diamond), act(t, star));

  Hypothesis h;
  h.norms = {{"|<>|", nd},      {"|s|", ns},     {"|t|", nt},           {"|t^-1|", nt_inv},
             {"|s^-1-t^-1|", inv_gap}, {"|s-t|", gap}, {"|<>-*|", dist.value}};
  const double bound = nd * ns * ns * inv_gap + nt_inv * (nd * (ns + nt) * gap + nt * nt * dist.value);
  return CertifiedBound::assess(std::move(h), bound, measured.value,
                                dist.exact && measured.exact && diamond.opnorm().exact);
}

JointContinuityReport joint_continuity_check(std::span<const Multiplication> mults, const Multiplication& limit,
                                             std::span<const Element> as, const Element& a,
                                             std::span<const Element> bs, const Element& b, double tail_tol) {
  if (mults.size() != as.size() || mults.size() != bs.size())
    throw DimensionMismatch("joint_continuity_check: sequences have different lengths");
  const NormContext& ctx = limit.norm();
  const double star = limit.opnorm().value;
  const Element ab = multiply(limit, a, b);
  const double nb = vector_norm(b, ctx);
  JointContinuityReport report;
  report.exact_norms = limit.opnorm().exact;
  for (std::size_t i = 0; i < mults.size(); ++i) {
    const OpNorm dist = mult_distance(mults[i], limit);
    report.exact_norms = report.exact_norms && dist.exact;
    const double na = vector_norm(as[i], ctx);
    JointContinuityRow row;
    row.lhs = vector_norm(multiply(mults[i], as[i], bs[i]) - ab, ctx);
    row.rhs = dist.value * na * vector_norm(bs[i], ctx) + star * na * vector_norm(bs[i] - b, ctx) +
              star * nb * vector_norm(as[i] - a, ctx);
    row.holds = row.lhs <= row.rhs + kBoundSlack * (1.0 + row.rhs);
    report.passed = report.passed && row.holds;
    report.rows.push_back(row);
  }
  report.converges = report.rows.empty() || report.rows.back().lhs <= tail_tol;
  return report;
}

BlowupReport boundary_blowup_experiment(const std::function<Multiplication(double)>& family,
                                        const Multiplication& limit, std::vector<double> grid) {
  std::sort(grid.begin(), grid.end(), std::greater<>());
  BlowupReport report;
  double previous = 0.0;
  for (double eps : grid) {
    if (!(eps > 0)) throw std::invalid_argument("boundary_blowup_experiment: grid must be positive");
    const Multiplication m = family(eps);
    BlowupRow row{eps, mult_distance(m, limit).value, std::nullopt};
    if (const auto e = find_unit(m)) {
      row.unit_norm = vector_norm(*e, m.norm());
      if (*row.unit_norm < previous * (1.0 - 1e-12)) report.monotone = false;
      previous = *row.unit_norm;
    } else {
      report.all_unital = false;
    }
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace mltp

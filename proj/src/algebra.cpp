#include "mltp/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mltp/error.hpp"

namespace mltp {

namespace {

void require_dim(const Element& x, std::size_t n, const char* what) {
  if (static_cast<std::size_t>(x.size()) != n)
    throw DimensionMismatch(std::string(what) + ": element of length " + std::to_string(x.size()) +
                            " in dimension " + std::to_string(n));
}

std::string tuple_string(const std::array<std::size_t, 4>& t) {
  return "(" + std::to_string(t[0] + 1) + "," + std::to_string(t[1] + 1) + "," + std::to_string(t[2] + 1) +
         "," + std::to_string(t[3] + 1) + ")";
}

}  // namespace

Element basis(std::size_t n, std::size_t i) {
  Element e = Element::Zero(static_cast<Eigen::Index>(n));
  e(static_cast<Eigen::Index>(i)) = 1.0;
  return e;
}

DefectWitness associativity_witness(const StructureTensor& t) {
  const std::size_t n = t.dim();
  DefectWitness worst;
  std::vector<Complex> lhs(n), rhs(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        std::fill(lhs.begin(), lhs.end(), Complex{});
        std::fill(rhs.begin(), rhs.end(), Complex{});
        // (alpha_i alpha_j) alpha_k and alpha_i (alpha_j alpha_k), coefficient of alpha_p.
        for (std::size_t l = 0; l < n; ++l) {
          const Complex ij = t(i, j, l);
          const Complex jk = t(j, k, l);
          for (std::size_t p = 0; p < n; ++p) {
            if (ij != Complex{}) lhs[p] += ij * t(l, k, p);
            if (jk != Complex{}) rhs[p] += t(i, l, p) * jk;
          }
        }
        for (std::size_t p = 0; p < n; ++p) {
          const double r = std::abs(lhs[p] - rhs[p]);
          if (r > worst.defect) worst = {r, {i, j, k, p}};
        }
      }
  return worst;
}

double associativity_defect(const StructureTensor& tensor) { return associativity_witness(tensor).defect; }

double default_assoc_tolerance(const StructureTensor& tensor) {
  const double scale = 1.0 + tensor.max_abs();
  return 1e-9 * scale * scale;
}

Multiplication make_multiplication(StructureTensor tensor, const NormContext& ctx, std::optional<double> tol) {
  const double limit = tol.value_or(default_assoc_tolerance(tensor));
  if (limit < 0) throw std::invalid_argument("associativity tolerance must be nonnegative");
  const DefectWitness w = associativity_witness(tensor);
  if (w.defect > limit)
    throw AssociativityViolation("not associative: defect " + std::to_string(w.defect) + " exceeds " +
                                     std::to_string(limit) + " at (i,j,k,p)=" + tuple_string(w.tuple),
                                 w.tuple, w.defect);
  OpNorm norm = bilinear_opnorm(tensor, ctx);
  return Multiplication(std::move(tensor), ctx, norm, w.defect);
}

Element multiply(const StructureTensor& t, const Element& x, const Element& y) {
  const std::size_t n = t.dim();
  require_dim(x, n, "multiply");
  require_dim(y, n, "multiply");
  Element z = Element::Zero(static_cast<Eigen::Index>(n));
  const auto entries = t.entries();
  for (std::size_t i = 0; i < n; ++i) {
    const Complex xi = x(static_cast<Eigen::Index>(i));
    if (xi == Complex{}) continue;
    for (std::size_t j = 0; j < n; ++j) {
      const Complex c = xi * y(static_cast<Eigen::Index>(j));
      if (c == Complex{}) continue;
      const std::size_t base = t.index(i, j, 0);
      for (std::size_t k = 0; k < n; ++k) z(static_cast<Eigen::Index>(k)) += c * entries[base + k];
    }
  }
  return z;
}

Element multiply(const Multiplication& m, const Element& x, const Element& y) {
  return multiply(m.tensor(), x, y);
}

LinearMap left_mult_matrix(const Multiplication& m, const Element& x) {
  const std::size_t n = m.dim();
  require_dim(x, n, "left_mult_matrix");
  const StructureTensor& t = m.tensor();
  LinearMap out = LinearMap::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const Complex xi = x(static_cast<Eigen::Index>(i));
    if (xi == Complex{}) continue;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) out(k, j) += xi * t(i, j, k);
  }
  return out;
}

LinearMap right_mult_matrix(const Multiplication& m, const Element& x) {
  const std::size_t n = m.dim();
  require_dim(x, n, "right_mult_matrix");
  const StructureTensor& t = m.tensor();
  LinearMap out = LinearMap::Zero(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const Complex xj = x(static_cast<Eigen::Index>(j));
    if (xj == Complex{}) continue;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) out(k, i) += xj * t(i, j, k);
  }
  return out;
}

std::optional<Element> find_unit(const Multiplication& m, double tol) {
  const std::size_t n = m.dim();
  const StructureTensor& t = m.tensor();
  // Rows (i, k) for e * alpha_i = alpha_i, then rows (i, k) for alpha_i * e = alpha_i.
  LinearMap system(2 * n * n, n);
  Element rhs = Element::Zero(static_cast<Eigen::Index>(2 * n * n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t row = i * n + k;
      for (std::size_t j = 0; j < n; ++j) {
        system(row, j) = t(j, i, k);
        system(n * n + row, j) = t(i, j, k);
      }
      if (i == k) rhs(row) = rhs(n * n + row) = 1.0;
    }
  const auto solver = system.completeOrthogonalDecomposition();
  Element e = solver.solve(rhs);
  // One step of iterative refinement.
  e += solver.solve(Element(rhs - system * e));

  const NormContext& ctx = m.norm();
  double residual = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Element a = basis(n, i);
    residual = std::max(residual, vector_norm(multiply(t, e, a) - a, ctx));
    residual = std::max(residual, vector_norm(multiply(t, a, e) - a, ctx));
  }
  const double scale = std::max(1.0, vector_norm(e, ctx) * m.opnorm().value);
  if (!(residual <= tol * scale)) return std::nullopt;
  return e;
}

bool is_commutative(const Multiplication& m, double tol) {
  const StructureTensor& t = m.tensor();
  const std::size_t n = m.dim();
  const double limit = tol * std::max(1.0, t.max_abs());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (vector_norm(t.basis_product(i, j) - t.basis_product(j, i), m.norm()) > limit) return false;
  return true;
}

Multiplication semigroup_algebra(const SemigroupTable& table, const NormContext& ctx) {
  const std::size_t n = table.size();
  StructureTensor zero(n);
  std::vector<Complex> entries(zero.entries().begin(), zero.entries().end());
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) entries[zero.index(a, b, table(a, b))] = 1.0;
  return make_multiplication(StructureTensor(n, std::move(entries)), ctx);
}

Multiplication direct_sum(const Multiplication& m1, const Multiplication& m2) {
  if (!(m1.norm() == m2.norm())) throw DimensionMismatch("direct_sum: norm contexts differ");
  const std::size_t n1 = m1.dim();
  const std::size_t n = n1 + m2.dim();
  StructureTensor shape(n);
  std::vector<Complex> entries(n * n * n);
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n1; ++j)
      for (std::size_t k = 0; k < n1; ++k) entries[shape.index(i, j, k)] = m1.tensor()(i, j, k);
  for (std::size_t i = 0; i < m2.dim(); ++i)
    for (std::size_t j = 0; j < m2.dim(); ++j)
      for (std::size_t k = 0; k < m2.dim(); ++k)
        entries[shape.index(n1 + i, n1 + j, n1 + k)] = m2.tensor()(i, j, k);
  StructureTensor t(n, std::move(entries));
  // Block tensors have no new residuals, so the larger input defect is the tolerance.
  const double tol = std::max({m1.assoc_defect(), m2.assoc_defect(), default_assoc_tolerance(t)});
  return make_multiplication(std::move(t), m1.norm(), tol);
}

Multiplication convolution_algebra(std::size_t size, std::span<const double> weights, const NormContext& ctx) {
  if (size == 0) throw std::invalid_argument("convolution_algebra: size must be positive");
  if (weights.size() != size) throw std::invalid_argument("convolution_algebra: need one weight per point");
  for (double w : weights)
    if (!(w > 0) || !std::isfinite(w)) throw std::invalid_argument("convolution_algebra: weights must be positive");
  const std::size_t n = size * size;
  StructureTensor shape(n);
  std::vector<Complex> entries(n * n * n);
  // E_ab * E_bd = w_b E_ad.
  for (std::size_t a = 0; a < size; ++a)
    for (std::size_t b = 0; b < size; ++b)
      for (std::size_t d = 0; d < size; ++d)
        entries[shape.index(a * size + b, b * size + d, a * size + d)] = weights[b];
  return make_multiplication(StructureTensor(n, std::move(entries)), ctx);
}

StructureTensor twisted_sum(const Multiplication& a, const Multiplication& b, const LinearMap& t, bool literal,
                            double tol) {
  const std::size_t na = a.dim();
  const std::size_t nb = b.dim();
  if (static_cast<std::size_t>(t.rows()) != na || static_cast<std::size_t>(t.cols()) != nb)
    throw DimensionMismatch("twisted_sum: T must be dim(A) x dim(B)");
  if (!(a.norm() == b.norm())) throw DimensionMismatch("twisted_sum: norm contexts differ");

  const double scale = std::max(1.0, linear_opnorm(t, a.norm()));
  for (std::size_t i = 0; i < nb; ++i)
    for (std::size_t j = 0; j < nb; ++j) {
      const Element lhs = t * b.tensor().basis_product(i, j);
      const Element rhs = multiply(a, t.col(static_cast<Eigen::Index>(i)), t.col(static_cast<Eigen::Index>(j)));
      if (vector_norm(lhs - rhs, a.norm()) > tol * scale * scale)
        throw HypothesisViolation("twisted_sum: T is not an algebra homomorphism at basis pair (" +
                                  std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
    }

  const std::size_t n = na + nb;
  StructureTensor shape(n);
  std::vector<Complex> entries(n * n * n);
  const auto put = [&](std::size_t i, std::size_t j, const Element& a_part, std::size_t offset) {
    for (Eigen::Index k = 0; k < a_part.size(); ++k)
      entries[shape.index(i, j, offset + static_cast<std::size_t>(k))] += a_part(k);
  };
  for (std::size_t i = 0; i < na; ++i) {
    const Element ai = basis(na, i);
    for (std::size_t j = 0; j < na; ++j) put(i, j, a.tensor().basis_product(i, j), 0);
    // a T(b')
    for (std::size_t j = 0; j < nb; ++j) put(i, na + j, multiply(a, ai, t.col(static_cast<Eigen::Index>(j))), 0);
  }
  for (std::size_t i = 0; i < nb; ++i) {
    // T(b) a'; the verbatim term T(b) a vanishes on basis pairs.
    if (!literal)
      for (std::size_t j = 0; j < na; ++j)
        put(na + i, j, multiply(a, t.col(static_cast<Eigen::Index>(i)), basis(na, j)), 0);
    for (std::size_t j = 0; j < nb; ++j) put(na + i, na + j, b.tensor().basis_product(i, j), na);
  }
  return StructureTensor(n, std::move(entries));
}

Element twisted_product_verbatim(const Multiplication& a, const Multiplication& b, const LinearMap& t,
                                 const Element& x, const Element& y) {
  const Eigen::Index na = static_cast<Eigen::Index>(a.dim());
  const Eigen::Index nb = static_cast<Eigen::Index>(b.dim());
  require_dim(x, a.dim() + b.dim(), "twisted_product_verbatim");
  require_dim(y, a.dim() + b.dim(), "twisted_product_verbatim");
  const Element xa = x.head(na), xb = x.tail(nb), ya = y.head(na), yb = y.tail(nb);
  Element out(na + nb);
  out.head(na) = multiply(a, xa, ya) + multiply(a, xa, t * yb) + multiply(a, t * xb, xa);
  out.tail(nb) = multiply(b, xb, yb);
  return out;
}

}  // namespace mltp

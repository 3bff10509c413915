#pragma once

#include <optional>

#include "mltp/norms.hpp"
#include "mltp/types.hpp"

namespace mltp {

/// Max over all (i, j, k, p) of |sum_l lambda_ijl lambda_lkp - sum_q lambda_iqp lambda_jkq|.
double associativity_defect(const StructureTensor& tensor);

/// Same as associativity_defect, also reporting the worst tuple (i, j, k, p).
struct DefectWitness {
  double defect = 0.0;
  std::array<std::size_t, 4> tuple{};
};
DefectWitness associativity_witness(const StructureTensor& tensor);

/// 1e-9 * (1 + max|lambda|)^2.
double default_assoc_tolerance(const StructureTensor& tensor);

/// A validated associative bilinear map with cached operator norm.
class Multiplication {
 public:
  const StructureTensor& tensor() const { return tensor_; }
  const NormContext& norm() const { return ctx_; }
  const OpNorm& opnorm() const { return opnorm_; }
  double assoc_defect() const { return defect_; }
  std::size_t dim() const { return tensor_.dim(); }

 private:
  Multiplication(StructureTensor tensor, NormContext ctx, OpNorm opnorm, double defect)
      : tensor_(std::move(tensor)), ctx_(ctx), opnorm_(opnorm), defect_(defect) {}

  friend Multiplication make_multiplication(StructureTensor, const NormContext&, std::optional<double>);

  StructureTensor tensor_;
  NormContext ctx_;
  OpNorm opnorm_;
  double defect_ = 0.0;
};

/// Validates associativity (tolerance defaults to default_assoc_tolerance) and
/// caches the operator norm. Throws AssociativityViolation naming the worst
/// (i, j, k, p) when the defect exceeds the tolerance.
Multiplication make_multiplication(StructureTensor tensor, const NormContext& ctx = {},
                                   std::optional<double> tol = std::nullopt);

Element multiply(const Multiplication& m, const Element& x, const Element& y);
Element multiply(const StructureTensor& t, const Element& x, const Element& y);

/// Matrix of y -> x * y.
LinearMap left_mult_matrix(const Multiplication& m, const Element& x);
/// Matrix of y -> y * x.
LinearMap right_mult_matrix(const Multiplication& m, const Element& x);

inline constexpr double kDefaultUnitTol = 1e-9;

/// Two-sided unit, from the least-squares solution of e * alpha_i = alpha_i and
/// alpha_i * e = alpha_i over all i. Empty when the residual exceeds `tol`
/// (relative to max(1, ||e||)).
std::optional<Element> find_unit(const Multiplication& m, double tol = kDefaultUnitTol);

bool is_commutative(const Multiplication& m, double tol = 1e-12);

Multiplication semigroup_algebra(const SemigroupTable& table, const NormContext& ctx = {});

/// (x1, x2) * (y1, y2) = (x1 *1 y1, x2 *2 y2). Norm contexts must agree.
Multiplication direct_sum(const Multiplication& m1, const Multiplication& m2);

/// Functions on X x X for X = {0..size-1}, (f * g)(x, y) = sum_z f(x, z) g(z, y) w_z.
/// Basis E_xy sits at coordinate x * size + y.
Multiplication convolution_algebra(std::size_t size, std::span<const double> weights,
                                   const NormContext& ctx = {});

/// Twisted sum A (+) B for an algebra homomorphism T: B -> A (T is dim A x dim B).
///
/// literal = false: (a, b) * (a', b') = (aa' + a T(b') + T(b) a', bb').
/// literal = true:  the cross term T(b) a is taken verbatim; it does not depend
/// on the second factor, so on basis pairs it vanishes and the bilinear
/// extension is (aa' + a T(b'), bb').
///
/// Returns the raw tensor; it is the caller's job to validate it. Throws
/// HypothesisViolation if T fails the homomorphism check on basis pairs.
StructureTensor twisted_sum(const Multiplication& a, const Multiplication& b, const LinearMap& t,
                            bool literal, double tol = 1e-9);

/// Pointwise evaluation of the verbatim twisted formula, which is not bilinear.
/// `x` and `y` are coordinates on A (+) B.
Element twisted_product_verbatim(const Multiplication& a, const Multiplication& b,
                                 const LinearMap& t, const Element& x, const Element& y);

/// Basis vector alpha_i of C^n.
Element basis(std::size_t n, std::size_t i);

}  // namespace mltp

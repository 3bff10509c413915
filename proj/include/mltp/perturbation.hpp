#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mltp/algebra.hpp"

namespace mltp {

/// Relative slack added to every bound comparison.
inline constexpr double kBoundSlack = 1e-9;

/// Hypothesis constants attached to a certified bound. `norms` lists the
/// ingredient norms by name, in the order they enter the bound.
struct Hypothesis {
  double r = 0.0;
  double s = 1.0;
  std::optional<double> M;
  std::optional<double> C_M;
  std::vector<std::pair<std::string, double>> norms;
};

/// A theorem's bound next to the quantity it controls.
///
/// `satisfied` is always computed, but it only certifies anything when
/// `exact_norms` is true; with sampled bilinear norms it is informational.
struct CertifiedBound {
  Hypothesis hypothesis;
  double bound = 0.0;
  double measured = 0.0;
  bool satisfied = true;
  bool exact_norms = true;

  /// measured / bound; 0 when both vanish, +inf when only bound does.
  double ratio() const;

  static CertifiedBound assess(Hypothesis hypothesis, double bound, double measured, bool exact_norms);
};

/// 1 + r / (1 - r). Throws std::invalid_argument unless 0 <= r < 1.
double s_factor(double r);

/// The constant in ||a^-1_<> - a^-1_*|| <= s^2 C_M |<> - *|, obtained by
/// chaining the Neumann estimates for l_a^-1 with the unit estimate:
/// s M^5 (M + s r / M) + s M^4 <= s^2 (M^6 + 2 M^4) once every cap is <= M.
double inverse_perturbation_constant(double M);

/// Inverse of (id - c) for a square matrix with |c| < 1 as sum_k c^k, stopped
/// when the geometric tail |c|^(K+1) / (1 - |c|) drops below `tail_target`.
/// `id_minus_c` is the matrix to invert. Throws ConvergenceFailure if |c| >= 1.
LinearMap neumann_inverse(const LinearMap& id_minus_c, const NormContext& ctx, double tail_target = 1e-14);

struct NeumannInversion {
  Element inverse;
  CertifiedBound certificate;
  std::size_t terms = 0;
};

/// b^-1 = sum_k c^k a^-1 with c = e - a^-1 b, for ||b - a|| <= r (||a^-1|| |*|^2)^-1.
/// Bound: (||e|| |*| + r/(1-r)) |*|^2 ||a^-1||^2 ||b - a||.
NeumannInversion neumann_invert(const Multiplication& m, const Element& a, const Element& a_inv,
                                const Element& b, double r);

struct PerturbedUnit {
  Element unit;
  CertifiedBound certificate;
};

/// Unit of `diamond` as l_{<>, e_*}^-1(e_*), for |<> - *| <= r / ||e_*||.
/// Bound: s |<> - *| ||e_*||^2. Cross-checked against find_unit(diamond).
PerturbedUnit perturbed_unit(const Multiplication& star, const Multiplication& diamond, double r);

/// ||e_<> - e_*|| <= |<> - *| ||e_<>|| ||e_*||.
CertifiedBound unit_distance_bound(const Multiplication& star, const Multiplication& diamond);

struct PerturbedInverse {
  Element inverse;
  CertifiedBound certificate;
};

/// Inverse of `a` in (E, <>) with the bound s^2 C_M |<> - *|, under the caps
/// |*|, ||e_*||, ||a||, ||a^-1_*|| <= M and |<> - *| <= r M^-3.
PerturbedInverse perturbed_inverse_bound(const Multiplication& star, const Multiplication& diamond,
                                         const Element& a, double r, double M);

}  // namespace mltp

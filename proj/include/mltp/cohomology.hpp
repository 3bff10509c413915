#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "mltp/algebra.hpp"

namespace mltp {

/// Matrix of the Hochschild coboundary delta^deg : C^deg(A, A) -> C^(deg+1)(A, A).
///
/// A cochain f in C^d is stored as f(alpha_j1, ..., alpha_jd)_k at index
/// ((j1 * n + j2) * n + ... + jd) * n + k, and
///   (delta f)(a1..a_{d+1}) = a1 f(a2..) + sum_i (-1)^i f(.., a_i a_{i+1}, ..)
///                            + (-1)^(d+1) f(a1..a_d) a_{d+1}.
/// Throws std::length_error when deg > 4 or n^(deg+2) > 10^6.
LinearMap coboundary_matrix(const Multiplication& m, std::size_t deg);

inline constexpr std::size_t kBalanceMaxIterations = 400;
inline constexpr double kBalanceTol = 1e-3;
inline constexpr std::size_t kBalanceWindow = 20;
inline constexpr double kBalanceStall = 1e-2;
/// Rank threshold floor in units of the estimated tensor round-off.
inline constexpr double kNoiseFactor = 1e3;

/// Well-conditioned orbit representative g.m for rank computations.
///
/// Descends F(g) = ||g.lambda||^2 + ||g^-1 e||^2 (e the unit of m) along
/// Hermitian flows g -> g exp(-eta mu), mu the moment map. An ill-conditioned
/// transport inflates F by powers of its condition number, so the first steps
/// undo it. F need not attain its infimum on an orbit (the descent can drift
/// towards a degeneration), so the descent stops once the moment map is small
/// relative to F or F drops by less than kBalanceStall over kBalanceWindow
/// steps. Non-unital instances are returned unchanged.
struct BalancedForm {
  StructureTensor tensor;
  LinearMap transport;  // tensor == transport . m
  std::optional<Element> unit;  // in the balanced coordinates
  std::size_t iterations = 0;
  double residual = 0.0;  // |moment map|_F / potential at exit
  bool converged = true;  // false when stopped by the stall rule or the iteration cap
};
BalancedForm balanced_representative(const Multiplication& m);

struct CohomologySignature {
  std::vector<std::size_t> dims;  // dim H^0 .. dim H^K
  double rank_tol = 1e-8;
  bool rigid_certificate = false;
  /// Singular values of delta^0 .. delta^K, descending.
  std::vector<std::vector<double>> singular_values;
  /// Singular values within two decades of the rank threshold.
  std::vector<double> ambiguous;
  double balance_residual = 0.0;
  bool normalized = false;   // unital: normalized cochains on the balanced representative
  double noise_floor = 0.0;  // kNoiseFactor * (defect and unit residual relative to max |lambda|)
  double threshold = 0.0;    // max(rank_tol * largest singular value, noise_floor)

  bool rank_ambiguous() const { return !ambiguous.empty(); }
};

/// dim H^d = dim ker delta^d - rank delta^(d-1).
///
/// Unital instances use normalized cochains (vanishing on the unit) of the
/// balanced representative, in the basis (e, orthonormal complement of e);
/// other instances use the full complex as given. Ranks count singular values
/// above max(rank_tol * s_max, noise_floor), where s_max is the largest singular
/// value of any delta^0 .. delta^K. The rigidity certificate is set when K >= 3
/// and H^2 = H^3 = 0.
CohomologySignature hochschild_dims(const Multiplication& m, std::size_t max_deg = 3, double rank_tol = 1e-8);

struct InvariantSignature {
  bool unital = false;
  bool commutative = false;
  CohomologySignature cohomology;

  bool operator==(const InvariantSignature& o) const {
    return unital == o.unital && commutative == o.commutative && cohomology.dims == o.cohomology.dims &&
           cohomology.rigid_certificate == o.cohomology.rigid_certificate;
  }
};

InvariantSignature invariant_signature(const Multiplication& m, std::size_t max_deg = 3);

}  // namespace mltp

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mltp/algebra.hpp"

namespace mltp {

/// Singular values below this fraction of the largest count as zero.
inline constexpr double kSingularRelTol = 1e-10;
inline constexpr double kDedupTol = 1e-8;

/// a is invertible iff l_a and r_a both are. A smallest singular value at or
/// below sigma_rel_tol * max(largest singular value, reference_scale) counts as
/// zero; `reference_scale` lets callers that form a as a difference measure the
/// threshold against the operands rather than against round-off.
bool is_invertible(const Multiplication& m, const Element& a, double sigma_rel_tol = kSingularRelTol,
                   double reference_scale = 0.0);

struct Inversion {
  std::optional<Element> inverse;
  /// Smallest singular value of l_a or r_a is within three decades of the threshold.
  bool near_singular = false;
};

/// Solves l_a x = e and checks a x = x a = e. Throws HypothesisViolation if m is not unital.
Inversion invert(const Multiplication& m, const Element& a, double sigma_rel_tol = kSingularRelTol);

/// Finite set of complex numbers, pairwise further apart than `dedup_tol`,
/// sorted lexicographically by (re, im).
struct SpectrumSet {
  std::vector<Complex> points;
  double dedup_tol = kDedupTol;

  /// Distance from z to the nearest point; +inf for the empty set.
  double distance(Complex z) const;
  bool contains(Complex z, double tol) const { return distance(z) <= tol; }
};

/// Clusters points closer than `tol` (cluster means) and sorts the result.
SpectrumSet make_spectrum_set(std::vector<Complex> points, double tol);

/// Union of the eigenvalues of l_a and r_a.
SpectrumSet spectrum(const Multiplication& m, const Element& a, double dedup_tol = kDedupTol);

/// Grid points z for which a - z e is not invertible, thresholds scaled by
/// |l_a| + |z| |l_e| (2-norms). Test oracle for `spectrum`.
std::vector<Complex> spectrum_bruteforce(const Multiplication& m, const Element& a, std::span<const Complex> grid,
                                         double sigma_rel_tol = kSingularRelTol);

/// Finite-tail surrogate of sigma_*(a) containing limsup sigma_{*_n}(a).
///
/// A point z of sigma_{*_n0}(a) persists when every later sigma_{*_k}(a),
/// k >= n0, has a point within `tol` of z. The check passes when every
/// persistent point lies within `tol` of sigma_*(a).
struct SemicontinuityReport {
  std::size_t tail_start = 0;
  double tol = 0.0;
  SpectrumSet limit_spectrum;
  std::vector<Complex> persistent;
  /// max over persistent points of the distance to the limit spectrum (0 if none).
  double worst_distance = 0.0;
  /// For k >= tail_start: sup over sigma_{*_k}(a) of the distance to sigma_*(a).
  std::vector<double> tail_excess;
  bool passed = true;
};

SemicontinuityReport spectral_semicontinuity(std::span<const Multiplication> sequence, const Multiplication& limit,
                                             const Element& a, double tol,
                                             std::optional<std::size_t> tail_start = std::nullopt);

}  // namespace mltp

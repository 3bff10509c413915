#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mltp/algebra.hpp"
#include "mltp/perturbation.hpp"
#include "mltp/random.hpp"

namespace mltp {

/// Invertible linear map t together with t^-1 and its 2-norm condition number.
class GroupElement {
 public:
  /// Throws std::invalid_argument if `map` is not square or numerically singular.
  explicit GroupElement(LinearMap map);

  static GroupElement identity(std::size_t n);
  static GroupElement scalar(std::size_t n, Complex c);

  const LinearMap& map() const { return map_; }
  const LinearMap& inverse() const { return inverse_; }
  double cond() const { return cond_; }
  std::size_t dim() const { return static_cast<std::size_t>(map_.rows()); }

  GroupElement inverted() const;

 private:
  GroupElement(LinearMap map, LinearMap inverse, double cond)
      : map_(std::move(map)), inverse_(std::move(inverse)), cond_(cond) {}

  LinearMap map_;
  LinearMap inverse_;
  double cond_ = 1.0;
};

/// x -> s(t(x)).
GroupElement compose(const GroupElement& s, const GroupElement& t);

/// U diag(sigma) V^H with Haar-like unitaries and singular values in [1, c],
/// where c is log-uniform in [1, max_cond]; cond() == c.
GroupElement random_group_element(std::size_t n, double max_cond, Rng& rng);

/// t . *, the multiplication a *_t b = t^-1(t(a) * t(b)). t^-1 is an algebra
/// isomorphism (E, *) -> (E, *_t); this is checked on basis pairs.
///
/// Composition law: act(t, act(s, m)) == act(compose(s, t), m).
Multiplication act(const GroupElement& t, const Multiplication& m);

/// |t_n . *| for t_n = id / n, checked against |*| / n (relative 1e-12) when the
/// bilinear norm is exact. Throws ConsistencyFailure if the scaling law fails.
double scaling_orbit_norm(const Multiplication& m, std::size_t n);

/// |<>_s - *_t| <= |<>| |s|^2 |s^-1 - t^-1| + |t^-1| (|<>| (|s| + |t|) |s - t| + |t|^2 |<> - *|)
/// with <> = `diamond`, * = `star`.
CertifiedBound action_continuity_bound(const GroupElement& s, const GroupElement& t, const Multiplication& diamond,
                                       const Multiplication& star);

struct JointContinuityRow {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = true;
};

struct JointContinuityReport {
  std::vector<JointContinuityRow> rows;
  bool passed = true;
  /// The last left-hand side is at most the requested tail tolerance.
  bool converges = true;
  bool exact_norms = true;
};

/// ||a_n *_n b_n - a * b|| <= |*_n - *| ||a_n|| ||b_n|| + |*| ||a_n|| ||b_n - b|| + |*| ||b|| ||a_n - a||
/// for every n.
JointContinuityReport joint_continuity_check(std::span<const Multiplication> mults, const Multiplication& limit,
                                             std::span<const Element> as, const Element& a,
                                             std::span<const Element> bs, const Element& b, double tail_tol);

struct BlowupRow {
  double eps = 0.0;
  double distance = 0.0;
  std::optional<double> unit_norm;
};

struct BlowupReport {
  std::vector<BlowupRow> rows;  // eps decreasing
  bool all_unital = true;
  bool monotone = true;
};

/// Tabulates (eps, |*_eps - *_0|, ||e_eps||) for a family approaching a
/// non-unital limit; `monotone` means ||e_eps|| does not decrease as eps does.
BlowupReport boundary_blowup_experiment(const std::function<Multiplication(double)>& family,
                                        const Multiplication& limit, std::vector<double> grid);

}  // namespace mltp

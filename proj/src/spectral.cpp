#include "mltp/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mltp/error.hpp"

namespace mltp {

namespace {

Element require_unit(const Multiplication& m, const char* what) {
  auto e = find_unit(m);
  if (!e) throw HypothesisViolation(std::string(what) + ": multiplication is not unital");
  return *std::move(e);
}

// Smallest singular value over max(largest, reference); 0 for the zero matrix.
double singular_ratio(const LinearMap& op, double reference = 0.0) {
  Eigen::JacobiSVD<LinearMap> svd(op);
  const auto& s = svd.singularValues();
  const double scale = std::max(s(0), reference);
  if (s.size() == 0 || scale == 0.0) return 0.0;
  return s(s.size() - 1) / scale;
}

double spectral_norm(const LinearMap& op) { return Eigen::JacobiSVD<LinearMap>(op).singularValues()(0); }

bool lex_less(Complex a, Complex b) {
  return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
}

}  // namespace

bool is_invertible(const Multiplication& m, const Element& a, double sigma_rel_tol, double reference_scale) {
  return singular_ratio(left_mult_matrix(m, a), reference_scale) > sigma_rel_tol &&
         singular_ratio(right_mult_matrix(m, a), reference_scale) > sigma_rel_tol;
}

Inversion invert(const Multiplication& m, const Element& a, double sigma_rel_tol) {
  const Element e = require_unit(m, "invert");
  const LinearMap left = left_mult_matrix(m, a);
  const double ratio = std::min(singular_ratio(left), singular_ratio(right_mult_matrix(m, a)));
  Inversion out;
  out.near_singular = ratio <= 1e3 * sigma_rel_tol;
  if (ratio <= sigma_rel_tol) return out;

  const Element x = left.fullPivLu().solve(e);
  const NormContext& ctx = m.norm();
  const double scale = std::max(1.0, m.opnorm().value * vector_norm(a, ctx) * vector_norm(x, ctx));
  const double err = std::max(vector_norm(multiply(m, a, x) - e, ctx), vector_norm(multiply(m, x, a) - e, ctx));
  if (err <= 1e-9 * scale) out.inverse = x;
  return out;
}

double SpectrumSet::distance(Complex z) const {
  double best = std::numeric_limits<double>::infinity();
  for (Complex p : points) best = std::min(best, std::abs(p - z));
  return best;
}

SpectrumSet make_spectrum_set(std::vector<Complex> points, double tol) {
  // Single-linkage clustering, repeated until the cluster means are separated.
  bool merged = true;
  while (merged) {
    merged = false;
    std::vector<Complex> means;
    std::vector<std::size_t> counts;
    for (Complex p : points) {
      bool placed = false;
      for (std::size_t c = 0; c < means.size() && !placed; ++c) {
        if (std::abs(means[c] - p) <= tol) {
          means[c] = (means[c] * static_cast<double>(counts[c]) + p) / static_cast<double>(counts[c] + 1);
          ++counts[c];
          placed = merged = true;
        }
      }
      if (!placed) {
        means.push_back(p);
        counts.push_back(1);
      }
    }
    points = std::move(means);
  }
  std::sort(points.begin(), points.end(), lex_less);
  return {std::move(points), tol};
}

SpectrumSet spectrum(const Multiplication& m, const Element& a, double dedup_tol) {
  require_unit(m, "spectrum");
  std::vector<Complex> points;
  for (const LinearMap& op : {left_mult_matrix(m, a), right_mult_matrix(m, a)}) {
    Eigen::ComplexEigenSolver<LinearMap> solver(op, false);
    if (solver.info() != Eigen::Success) throw ConvergenceFailure("spectrum: eigenvalue solver failed");
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) points.push_back(solver.eigenvalues()(i));
  }
  return make_spectrum_set(std::move(points), dedup_tol);
}

std::vector<Complex> spectrum_bruteforce(const Multiplication& m, const Element& a, std::span<const Complex> grid,
                                         double sigma_rel_tol) {
  const Element e = require_unit(m, "spectrum_bruteforce");
  const double norm_a = std::max(spectral_norm(left_mult_matrix(m, a)), spectral_norm(right_mult_matrix(m, a)));
  const double norm_e = spectral_norm(left_mult_matrix(m, e));
  std::vector<Complex> out;
  for (Complex z : grid)
    if (!is_invertible(m, a - z * e, sigma_rel_tol, norm_a + std::abs(z) * norm_e)) out.push_back(z);
  return out;
}

SemicontinuityReport spectral_semicontinuity(std::span<const Multiplication> sequence, const Multiplication& limit,
                                             const Element& a, double tol, std::optional<std::size_t> tail_start) {
  SemicontinuityReport report;
  report.tol = tol;
  report.limit_spectrum = spectrum(limit, a);
  if (sequence.empty()) return report;
  report.tail_start = std::min(tail_start.value_or(sequence.size() / 2), sequence.size() - 1);

  std::vector<SpectrumSet> tail;
  for (std::size_t k = report.tail_start; k < sequence.size(); ++k) {
    tail.push_back(spectrum(sequence[k], a));
    double excess = 0.0;
    for (Complex z : tail.back().points) excess = std::max(excess, report.limit_spectrum.distance(z));
    report.tail_excess.push_back(excess);
  }
  for (Complex z : tail.front().points) {
    const bool persists =
        std::all_of(tail.begin() + 1, tail.end(), [&](const SpectrumSet& s) { return s.contains(z, tol); });
    if (!persists) continue;
    report.persistent.push_back(z);
    report.worst_distance = std::max(report.worst_distance, report.limit_spectrum.distance(z));
  }
  report.passed = report.worst_distance <= tol;
  return report;
}

}  // namespace mltp

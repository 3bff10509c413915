#include "mltp/cohomology.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "mltp/error.hpp"

namespace mltp {

namespace {

std::size_t ipow(std::size_t base, std::size_t exp) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) out *= base;
  return out;
}

// Coboundary on cochains whose arguments range over basis vectors skip..n-1.
// skip = 0 gives the full complex; skip = 1 with alpha_0 the unit gives the
// normalized complex, where components along alpha_0 of inner products drop out.
LinearMap coboundary_of(const StructureTensor& t, std::size_t deg, std::size_t skip) {
  const std::size_t n = t.dim();
  if (deg > 4) throw std::length_error("coboundary_matrix: degree above 4");
  if (ipow(n, deg + 2) > 1'000'000) throw std::length_error("coboundary_matrix: n^(deg+2) exceeds 10^6");
  const std::size_t alphabet = n - skip;
  const std::size_t in_tuples = ipow(alphabet, deg + 1);
  LinearMap delta = LinearMap::Zero(static_cast<Eigen::Index>(in_tuples * n),
                                    static_cast<Eigen::Index>(ipow(alphabet, deg) * n));

  std::vector<std::size_t> idx(deg + 1);
  // Column of f(alpha_{j_1}, ..., alpha_{j_d})_k given the d arguments.
  const auto column = [&](const std::vector<std::size_t>& args, std::size_t k) {
    std::size_t c = 0;
    for (std::size_t a : args) c = c * alphabet + (a - skip);
    return c * n + k;
  };
  std::vector<std::size_t> args(deg);
  for (std::size_t tuple = 0; tuple < in_tuples; ++tuple) {
    for (std::size_t pos = deg + 1, rest = tuple; pos-- > 0; rest /= alphabet) idx[pos] = rest % alphabet + skip;
    for (std::size_t p = 0; p < n; ++p) {
      const auto row = static_cast<Eigen::Index>(tuple * n + p);
      // a_1 f(a_2, ..., a_{d+1})
      std::copy(idx.begin() + 1, idx.end(), args.begin());
      for (std::size_t k = 0; k < n; ++k) delta(row, column(args, k)) += t(idx[0], k, p);
      // (-1)^i f(..., a_i a_{i+1}, ...)
      for (std::size_t i = 0; i < deg; ++i) {
        const double sign = (i % 2 == 0) ? -1.0 : 1.0;
        for (std::size_t a = 0, out = 0; a <= deg; ++a) {
          if (a == i + 1) continue;
          args[out++] = idx[a];
        }
        for (std::size_t l = skip; l < n; ++l) {
          const Complex c = t(idx[i], idx[i + 1], l);
          if (c == Complex{}) continue;
          args[i] = l;
          delta(row, column(args, p)) += sign * c;
        }
      }
      // (-1)^(d+1) f(a_1, ..., a_d) a_{d+1}
      std::copy(idx.begin(), idx.end() - 1, args.begin());
      const double sign = (deg % 2 == 0) ? -1.0 : 1.0;
      for (std::size_t k = 0; k < n; ++k) delta(row, column(args, k)) += sign * t(k, idx[deg], p);
    }
  }
  return delta;
}

StructureTensor transport(const StructureTensor& t, const LinearMap& g, const LinearMap& g_inv) {
  const std::size_t n = t.dim();
  const auto dim = static_cast<Eigen::Index>(n);
  std::vector<LinearMap> slices(n, LinearMap(dim, dim));
  for (std::size_t k = 0; k < n; ++k) {
    LinearMap a(dim, dim);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) a(Eigen::Index(i), Eigen::Index(j)) = t(i, j, k);
    slices[k] = g.transpose() * a * g;
  }
  std::vector<Complex> out(n * n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        Complex v = 0.0;
        for (std::size_t l = 0; l < n; ++l) v += g_inv(Eigen::Index(k), Eigen::Index(l)) * slices[l](Eigen::Index(i), Eigen::Index(j));
        out[t.index(i, j, k)] = v;
      }
  return StructureTensor(n, std::move(out));
}

double potential(const StructureTensor& t, const std::optional<Element>& e) {
  double f = 0.0;
  for (Complex c : t.entries()) f += std::norm(c);
  return e ? f + e->squaredNorm() : f;
}

// Gradient of the potential along Hermitian directions:
// partial traces of Lambda^H Lambda minus Lambda Lambda^H minus e e^H.
LinearMap moment_map(const StructureTensor& t, const std::optional<Element>& e) {
  const std::size_t n = t.dim();
  const auto dim = static_cast<Eigen::Index>(n);
  LinearMap mu = LinearMap::Zero(dim, dim);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        const Complex c = t(i, j, k);
        for (std::size_t x = 0; x < n; ++x) {
          mu(Eigen::Index(x), Eigen::Index(i)) += std::conj(t(x, j, k)) * c;
          mu(Eigen::Index(x), Eigen::Index(j)) += std::conj(t(i, x, k)) * c;
          mu(Eigen::Index(k), Eigen::Index(x)) -= c * std::conj(t(i, j, x));
        }
      }
  if (e) mu -= (*e) * e->adjoint();
  else mu -= (mu.trace() / double(n)) * LinearMap::Identity(dim, dim);
  return 0.5 * (mu + mu.adjoint().eval());
}

// Largest deviation of alpha_0 from a two-sided unit.
double unit_residual(const StructureTensor& t) {
  const std::size_t n = t.dim();
  double worst = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) {
      const double target = j == k ? 1.0 : 0.0;
      worst = std::max({worst, std::abs(t(0, j, k) - target), std::abs(t(j, 0, k) - target)});
    }
  return worst;
}

std::vector<double> singular_values(const LinearMap& m) {
  if (m.rows() == 0 || m.cols() == 0) return {};
  Eigen::BDCSVD<LinearMap> svd(m);
  const Eigen::VectorXd& s = svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

}  // namespace

LinearMap coboundary_matrix(const Multiplication& m, std::size_t deg) { return coboundary_of(m.tensor(), deg, 0); }

BalancedForm balanced_representative(const Multiplication& m) {
  const std::size_t n = m.dim();
  const auto dim = static_cast<Eigen::Index>(n);
  BalancedForm out{m.tensor(), LinearMap::Identity(dim, dim), find_unit(m), 0, 0.0, true};
  std::optional<Element>& e = out.unit;
  if (!e) return out;
  double f = potential(out.tensor, e);
  if (!(f > 0)) return out;
  double eta = 0.0;
  double checkpoint = f;
  for (; out.iterations < kBalanceMaxIterations; ++out.iterations) {
    const LinearMap mu = moment_map(out.tensor, e);
    out.residual = mu.norm() / f;
    if (out.residual <= kBalanceTol) return out;
    if (out.iterations > 0 && out.iterations % kBalanceWindow == 0) {
      if (checkpoint - f < kBalanceStall * f) {
        out.converged = false;
        return out;
      }
      checkpoint = f;
    }
    Eigen::SelfAdjointEigenSolver<LinearMap> eig(mu);
    const Eigen::VectorXd& w = eig.eigenvalues();
    const double spread = std::max(std::abs(w(0)), std::abs(w(dim - 1)));
    // Step length in log space, kept between iterations and capped at 1.
    eta = std::min(eta > 0 ? 2.0 * eta : 0.5 / spread, 1.0 / spread);
    bool moved = false;
    for (int halving = 0; halving < 40 && !moved; ++halving) {
      const Eigen::VectorXcd up = (-eta * w).array().exp().cast<Complex>();
      const Eigen::VectorXcd down = (eta * w).array().exp().cast<Complex>();
      const LinearMap g = eig.eigenvectors() * up.asDiagonal() * eig.eigenvectors().adjoint();
      const LinearMap g_inv = eig.eigenvectors() * down.asDiagonal() * eig.eigenvectors().adjoint();
      StructureTensor next = transport(out.tensor, g, g_inv);
      const Element next_e = g_inv * (*e);
      const double next_f = potential(next, next_e);
      if (next_f < f) {
        out.tensor = std::move(next);
        out.transport = out.transport * g;
        e = next_e;
        f = next_f;
        moved = true;
      } else {
        eta *= 0.5;
      }
    }
    if (!moved) return out;
  }
  out.converged = false;
  return out;
}

CohomologySignature hochschild_dims(const Multiplication& m, std::size_t max_deg, double rank_tol) {
  const std::size_t n = m.dim();
  const auto dim = static_cast<Eigen::Index>(n);
  CohomologySignature sig;
  sig.rank_tol = rank_tol;
  const BalancedForm balanced = balanced_representative(m);
  sig.balance_residual = balanced.residual;

  StructureTensor work = balanced.tensor;
  std::size_t skip = 0;
  double noise = associativity_defect(work) / std::max(work.max_abs(), 1e-300);
  if (balanced.unit) {
    // Basis (e, orthonormal complement of e) for the normalized complex.
    const Element& e = *balanced.unit;
    LinearMap basis = Eigen::HouseholderQR<LinearMap>(e).householderQ() * LinearMap::Identity(dim, dim);
    basis.col(0) = e;
    const LinearMap basis_inv = basis.inverse();
    work = transport(work, basis, basis_inv);
    skip = 1;
    noise = std::max(associativity_defect(work) / std::max(work.max_abs(), 1e-300), unit_residual(work));
  }
  sig.normalized = skip == 1;
  sig.noise_floor = kNoiseFactor * noise;

  double scale = 0.0;
  for (std::size_t d = 0; d <= max_deg; ++d) {
    sig.singular_values.push_back(singular_values(coboundary_of(work, d, skip)));
    if (!sig.singular_values.back().empty()) scale = std::max(scale, sig.singular_values.back().front());
  }
  // One reference scale for the whole complex, so that a coboundary vanishing in
  // exact arithmetic (delta^0 of a commutative algebra) is not measured against its own round-off.
  sig.threshold = std::max(rank_tol * scale, sig.noise_floor);
  std::vector<std::size_t> ranks;
  for (std::size_t d = 0; d <= max_deg; ++d) {
    std::size_t rank = 0;
    for (double v : sig.singular_values[d]) {
      if (v > sig.threshold && v > 0) ++rank;
      if (v > 0 && v > 1e-2 * sig.threshold && v < 1e2 * sig.threshold) sig.ambiguous.push_back(v);
    }
    ranks.push_back(rank);
    const std::size_t kernel = ipow(n - skip, d) * n - rank;
    const std::size_t image = d == 0 ? 0 : ranks[d - 1];
    if (kernel < image) throw ConsistencyFailure("hochschild_dims: numerical ranks violate delta delta = 0");
    sig.dims.push_back(kernel - image);
  }
  sig.rigid_certificate = max_deg >= 3 && sig.dims[2] == 0 && sig.dims[3] == 0;
  return sig;
}

InvariantSignature invariant_signature(const Multiplication& m, std::size_t max_deg) {
  InvariantSignature sig;
  sig.unital = find_unit(m).has_value();
  sig.commutative = is_commutative(m, 1e-9);
  sig.cohomology = hochschild_dims(m, max_deg);
  return sig;
}

}  // namespace mltp

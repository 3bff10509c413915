#include "mltp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "mltp/cohomology.hpp"
#include "mltp/error.hpp"
#include "mltp/moduli.hpp"
#include "mltp/random.hpp"
#include "mltp/spectral.hpp"

namespace mltp {

namespace {

using Table = std::vector<std::size_t>;

constexpr double kTransportCond = 10.0;

Table cyclic_table(std::size_t n) {
  Table t(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) t[a * n + b] = (a + b) % n;
  return t;
}

// Total order 0 < 1 < ... < n-1 under min; n-1 is the identity.
Table chain_table(std::size_t n) {
  Table t(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) t[a * n + b] = std::min(a, b);
  return t;
}

// Element 0 is an adjoined identity; the rest multiply by `rule`.
template <class Rule>
Table with_identity(std::size_t n, Rule rule) {
  Table t(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) t[a * n + b] = a == 0 ? b : b == 0 ? a : rule(a, b);
  return t;
}

// x^1 .. x^(k+p-1) with x^(k+p) = x^k, plus identity x^0.
Table monogenic_table(std::size_t n, std::size_t period) {
  const std::size_t top = n - 1;
  return with_identity(n, [&](std::size_t a, std::size_t b) {
    std::size_t e = a + b;
    while (e > top) e -= period;
    return e;
  });
}

Table product_table(const Table& x, std::size_t nx, const Table& y, std::size_t ny) {
  const std::size_t n = nx * ny;
  Table t(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      t[a * n + b] = x[(a / ny) * nx + b / ny] * ny + y[(a % ny) * ny + b % ny];
  return t;
}

Table random_monoid(std::size_t n, Rng& rng) {
  if (n == 1) return {0};
  std::vector<std::size_t> factors;
  for (std::size_t d = 2; d * d <= n; ++d)
    if (n % d == 0) factors.push_back(d);
  const std::size_t kinds = factors.empty() ? 6 : 7;
  switch (rng.index(kinds)) {
    case 0: return cyclic_table(n);
    case 1: return chain_table(n);
    case 2: return with_identity(n, [](std::size_t a, std::size_t) { return a; });
    case 3: return with_identity(n, [](std::size_t, std::size_t b) { return b; });
    case 4: return with_identity(n, [](std::size_t, std::size_t) { return std::size_t{1}; });
    case 5: return monogenic_table(n, 1 + rng.index(n - 1));
    default: {
      const std::size_t d = factors[rng.index(factors.size())];
      return product_table(random_monoid(d, rng), d, random_monoid(n / d, rng), n / d);
    }
  }
}

Table relabel(const Table& t, std::size_t n, Rng& rng) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.index(i)]);
  Table out(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) out[perm[a] * n + perm[b]] = perm[t[a * n + b]];
  return out;
}

Multiplication random_semigroup_algebra(std::size_t n, Rng& rng, const NormContext& ctx) {
  return semigroup_algebra(SemigroupTable(n, relabel(random_monoid(n, rng), n, rng)), ctx);
}

Multiplication random_block_sum(std::size_t n, Rng& rng, const NormContext& ctx) {
  std::optional<Multiplication> sum;
  std::size_t remaining = n;
  while (remaining > 0) {
    Multiplication block = [&] {
      if (remaining >= 4 && rng.uniform() < 0.5) {
        const double w[2] = {rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)};
        return convolution_algebra(2, w, ctx);
      }
      return make_multiplication(StructureTensor(1, {Complex(rng.uniform(0.5, 2.0))}), ctx);
    }();
    remaining -= block.dim();
    sum = sum ? direct_sum(*sum, block) : block;
  }
  return *sum;
}

}  // namespace

Multiplication generate_random_unital(std::size_t dim, std::uint64_t seed, const NormContext& ctx) {
  if (dim == 0 || dim > 8) throw std::invalid_argument("generate_random_unital: dim must be in 1..8");
  if (dim == 1) return make_multiplication(StructureTensor(1, {Complex(1.0)}), ctx);
  Rng rng(seed);
  for (;;) {
    const bool transported = rng.index(3) == 2;
    Multiplication base = rng.uniform() < 0.5 ? random_semigroup_algebra(dim, rng, ctx) : random_block_sum(dim, rng, ctx);
    if (transported) base = act(random_group_element(dim, kTransportCond, rng), base);
    if (find_unit(base)) return base;
  }
}

GeneratedPerturbation generate_perturbation(const Multiplication& m, double radius, std::uint64_t seed) {
  if (!(radius > 0) || !std::isfinite(radius))
    throw std::invalid_argument("generate_perturbation: radius must be positive");
  const std::size_t n = m.dim();
  const NormContext& ctx = m.norm();
  const double star = m.opnorm().value;
  GeneratedPerturbation out{m, true, 0.0, 0.0};
  if (!(star > 0)) return out;

  Rng rng(seed);
  LinearMap dir = rng.gaussian_matrix(n, n);
  dir /= linear_opnorm(dir, ctx);
  const double fraction = rng.uniform(0.25, 1.0);

  // |t * - *| <= |*| (delta (1+delta)^2 / (1-delta) + delta (2+delta)) for t = id + delta N, ||N|| = 1.
  const auto certified = [star](double d) { return star * (d * (1 + d) * (1 + d) / (1 - d) + d * (2 + d)); };
  double lo = 0.0;
  double hi = 0.5;
  if (certified(hi) <= radius) {
    lo = hi;
  } else {
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      (certified(mid) <= radius ? lo : hi) = mid;
    }
  }
  if (lo < 1e-14) return out;

  const auto id = LinearMap::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const auto transport = [&](double d) { return act(GroupElement(id + d * dir), m); };
  Multiplication diamond = transport(lo);
  double dist = mult_distance(diamond, m).value;
  double delta = lo;
  if (dist > radius) throw ConsistencyFailure("generate_perturbation: certified transport left the radius");

  if (dist > 0) {
    const double target = std::min(0.5, lo * fraction * radius / dist);
    Multiplication candidate = transport(target);
    const double cd = mult_distance(candidate, m).value;
    if (cd <= radius) {
      diamond = std::move(candidate);
      dist = cd;
      delta = target;
    }
  }
  if (dist == 0.0) return out;
  return {std::move(diamond), false, delta, dist};
}

std::string_view to_string(Suite suite) {
  switch (suite) {
    case Suite::Neumann: return "thm-neumann";
    case Suite::UnitPerturb: return "thm-unit-perturb";
    case Suite::UnitDistance: return "thm-unit-distance";
    case Suite::InversePerturb: return "thm-inverse-perturb";
    case Suite::Spectrum: return "corollary-spectrum";
    case Suite::JointContinuity: return "lemma-joint-continuity";
    case Suite::ActionContinuity: return "action-continuity";
    case Suite::BoundaryBlowup: return "boundary-blowup";
    case Suite::Cohomology: return "cohomology";
    case Suite::OrbitInvariance: return "orbit-invariance";
  }
  return "unknown";
}

std::vector<Suite> all_suites() {
  return {Suite::Neumann,         Suite::UnitPerturb,      Suite::UnitDistance,   Suite::InversePerturb,
          Suite::Spectrum,        Suite::JointContinuity,  Suite::ActionContinuity, Suite::BoundaryBlowup,
          Suite::Cohomology,      Suite::OrbitInvariance};
}

Suite parse_suite(std::string_view name) {
  for (Suite s : all_suites())
    if (to_string(s) == name) return s;
  throw std::invalid_argument("unknown suite '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  if (trials == 0) throw std::invalid_argument("trials must be at least 1");
  if (dims.empty()) throw std::invalid_argument("dims must not be empty");
  for (std::size_t d : dims)
    if (d == 0 || d > 8) throw std::invalid_argument("dims must lie in 1..8");
  if (r_values.empty()) throw std::invalid_argument("r values must not be empty");
  for (double r : r_values)
    if (!(r >= 0.0 && r < 1.0)) throw std::invalid_argument("r values must lie in [0, 1)");
  if (workers == 0) throw std::invalid_argument("workers must be at least 1");
  if (!(M > 0) || !std::isfinite(M)) throw std::invalid_argument("M must be positive");
  if (samples == 0) throw std::invalid_argument("samples must be at least 1");
  if (!(max_cond >= 1.0)) throw std::invalid_argument("max_cond must be at least 1");
  if (!(tol.spectrum > 0) || !(tol.joint_tail > 0) || !(tol.rank > 0))
    throw std::invalid_argument("tolerances must be positive");
}

std::pair<std::size_t, double> trial_parameters(const ExperimentConfig& config, std::size_t trial) {
  return {config.dims[trial % config.dims.size()],
          config.r_values[(trial / config.dims.size()) % config.r_values.size()]};
}

namespace {

struct Trial {
  const ExperimentConfig& cfg;
  NormContext ctx;
  std::size_t dim;
  double r;
  Rng rng;
};

void fill_from(ReportRow& row, const CertifiedBound& b) {
  row.hypothesis = b.hypothesis;
  row.bound = b.bound;
  row.measured = b.measured;
  row.satisfied = b.satisfied;
  row.exact_norms = b.exact_norms;
}

void set_status(ReportRow& row) {
  row.ratio = CertifiedBound{row.hypothesis, row.bound, row.measured, row.satisfied, row.exact_norms}.ratio();
  row.status = row.satisfied ? "ok" : "violated";
}

Element unit_of(const Multiplication& m) {
  auto e = find_unit(m);
  if (!e) throw ConsistencyFailure("generated instance lost its unit");
  return *e;
}

Element unit_vector(std::size_t n, Rng& rng, const NormContext& ctx) {
  Element v = rng.gaussian_vector(n);
  return v / vector_norm(v, ctx);
}

// a = e + rho u / |*| is invertible for rho < 1; half of the time a Gaussian
// draw is used instead when it is comfortably invertible.
Element random_invertible(const Multiplication& m, const Element& e, Rng& rng) {
  const std::size_t n = m.dim();
  if (rng.uniform() < 0.5) {
    Element g = rng.gaussian_vector(n);
    const auto inv = invert(m, g);
    if (inv.inverse && !inv.near_singular) return g;
  }
  return e + rng.uniform(0.0, 0.5) * unit_vector(n, rng, m.norm()) / m.opnorm().value;
}

Multiplication perturb(const Multiplication& m, double radius, Rng& rng, Json& detail) {
  if (!(radius > 0)) {
    detail["perturbation"] = "none";
    return m;
  }
  auto p = generate_perturbation(m, radius, rng.next());
  detail["delta"] = p.delta;
  if (p.trivial) detail["perturbation"] = "trivial";
  return std::move(p.diamond);
}

void neumann_trial(Trial& t, ReportRow& row) {
  const auto m = generate_random_unital(t.dim, t.rng.next(), t.ctx);
  const Element e = unit_of(m);
  const Element a = random_invertible(m, e, t.rng);
  const Element a_inv = *invert(m, a).inverse;
  const double star = m.opnorm().value;
  const double radius = t.r / (vector_norm(a_inv, t.ctx) * star * star);
  const double frac = row.trial % 5 == 0 ? 1.0 : t.rng.uniform();
  const Element b = a + frac * radius * unit_vector(t.dim, t.rng, t.ctx);
  const auto res = neumann_invert(m, a, a_inv, b, t.r);
  fill_from(row, res.certificate);
  const bool invertible = is_invertible(m, b);
  const auto direct = invert(m, b).inverse;
  const double gap = direct ? vector_norm(res.inverse - *direct, t.ctx) / vector_norm(*direct, t.ctx)
                            : std::numeric_limits<double>::infinity();
  row.detail["terms"] = res.terms;
  row.detail["b_invertible"] = invertible;
  row.detail["direct_gap"] = gap;
  row.satisfied = row.satisfied && invertible && gap <= 1e-8;
}

void unit_perturb_trial(Trial& t, ReportRow& row) {
  const auto m = generate_random_unital(t.dim, t.rng.next(), t.ctx);
  const Element e = unit_of(m);
  const auto diamond = perturb(m, t.r / vector_norm(e, t.ctx), t.rng, row.detail);
  const auto res = perturbed_unit(m, diamond, t.r);
  fill_from(row, res.certificate);
}

void unit_distance_trial(Trial& t, ReportRow& row) {
  const auto m = generate_random_unital(t.dim, t.rng.next(), t.ctx);
  const Element e = unit_of(m);
  const auto diamond = perturb(m, t.r / vector_norm(e, t.ctx), t.rng, row.detail);
  fill_from(row, unit_distance_bound(m, diamond));
}

void inverse_perturb_trial(Trial& t, ReportRow& row) {
  const double M = t.cfg.M;
  for (int attempt = 0; attempt < 32; ++attempt) {
    const auto m = generate_random_unital(t.dim, t.rng.next(), t.ctx);
    const Element e = unit_of(m);
    const Element a = e + t.rng.uniform(0.0, 0.5) * unit_vector(t.dim, t.rng, t.ctx) / m.opnorm().value;
    const auto a_inv = invert(m, a).inverse;
    if (!a_inv) continue;
    const double cap = std::max({m.opnorm().value, vector_norm(e, t.ctx), vector_norm(a, t.ctx),
                                 vector_norm(*a_inv, t.ctx)});
    if (cap > M) continue;
    const auto diamond = perturb(m, t.r / (M * M * M), t.rng, row.detail);
    row.detail["attempts"] = attempt + 1;
    fill_from(row, perturbed_inverse_bound(m, diamond, a, t.r, M).certificate);
    return;
  }
  row.status = "hypothesis-unmet";
  row.detail["reason"] = "no instance within the M-caps after 32 draws";
}

// t_k = id + 2^-k N transports of m, k = 1..count.
std::vector<Multiplication> geometric_orbit(const Multiplication& m, std::size_t count, Rng& rng) {
  const std::size_t n = m.dim();
  LinearMap dir = rng.gaussian_matrix(n, n);
  dir /= linear_opnorm(dir, m.norm());
  const auto id = LinearMap::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::vector<Multiplication> seq;
  for (std::size_t k = 1; k <= count; ++k) seq.push_back(act(GroupElement(id + std::ldexp(1.0, -int(k)) * dir), m));
  return seq;
}

void spectrum_trial(Trial& t, ReportRow& row) {
  const auto m = generate_random_unital(t.dim, t.rng.next(), t.ctx);
  const Element a = t.rng.gaussian_vector(t.dim);
  const auto seq = geometric_orbit(m, 40, t.rng);
  const auto rep = spectral_semicontinuity(seq, m, a, t.cfg.tol.spectrum);
  row.bound = rep.tol;
  row.measured = rep.worst_distance;
  row.satisfied = rep.passed;
  row.exact_norms = true;
  row.detail["persistent"] = rep.persistent.size();
  row.detail["limit_points"] = rep.limit_spectrum.points.size();
  row.detail["final_excess"] = rep.tail_excess.empty() ? 0.0 : rep.tail_excess.back();
}

void joint_trial(Trial& t, ReportRow& row) {
  const auto m = generate_random_unital(t.dim, t.rng.next(), t.ctx);
  const std::size_t count = 40;
  const auto seq = geometric_orbit(m, count, t.rng);
  const Element a = t.rng.gaussian_vector(t.dim);
  const Element b = t.rng.gaussian_vector(t.dim);
  const Element u = unit_vector(t.dim, t.rng, t.ctx);
  const Element v = unit_vector(t.dim, t.rng, t.ctx);
  std::vector<Element> as;
  std::vector<Element> bs;
  for (std::size_t k = 1; k <= count; ++k) {
    as.push_back(a + std::ldexp(1.0, -int(k)) * u);
    bs.push_back(b + std::ldexp(1.0, -int(k)) * v);
  }
  const double scale = std::max(1.0, m.opnorm().value * vector_norm(a, t.ctx) * vector_norm(b, t.ctx));
  const auto rep = joint_continuity_check(seq, m, as, a, bs, b, t.cfg.tol.joint_tail * scale);
  // Report the row with the largest lhs / rhs.
  std::size_t worst = 0;
  double worst_ratio = -1.0;
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const double q = rep.rows[i].rhs > 0 ? rep.rows[i].lhs / rep.rows[i].rhs : (rep.rows[i].lhs > 0 ? 1e300 : 0.0);
    if (q > worst_ratio) {
      worst_ratio = q;
      worst = i;
    }
  }
  row.bound = rep.rows[worst].rhs;
  row.measured = rep.rows[worst].lhs;
  row.satisfied = rep.passed && rep.converges;
  row.exact_norms = rep.exact_norms;
  row.detail["worst_index"] = worst + 1;
  row.detail["converges"] = rep.converges;
  row.detail["final_lhs"] = rep.rows.back().lhs;
}

void action_trial(Trial& t, ReportRow& row) {
  const auto star = generate_random_unital(t.dim, t.rng.next(), t.ctx);
  const bool near = t.rng.uniform() < 0.5;
  const auto diamond = near ? perturb(star, std::max(t.r, 0.05), t.rng, row.detail)
                            : act(random_group_element(t.dim, 3.0, t.rng), star);
  const GroupElement tt = random_group_element(t.dim, kTransportCond, t.rng);
  GroupElement s = random_group_element(t.dim, kTransportCond, t.rng);
  if (t.rng.uniform() < 0.5) {
    const auto id = LinearMap::Identity(static_cast<Eigen::Index>(t.dim), static_cast<Eigen::Index>(t.dim));
    s = compose(tt, GroupElement(id + 0.1 * t.rng.uniform() * t.rng.gaussian_matrix(t.dim, t.dim) / double(t.dim)));
  }
  row.detail["diamond"] = near ? "perturbation" : "transport";
  fill_from(row, action_continuity_bound(s, tt, diamond, star));
}

void blowup_trial(Trial& t, ReportRow& row) {
  std::optional<Multiplication> base;
  if (t.dim > 1) base = generate_random_unital(t.dim - 1, t.rng.next(), t.ctx);
  const auto line = [&](double c) { return make_multiplication(StructureTensor(1, {Complex(c)}), t.ctx); };
  const auto family = [&](double eps) { return base ? direct_sum(*base, line(eps)) : line(eps); };
  const Multiplication limit = base ? direct_sum(*base, line(0.0)) : line(0.0);
  const std::vector<double> grid{1.0, 0.5, 0.25, 0.125, 1.0 / 16, 1.0 / 32};
  const auto rep = boundary_blowup_experiment(family, limit, grid);
  const double eps_min = grid.back();
  Element expected(static_cast<Eigen::Index>(t.dim));
  if (base) expected.head(static_cast<Eigen::Index>(t.dim - 1)) = unit_of(*base);
  expected(static_cast<Eigen::Index>(t.dim - 1)) = 1.0 / eps_min;
  row.bound = vector_norm(expected, t.ctx);
  row.measured = rep.rows.back().unit_norm.value_or(0.0);
  const bool limit_unital = find_unit(limit).has_value();
  row.satisfied = rep.all_unital && rep.monotone && !limit_unital &&
                  std::abs(row.measured - row.bound) <= 1e-9 * row.bound;
  row.exact_norms = true;
  Json norms = Json::array();
  for (const auto& r : rep.rows) norms.push_back(r.unit_norm ? Json(*r.unit_norm) : Json(nullptr));
  row.detail["unit_norms"] = std::move(norms);
  row.detail["monotone"] = rep.monotone;
  row.detail["limit_unital"] = limit_unital;
}

double coboundary_defect(const Multiplication& m, std::size_t max_deg) {
  double worst = 0.0;
  for (std::size_t d = 0; d < max_deg; ++d) {
    const LinearMap dd = coboundary_matrix(m, d + 1) * coboundary_matrix(m, d);
    if (dd.size() > 0) worst = std::max(worst, dd.cwiseAbs().maxCoeff());
  }
  return worst;
}

void cohomology_row(const Multiplication& m, double rank_tol, ReportRow& row,
                    const std::optional<std::vector<std::size_t>>& expected) {
  const std::size_t max_deg = 3;
  const auto sig = hochschild_dims(m, max_deg, rank_tol);
  const double scale = std::max(1.0, m.tensor().max_abs() * m.tensor().max_abs());
  row.bound = 1e-10 * scale;
  row.measured = coboundary_defect(m, max_deg);
  row.satisfied = row.measured <= row.bound && (!expected || sig.dims == *expected);
  row.exact_norms = true;
  row.detail["h_dims"] = sig.dims;
  row.detail["rigid_certificate"] = sig.rigid_certificate;
  row.detail["rank_ambiguous"] = sig.rank_ambiguous();
  if (expected) row.detail["expected"] = *expected;
}

void cohomology_trial(Trial& t, ReportRow& row) {
  if (t.dim > 4) {
    row.status = "hypothesis-unmet";
    row.detail["reason"] = "cohomology is computed for dim <= 4";
    return;
  }
  cohomology_row(generate_random_unital(t.dim, t.rng.next(), t.ctx), t.cfg.tol.rank, row, std::nullopt);
}

void orbit_trial(Trial& t, ReportRow& row) {
  if (t.dim > 4) {
    row.status = "hypothesis-unmet";
    row.detail["reason"] = "signatures are computed for dim <= 4";
    return;
  }
  const auto m = generate_random_unital(t.dim, t.rng.next(), t.ctx);
  const auto base = invariant_signature(m);
  std::size_t mismatches = 0;
  std::size_t ambiguous = 0;
  double worst_cond = 1.0;
  for (std::size_t i = 0; i < t.cfg.samples; ++i) {
    const auto g = random_group_element(t.dim, t.cfg.max_cond, t.rng);
    worst_cond = std::max(worst_cond, g.cond());
    const auto sig = invariant_signature(act(g, m));
    if (!(sig == base) && mismatches++ == 0) {
      row.detail["first_mismatch"] = signature_to_json(sig);
      row.detail["first_mismatch_cond"] = g.cond();
    }
    if (sig.cohomology.rank_ambiguous()) ++ambiguous;
  }
  row.bound = 0.0;
  row.measured = static_cast<double>(mismatches);
  row.satisfied = mismatches == 0;
  row.exact_norms = true;
  row.detail["signature"] = signature_to_json(base);
  row.detail["samples"] = t.cfg.samples;
  row.detail["ambiguous"] = ambiguous;
  row.detail["worst_cond"] = worst_cond;
}

void raw_noise_trial(Trial& t, ReportRow& row) {
  const auto m = generate_random_unital(t.dim, t.rng.next(), t.ctx);
  const std::size_t n = t.dim;
  std::vector<Complex> noise(n * n * n);
  for (auto& c : noise) c = t.rng.complex_normal();
  StructureTensor dn(n, std::move(noise));
  const double size = t.r > 0 ? t.r : 0.1;
  dn = dn.scaled(size / bilinear_opnorm(dn, t.ctx).value);
  const StructureTensor noisy = m.tensor() + dn;
  row.hypothesis.r = t.r;
  row.bound = 0.0;
  row.measured = associativity_defect(noisy);
  row.satisfied = true;
  row.exact_norms = t.ctx.bilinear_exact();
  row.detail["noise_norm"] = size;
  row.detail["base_defect"] = m.assoc_defect();
  row.detail["tolerance"] = default_assoc_tolerance(noisy);
}

void run_trial(const ExperimentConfig& cfg, std::size_t trial, ReportRow& row) {
  const auto [dim, r] = trial_parameters(cfg, trial);
  row.suite = std::string(to_string(cfg.suite));
  row.trial = trial;
  row.seed = derive_seed(cfg.seed, trial);
  row.dim = dim;
  row.hypothesis.r = r;
  row.hypothesis.s = s_factor(r);
  NormContext ctx;
  ctx.kind = cfg.norm;
  Trial t{cfg, ctx, dim, r, Rng(row.seed)};
  if (cfg.raw_noise) {
    raw_noise_trial(t, row);
    row.ratio = 0.0;
    row.status = "raw-noise";
    return;
  }
  switch (cfg.suite) {
    case Suite::Neumann: neumann_trial(t, row); break;
    case Suite::UnitPerturb: unit_perturb_trial(t, row); break;
    case Suite::UnitDistance: unit_distance_trial(t, row); break;
    case Suite::InversePerturb: inverse_perturb_trial(t, row); break;
    case Suite::Spectrum: spectrum_trial(t, row); break;
    case Suite::JointContinuity: joint_trial(t, row); break;
    case Suite::ActionContinuity: action_trial(t, row); break;
    case Suite::BoundaryBlowup: blowup_trial(t, row); break;
    case Suite::Cohomology: cohomology_trial(t, row); break;
    case Suite::OrbitInvariance: orbit_trial(t, row); break;
  }
  if (row.status.empty()) set_status(row);
}

Multiplication line(Complex c, const NormContext& ctx) { return make_multiplication(StructureTensor(1, {c}), ctx); }

// Closed-form instances with known answers, one row each.
std::vector<ReportRow> fixture_rows(const ExperimentConfig& cfg) {
  NormContext ctx;
  ctx.kind = cfg.norm;
  std::vector<ReportRow> rows;
  const auto add = [&](std::string name, auto&& body) {
    ReportRow row;
    row.suite = std::string(to_string(cfg.suite));
    row.trial = cfg.trials + rows.size();
    row.dim = 1;
    row.detail["fixture"] = std::move(name);
    body(row);
    if (row.status.empty()) set_status(row);
    rows.push_back(std::move(row));
  };
  const auto C = line(1.0, ctx);
  switch (cfg.suite) {
    case Suite::Neumann:
      add("C, a = 1, b = 0.9, r = 0.1", [&](ReportRow& row) {
        const Element one = Element::Constant(1, 1.0);
        fill_from(row, neumann_invert(C, one, one, Element::Constant(1, 0.9), 0.1).certificate);
      });
      break;
    case Suite::UnitPerturb:
      add("C vs 1.1 C, r = 0.1", [&](ReportRow& row) {
        fill_from(row, perturbed_unit(C, line(1.1, ctx), 0.1).certificate);
      });
      break;
    case Suite::UnitDistance:
      add("C vs 1.1 C", [&](ReportRow& row) { fill_from(row, unit_distance_bound(C, line(1.1, ctx))); });
      add("C vs C", [&](ReportRow& row) { fill_from(row, unit_distance_bound(C, C)); });
      break;
    case Suite::InversePerturb:
      add("C vs 1.01 C, a = 1, M = 4", [&](ReportRow& row) {
        fill_from(row, perturbed_inverse_bound(C, line(1.01, ctx), Element::Constant(1, 1.0), 0.9, 4.0).certificate);
      });
      break;
    case Suite::Spectrum:
      add("(1 + 1/k) C, a = 1", [&](ReportRow& row) {
        std::vector<Multiplication> seq;
        for (int k = 1; k <= 50; ++k) seq.push_back(line(1.0 + 1.0 / k, ctx));
        const auto rep = spectral_semicontinuity(seq, C, Element::Constant(1, 1.0), cfg.tol.spectrum);
        row.bound = rep.tol;
        row.measured = rep.worst_distance;
        row.satisfied = rep.passed;
      });
      break;
    case Suite::Cohomology: {
      const double w[2] = {1.0, 1.0};
      const std::vector<std::pair<std::string, Multiplication>> cases{
          {"C", C}, {"M2", convolution_algebra(2, w, ctx)}, {"zero C", line(0.0, ctx)}};
      const std::vector<std::vector<std::size_t>> expected{{1, 0, 0, 0}, {1, 0, 0, 0}, {1, 1, 1, 1}};
      for (std::size_t i = 0; i < cases.size(); ++i)
        add(cases[i].first, [&](ReportRow& row) {
          row.dim = cases[i].second.dim();
          cohomology_row(cases[i].second, cfg.tol.rank, row, expected[i]);
        });
      break;
    }
    case Suite::BoundaryBlowup:
      add("eps C", [&](ReportRow& row) {
        const auto rep = boundary_blowup_experiment([&](double e) { return line(e, ctx); }, line(0.0, ctx),
                                                    {1.0, 0.5, 0.25, 0.125});
        row.bound = 8.0;
        row.measured = rep.rows.back().unit_norm.value_or(0.0);
        row.satisfied = rep.all_unital && rep.monotone && std::abs(row.measured - 8.0) <= 1e-12 * 8.0;
        Json norms = Json::array();
        for (const auto& r : rep.rows) norms.push_back(r.unit_norm ? Json(*r.unit_norm) : Json(nullptr));
        row.detail["unit_norms"] = std::move(norms);
      });
      break;
    default: break;
  }
  return rows;
}

SuiteSummary summarize(const std::vector<ReportRow>& rows) {
  SuiteSummary s;
  s.rows = rows.size();
  double sum = 0.0;
  for (const auto& row : rows) {
    if (row.status == "ok") ++s.ok;
    else if (row.status == "violated") {
      ++s.violated;
      if (row.exact_norms) ++s.exact_violations;
    } else if (row.status == "hypothesis-unmet") ++s.hypothesis_unmet;
    else if (row.status == "raw-noise") ++s.raw_noise;
    else ++s.errors;
    if ((row.status == "ok" || row.status == "violated") && row.bound > 0 && std::isfinite(row.ratio)) {
      s.ratio_min = s.ratio_count == 0 ? row.ratio : std::min(s.ratio_min, row.ratio);
      s.ratio_max = s.ratio_count == 0 ? row.ratio : std::max(s.ratio_max, row.ratio);
      sum += row.ratio;
      ++s.ratio_count;
    }
  }
  if (s.ratio_count > 0) s.ratio_mean = sum / static_cast<double>(s.ratio_count);
  return s;
}

Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

std::string csv_number(double x) {
  if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  std::ostringstream out;
  out.precision(17);
  out << x;
  return out.str();
}

}  // namespace

SuiteResult run_suite(const ExperimentConfig& config) {
  config.validate();
  SuiteResult result;
  result.rows.resize(config.trials);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < config.trials; i = next++) {
      ReportRow& row = result.rows[i];
      const auto start = std::chrono::steady_clock::now();
      try {
        run_trial(config, i, row);
      } catch (const HypothesisViolation& e) {
        row.status = "hypothesis-unmet";
        row.detail["reason"] = e.what();
      } catch (const std::exception& e) {
        row.status = "error";
        row.satisfied = false;
        row.detail["error"] = e.what();
      }
      row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
  };
  const std::size_t count = std::min(config.workers, config.trials);
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < count; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  if (config.fixtures && !config.raw_noise)
    for (auto& row : fixture_rows(config)) result.rows.push_back(std::move(row));
  result.summary = summarize(result.rows);
  return result;
}

Json row_to_json(const ReportRow& row, bool include_wall_time) {
  Json j;
  j["suite"] = row.suite;
  j["trial"] = row.trial;
  j["seed"] = row.seed;
  j["dim"] = row.dim;
  j["status"] = row.status;
  j["hypothesis"] = hypothesis_to_json(row.hypothesis);
  j["bound"] = finite_or_null(row.bound);
  j["measured"] = finite_or_null(row.measured);
  j["ratio"] = finite_or_null(row.ratio);
  j["satisfied"] = row.satisfied;
  j["exact_norms"] = row.exact_norms;
  j["detail"] = row.detail;
  if (include_wall_time) j["wall_ms"] = row.wall_ms;
  return j;
}

Json summary_to_json(const SuiteSummary& s) {
  Json j;
  j["rows"] = s.rows;
  j["ok"] = s.ok;
  j["violated"] = s.violated;
  j["exact_violations"] = s.exact_violations;
  j["hypothesis_unmet"] = s.hypothesis_unmet;
  j["raw_noise"] = s.raw_noise;
  j["errors"] = s.errors;
  j["ratio_min"] = s.ratio_min;
  j["ratio_mean"] = s.ratio_mean;
  j["ratio_max"] = s.ratio_max;
  return j;
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> columns{"suite", "trial",    "seed",  "dim",       "status",
                                                "r",     "s",        "M",     "C_M",       "bound",
                                                "measured", "ratio", "satisfied", "exact_norms", "wall_ms"};
  return columns;
}

void write_jsonl(std::ostream& out, const std::vector<ReportRow>& rows, bool include_wall_time) {
  for (const auto& row : rows) out << row_to_json(row, include_wall_time).dump() << '\n';
}

void write_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& row : rows) {
    const auto& h = row.hypothesis;
    out << row.suite << ',' << row.trial << ',' << row.seed << ',' << row.dim << ',' << row.status << ','
        << csv_number(h.r) << ',' << csv_number(h.s) << ',' << (h.M ? csv_number(*h.M) : "") << ','
        << (h.C_M ? csv_number(*h.C_M) : "") << ',' << csv_number(row.bound) << ',' << csv_number(row.measured)
        << ',' << csv_number(row.ratio) << ',' << (row.satisfied ? "true" : "false") << ','
        << (row.exact_norms ? "true" : "false") << ',' << csv_number(row.wall_ms) << '\n';
  }
}

}  // namespace mltp

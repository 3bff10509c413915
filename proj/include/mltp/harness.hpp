#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "mltp/algebra.hpp"
#include "mltp/io.hpp"
#include "mltp/perturbation.hpp"

namespace mltp {

/// Random unital instance of dimension dim (1..8), deterministic in seed.
///
/// Draws from semigroup algebras of random monoids, direct sums of 2x2
/// convolution blocks and scaled copies of C, and transports of either by a
/// group element with cond <= 10. Dimension 1 always yields C itself.
Multiplication generate_random_unital(std::size_t dim, std::uint64_t seed, const NormContext& ctx = {});

struct GeneratedPerturbation {
  Multiplication diamond;
  bool trivial = false;  // radius too small for a float-visible transport; diamond == m
  double delta = 0.0;    // t = id + delta N with ||N|| = 1
  double distance = 0.0;
};

/// Transports m by id + delta N with delta certified by the action-continuity
/// estimate, then moved toward a random fraction of the radius. The returned
/// distance is measured and never exceeds radius.
GeneratedPerturbation generate_perturbation(const Multiplication& m, double radius, std::uint64_t seed);

enum class Suite {
  Neumann,
  UnitPerturb,
  UnitDistance,
  InversePerturb,
  Spectrum,
  JointContinuity,
  ActionContinuity,
  BoundaryBlowup,
  Cohomology,
  OrbitInvariance,
};

std::string_view to_string(Suite suite);
/// Throws std::invalid_argument for an unknown name.
Suite parse_suite(std::string_view name);
std::vector<Suite> all_suites();

struct Tolerances {
  double spectrum = 1e-6;    // semicontinuity distance
  double joint_tail = 1e-6;  // last |a_k *_k b_k - a * b|, relative to |*| ||a|| ||b||
  double rank = 1e-8;        // cohomology rank threshold
};

struct ExperimentConfig {
  Suite suite = Suite::Neumann;
  std::size_t trials = 100;
  std::vector<std::size_t> dims{1, 2, 3, 4};
  std::vector<double> r_values{0.1, 0.5, 0.9};
  std::uint64_t seed = 0;
  NormKind norm = NormKind::L1;
  Tolerances tol;
  std::size_t workers = 1;
  bool raw_noise = false;
  bool fixtures = false;  // append the closed-form fixture rows after the random trials
  double M = 4.0;
  std::size_t samples = 100;  // transports per orbit-invariance trial
  double max_cond = 1e3;

  /// Throws std::invalid_argument describing the first invalid field.
  void validate() const;
};

struct ReportRow {
  std::string suite;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::size_t dim = 0;
  std::string status;  // ok | violated | hypothesis-unmet | raw-noise | error
  Hypothesis hypothesis;
  double bound = 0.0;
  double measured = 0.0;
  double ratio = 0.0;
  bool satisfied = true;
  bool exact_norms = true;
  double wall_ms = 0.0;
  Json detail = Json::object();
};

struct SuiteSummary {
  std::size_t rows = 0;
  std::size_t ok = 0;
  std::size_t violated = 0;
  std::size_t exact_violations = 0;
  std::size_t hypothesis_unmet = 0;
  std::size_t raw_noise = 0;
  std::size_t errors = 0;
  std::size_t ratio_count = 0;
  double ratio_min = 0.0;
  double ratio_mean = 0.0;
  double ratio_max = 0.0;
};

struct SuiteResult {
  std::vector<ReportRow> rows;  // sorted by trial index
  SuiteSummary summary;
  /// 0 iff no exact-norm violation and no trial error.
  int exit_code() const { return summary.exact_violations == 0 && summary.errors == 0 ? 0 : 1; }
};

SuiteResult run_suite(const ExperimentConfig& config);

/// Trial index -> (dim, r): dims cycle fastest, r values advance once per full dims cycle.
std::pair<std::size_t, double> trial_parameters(const ExperimentConfig& config, std::size_t trial);

Json row_to_json(const ReportRow& row, bool include_wall_time = true);
Json summary_to_json(const SuiteSummary& summary);

/// Column order of the CSV report.
const std::vector<std::string>& csv_columns();
void write_jsonl(std::ostream& out, const std::vector<ReportRow>& rows, bool include_wall_time = true);
void write_csv(std::ostream& out, const std::vector<ReportRow>& rows);

}  // namespace mltp

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mltp/cohomology.hpp"
#include "mltp/error.hpp"
#include "mltp/harness.hpp"
#include "mltp/io.hpp"
#include "mltp/moduli.hpp"
#include "mltp/random.hpp"
#include "mltp/spectral.hpp"

using namespace mltp;

namespace {

struct Globals {
  std::string norm = "l1";
  std::optional<double> tol;
  std::size_t workers = 1;
  bool literal_twist = false;
};

NormContext context(const Globals& g) {
  NormContext ctx;
  ctx.kind = parse_norm_kind(g.norm);
  return ctx;
}

// Instances are read with their own norm unless --norm was given explicitly.
Multiplication load(const std::string& path, const Globals& g, bool norm_given) {
  AlgebraInstance inst = read_instance(path);
  if (norm_given) inst.ctx = context(g);
  return make_multiplication(std::move(inst.tensor), inst.ctx, g.tol);
}

void print(const Json& j) { std::cout << j.dump(2) << '\n'; }

Element checked_element(const Multiplication& m, const std::string& text) {
  Element x = parse_element(text);
  if (static_cast<std::size_t>(x.size()) != m.dim())
    throw DimensionMismatch("element has " + std::to_string(x.size()) + " coordinates, instance has dim " +
                            std::to_string(m.dim()));
  return x;
}

template <class T>
std::vector<T> split_list(const std::string& text, T (*convert)(const std::string&)) {
  std::vector<T> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    out.push_back(convert(text.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

std::size_t to_size(const std::string& s) { return static_cast<std::size_t>(std::stoull(s)); }
double to_double(const std::string& s) { return std::stod(s); }

StructureTensor generate(const std::string& kind, std::size_t dim, std::uint64_t seed, const NormContext& ctx,
                         bool literal) {
  Rng rng(seed);
  if (kind == "random-unital") return generate_random_unital(dim, seed, ctx).tensor();
  if (kind == "semigroup") {
    // Random associative table: retry random tables, falling back to a relabelled cyclic group.
    for (int attempt = 0; attempt < 1000; ++attempt) {
      std::vector<std::size_t> table(dim * dim);
      for (auto& v : table) v = rng.index(dim);
      try {
        return semigroup_algebra(SemigroupTable(dim, table), ctx).tensor();
      } catch (const AssociativityViolation&) {
      }
    }
    std::vector<std::size_t> table(dim * dim);
    for (std::size_t a = 0; a < dim; ++a)
      for (std::size_t b = 0; b < dim; ++b) table[a * dim + b] = (a + b) % dim;
    return semigroup_algebra(SemigroupTable(dim, table), ctx).tensor();
  }
  if (kind == "convolution") {
    std::size_t size = 1;
    while ((size + 1) * (size + 1) <= dim) ++size;
    if (size * size != dim) throw std::invalid_argument("convolution instances need a square dim (1, 4, 9, ...)");
    std::vector<double> w(size);
    for (auto& x : w) x = rng.uniform(0.5, 2.0);
    return convolution_algebra(size, w, ctx).tensor();
  }
  if (kind == "twisted") {
    if (dim < 2 || dim % 2 != 0) throw std::invalid_argument("twisted instances need an even dim >= 2");
    const std::size_t half = dim / 2;
    const auto a = generate_random_unital(half, rng.next(), ctx);
    const auto id = LinearMap::Identity(static_cast<Eigen::Index>(half), static_cast<Eigen::Index>(half));
    return twisted_sum(a, a, id, literal);
  }
  throw std::invalid_argument("unknown --kind '" + kind + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mltp: perturbation bounds and moduli experiments for finite-dimensional algebras"};
  app.require_subcommand(1);
  Globals g;
  auto* norm_opt = app.add_option("--norm", g.norm, "Norm: l1, l2 or linf (default l1)")
                       ->check(CLI::IsMember({"l1", "l2", "linf"}));
  app.add_option("--tol", g.tol, "Tolerance (meaning depends on the subcommand)");
  app.add_option("--workers", g.workers, "Worker threads for check-bounds")->check(CLI::PositiveNumber);
  app.add_flag("--literal-twist", g.literal_twist, "Use the verbatim twisted-sum formula");
  app.fallthrough();

  std::string file;
  std::string element;

  auto* validate = app.add_subcommand("validate", "Check associativity and report norms");
  validate->add_option("file", file)->required()->check(CLI::ExistingFile);

  auto* unit = app.add_subcommand("unit", "Find the unit element, or null");
  unit->add_option("file", file)->required()->check(CLI::ExistingFile);

  auto* inv = app.add_subcommand("invert", "Invert an element");
  inv->add_option("file", file)->required()->check(CLI::ExistingFile);
  inv->add_option("--element", element, "Comma-separated re+imi coordinates")->required();

  auto* spec_cmd = app.add_subcommand("spectrum", "Spectrum of an element");
  spec_cmd->add_option("file", file)->required()->check(CLI::ExistingFile);
  spec_cmd->add_option("--element", element, "Comma-separated re+imi coordinates")->required();

  std::size_t max_deg = 3;
  bool verbose = false;
  auto* coh = app.add_subcommand("cohomology", "Hochschild cohomology dimensions");
  coh->add_option("file", file)->required()->check(CLI::ExistingFile);
  coh->add_option("--max-deg", max_deg, "Highest degree")->check(CLI::Range(0, 4));
  coh->add_flag("--verbose", verbose, "Include singular values near the rank threshold");

  std::size_t samples = 100;
  std::uint64_t seed = 0;
  double max_cond = 1e3;
  auto* orbit = app.add_subcommand("orbit", "Check the invariant signature along random transports");
  orbit->add_option("file", file)->required()->check(CLI::ExistingFile);
  orbit->add_option("--samples", samples, "Number of transports")->check(CLI::PositiveNumber);
  orbit->add_option("--seed", seed, "Root seed");
  orbit->add_option("--max-cond", max_cond, "Condition-number cap for transports");

  std::string suite_name;
  std::size_t trials = 100;
  std::string dims = "1,2,3,4";
  std::string rs = "0.1,0.5,0.9";
  std::string report;
  bool raw_noise = false;
  bool fixtures = false;
  double M = 4.0;
  auto* check = app.add_subcommand("check-bounds", "Run a randomized theorem suite");
  std::vector<std::string> suite_names;
  for (Suite s : all_suites()) suite_names.emplace_back(to_string(s));
  check->add_option("--suite", suite_name, "Suite name")->required()->check(CLI::IsMember(suite_names));
  check->add_option("--trials", trials, "Number of trials")->check(CLI::PositiveNumber);
  check->add_option("--dims", dims, "Comma-separated dimensions");
  check->add_option("--r", rs, "Comma-separated r values in [0, 1)");
  check->add_option("--seed", seed, "Root seed");
  check->add_option("--report", report, "Write rows to out.jsonl or out.csv");
  check->add_option("--samples", samples, "Transports per orbit-invariance trial");
  check->add_option("--max-cond", max_cond, "Condition-number cap for orbit-invariance");
  check->add_option("--M", M, "Norm cap for thm-inverse-perturb");
  check->add_flag("--raw-noise", raw_noise, "Add tensor noise and report the associativity defect only");
  check->add_flag("--fixtures", fixtures, "Append closed-form fixture rows");

  std::string kind;
  std::size_t dim = 2;
  std::string out;
  auto* gen = app.add_subcommand("generate", "Write a generated instance");
  gen->add_option("--kind", kind)->required()->check(
      CLI::IsMember({"semigroup", "convolution", "twisted", "random-unital"}));
  gen->add_option("--dim", dim)->required()->check(CLI::Range(1, 8));
  gen->add_option("--seed", seed);
  gen->add_option("-o,--output", out)->required();

  CLI11_PARSE(app, argc, argv);
  const bool norm_given = norm_opt->count() > 0;

  try {
    if (*validate) {
      AlgebraInstance inst = read_instance(file);
      if (norm_given) inst.ctx = context(g);
      const double tol = g.tol.value_or(default_assoc_tolerance(inst.tensor));
      const auto w = associativity_witness(inst.tensor);
      Json j;
      j["dim"] = inst.tensor.dim();
      j["norm"] = std::string(to_string(inst.ctx.kind));
      j["associative"] = w.defect <= tol;
      j["defect"] = w.defect;
      j["tolerance"] = tol;
      if (w.defect > tol) {
        j["witness"] = {w.tuple[0] + 1, w.tuple[1] + 1, w.tuple[2] + 1, w.tuple[3] + 1};
        print(j);
        return 1;
      }
      const auto m = make_multiplication(std::move(inst.tensor), inst.ctx, tol);
      j["opnorm"] = m.opnorm().value;
      j["opnorm_lower"] = m.opnorm().lower;
      j["opnorm_exact"] = m.opnorm().exact;
      j["unital"] = find_unit(m).has_value();
      j["commutative"] = is_commutative(m);
      print(j);
    } else if (*unit) {
      const auto m = load(file, g, norm_given);
      const auto e = find_unit(m, g.tol.value_or(kDefaultUnitTol));
      print(e ? element_to_json(*e) : Json(nullptr));
    } else if (*inv) {
      const auto m = load(file, g, norm_given);
      const auto res = invert(m, checked_element(m, element), g.tol.value_or(kSingularRelTol));
      Json j;
      j["invertible"] = res.inverse.has_value();
      j["inverse"] = res.inverse ? element_to_json(*res.inverse) : Json(nullptr);
      j["near_singular"] = res.near_singular;
      print(j);
    } else if (*spec_cmd) {
      const auto m = load(file, g, norm_given);
      print(spectrum_to_json(spectrum(m, checked_element(m, element), g.tol.value_or(kDedupTol))));
    } else if (*coh) {
      const auto m = load(file, g, norm_given);
      InvariantSignature sig;
      sig.unital = find_unit(m).has_value();
      sig.commutative = is_commutative(m, 1e-9);
      sig.cohomology = hochschild_dims(m, max_deg, g.tol.value_or(1e-8));
      Json j = signature_to_json(sig);
      if (verbose) {
        j["rank_tol"] = sig.cohomology.rank_tol;
        j["ambiguous_singular_values"] = sig.cohomology.ambiguous;
      }
      print(j);
    } else if (*orbit) {
      const auto m = load(file, g, norm_given);
      const auto base = invariant_signature(m);
      Rng rng(seed);
      std::size_t mismatches = 0;
      for (std::size_t i = 0; i < samples; ++i)
        if (!(invariant_signature(act(random_group_element(m.dim(), max_cond, rng), m)) == base)) ++mismatches;
      Json j;
      j["signature"] = signature_to_json(base);
      j["samples"] = samples;
      j["mismatches"] = mismatches;
      j["invariant"] = mismatches == 0;
      print(j);
      return mismatches == 0 ? 0 : 1;
    } else if (*check) {
      ExperimentConfig cfg;
      cfg.suite = parse_suite(suite_name);
      cfg.trials = trials;
      cfg.dims = split_list<std::size_t>(dims, to_size);
      cfg.r_values = split_list<double>(rs, to_double);
      cfg.seed = seed;
      cfg.norm = parse_norm_kind(g.norm);
      cfg.workers = g.workers;
      cfg.raw_noise = raw_noise;
      cfg.fixtures = fixtures;
      cfg.M = M;
      cfg.samples = samples;
      cfg.max_cond = max_cond;
      if (g.tol) cfg.tol.spectrum = cfg.tol.joint_tail = *g.tol;
      const auto result = run_suite(cfg);
      if (!report.empty()) {
        std::ofstream os(report);
        if (!os) throw std::invalid_argument("cannot write " + report);
        if (report.size() >= 4 && report.compare(report.size() - 4, 4, ".csv") == 0) write_csv(os, result.rows);
        else write_jsonl(os, result.rows);
      }
      Json j = summary_to_json(result.summary);
      j["suite"] = suite_name;
      j["exit_code"] = result.exit_code();
      print(j);
      return result.exit_code();
    } else if (*gen) {
      const NormContext ctx = context(g);
      write_instance(out, generate(kind, dim, seed, ctx, g.literal_twist), ctx);
    }
  } catch (const AssociativityViolation& e) {
    std::cerr << "associativity violation: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "mltp/types.hpp"

namespace mltp {

class Multiplication;

enum class NormKind { L1, L2, Linf };

std::string_view to_string(NormKind kind);
/// Accepts "l1", "l2", "linf". Throws std::invalid_argument otherwise.
NormKind parse_norm_kind(std::string_view name);

/// Which l^p norm is placed on E, and how operator norms are obtained.
///
/// Induced norms of linear maps are exact for every p. The operator norm of a
/// bilinear map is exact only for p = 1; for p = 2 and p = inf it is an upper
/// bound accompanied by a sampled lower bound.
struct NormContext {
  NormKind kind = NormKind::L1;
  std::uint64_t sample_seed = 0x5eed'0001;
  int samples = 10000;

  bool linear_exact() const { return true; }
  bool bilinear_exact() const { return kind == NormKind::L1; }

  bool operator==(const NormContext&) const = default;
};

/// Operator norm of a bilinear map. `value` is what callers use in bounds.
struct OpNorm {
  double value = 0.0;
  double lower = 0.0;
  bool exact = true;
};

double vector_norm(const Element& x, const NormContext& ctx);
double linear_opnorm(const LinearMap& m, const NormContext& ctx);
OpNorm bilinear_opnorm(const StructureTensor& tensor, const NormContext& ctx);

/// |m1 - m2|. Throws DimensionMismatch if dimensions or norm contexts differ.
OpNorm mult_distance(const Multiplication& m1, const Multiplication& m2);

/// Checks ||x|| / ||e|| <= |l_x|, |r_x| <= |*| ||x|| with relative slack 1e-9.
/// Requires `m` to be unital (throws HypothesisViolation otherwise).
bool mult_norm_sandwich_check(const Multiplication& m, const Element& x);

}  // namespace mltp

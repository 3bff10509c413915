#pragma once

#include <string>
#include <string_view>

#include "json.hpp"
#include "mltp/cohomology.hpp"
#include "mltp/perturbation.hpp"
#include "mltp/spectral.hpp"

namespace mltp {

using Json = nlohmann::ordered_json;

/// An algebra instance as stored on disk.
struct AlgebraInstance {
  StructureTensor tensor;
  NormContext ctx;
};

/// { "dim": n, "norm": "l1"|"l2"|"linf", "lambda": [[re, im], ...] } with n^3
/// entries ordered i-major, then j, then k.
Json instance_to_json(const StructureTensor& tensor, const NormContext& ctx);
/// Throws std::invalid_argument on a missing field, wrong-length array or malformed entry.
AlgebraInstance instance_from_json(const Json& j);

AlgebraInstance read_instance(const std::string& path);
void write_instance(const std::string& path, const StructureTensor& tensor, const NormContext& ctx);

Json complex_to_json(Complex z);
Json element_to_json(const Element& x);
Json hypothesis_to_json(const Hypothesis& h);
Json bound_to_json(const CertifiedBound& b);
/// Lexicographically sorted list of [re, im] pairs.
Json spectrum_to_json(const SpectrumSet& s);
/// { "unital", "commutative", "h_dims", "rigid_certificate" }.
Json signature_to_json(const InvariantSignature& s);

/// Comma-separated complex numbers written re+imi, e.g. "1,2-0.5i,3i".
Element parse_element(std::string_view text);
std::string format_complex(Complex z);

}  // namespace mltp

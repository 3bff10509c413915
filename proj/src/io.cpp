#include "mltp/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mltp {

namespace {

double parse_real(std::string_view s, std::string_view whole) {
  if (s.empty() || s == "+") return 1.0;
  if (s == "-") return -1.0;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw std::invalid_argument("cannot parse complex number '" + std::string(whole) + "'");
  return v;
}

Complex parse_complex(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (s.empty()) throw std::invalid_argument("empty complex number");
  if (s.back() != 'i') return {parse_real(s, s), 0.0};
  const std::string_view body = s.substr(0, s.size() - 1);
  std::size_t split = std::string_view::npos;
  for (std::size_t i = body.size(); i-- > 1;)
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  if (split == std::string_view::npos) {
    if (body.empty() || body == "+" || body == "-" || body.find_first_of("0123456789") != std::string_view::npos)
      return {0.0, parse_real(body, s)};
    throw std::invalid_argument("cannot parse complex number '" + std::string(s) + "'");
  }
  const std::string_view re = body.substr(0, split);
  if (re.empty()) throw std::invalid_argument("cannot parse complex number '" + std::string(s) + "'");
  return {parse_real(re, s), parse_real(body.substr(split), s)};
}

Complex complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw std::invalid_argument("lambda entries must be [re, im] pairs of numbers");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

Json instance_to_json(const StructureTensor& tensor, const NormContext& ctx) {
  Json lambda = Json::array();
  for (Complex c : tensor.entries()) lambda.push_back(complex_to_json(c));
  Json j;
  j["dim"] = tensor.dim();
  j["norm"] = std::string(to_string(ctx.kind));
  j["lambda"] = std::move(lambda);
  return j;
}

AlgebraInstance instance_from_json(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("algebra instance must be a JSON object");
  for (const char* key : {"dim", "norm", "lambda"})
    if (!j.contains(key)) throw std::invalid_argument(std::string("algebra instance is missing \"") + key + "\"");
  if (!j["dim"].is_number_unsigned() || j["dim"].get<std::size_t>() == 0)
    throw std::invalid_argument("\"dim\" must be a positive integer");
  if (!j["norm"].is_string()) throw std::invalid_argument("\"norm\" must be a string");
  const auto n = j["dim"].get<std::size_t>();
  const Json& lambda = j["lambda"];
  if (!lambda.is_array() || lambda.size() != n * n * n)
    throw std::invalid_argument("\"lambda\" must hold dim^3 = " + std::to_string(n * n * n) + " entries");
  std::vector<Complex> entries;
  entries.reserve(lambda.size());
  for (const Json& e : lambda) entries.push_back(complex_from_json(e));
  NormContext ctx;
  ctx.kind = parse_norm_kind(j["norm"].get<std::string>());
  return {StructureTensor(n, std::move(entries)), ctx};
}

AlgebraInstance read_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  return instance_from_json(j);
}

void write_instance(const std::string& path, const StructureTensor& tensor, const NormContext& ctx) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write " + path);
  out << instance_to_json(tensor, ctx).dump(2) << '\n';
}

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json element_to_json(const Element& x) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < x.size(); ++i) j.push_back(complex_to_json(x(i)));
  return j;
}

Json hypothesis_to_json(const Hypothesis& h) {
  Json j;
  j["r"] = h.r;
  j["s"] = h.s;
  j["M"] = h.M ? Json(*h.M) : Json(nullptr);
  j["C_M"] = h.C_M ? Json(*h.C_M) : Json(nullptr);
  Json norms = Json::object();
  for (const auto& [name, value] : h.norms) norms[name] = value;
  j["norms"] = std::move(norms);
  return j;
}

Json bound_to_json(const CertifiedBound& b) {
  Json j;
  j["hypothesis"] = hypothesis_to_json(b.hypothesis);
  j["bound"] = b.bound;
  j["measured"] = b.measured;
  j["satisfied"] = b.satisfied;
  j["exact_norms"] = b.exact_norms;
  return j;
}

Json spectrum_to_json(const SpectrumSet& s) {
  std::vector<Complex> pts = s.points;
  std::sort(pts.begin(), pts.end(), [](Complex a, Complex b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  Json j = Json::array();
  for (Complex z : pts) j.push_back(complex_to_json(z));
  return j;
}

Json signature_to_json(const InvariantSignature& s) {
  Json j;
  j["unital"] = s.unital;
  j["commutative"] = s.commutative;
  j["h_dims"] = s.cohomology.dims;
  j["rigid_certificate"] = s.cohomology.rigid_certificate;
  return j;
}

Element parse_element(std::string_view text) {
  std::vector<Complex> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    values.push_back(parse_complex(text.substr(start, comma - start)));
    start = comma + 1;
  }
  Element x(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) x(static_cast<Eigen::Index>(i)) = values[i];
  return x;
}

std::string format_complex(Complex z) {
  std::ostringstream out;
  out.precision(17);
  out << z.real() << (std::signbit(z.imag()) ? "-" : "+") << std::abs(z.imag()) << 'i';
  return out.str();
}

}  // namespace mltp

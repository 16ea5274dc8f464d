#pragma once

// JSON documents for frames, sampled functions and reports.
//
// A complex number is [re, im]. An algebra element is a list of blocks, each
// block a list of rows. A frame file looks like
//
//   {
//     "format": "mframe.frame",
//     "version": 1,
//     "algebra": {"blocks":[2,1]},
//     "rank": 2,
//     "projection": null,
//     "vectors": [
//       [<coordinate 1>, <coordinate 2>],
//       ...
//     ]
//   }
//
// where "projection" is null or a rank x rank matrix of algebra elements.
// Doubles are written in shortest round-trip form, so parsing the canonical
// text and writing it again reproduces it byte for byte.

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mframe/frames.hpp"
#include "mframe/wavelet.hpp"

namespace mframe::io {

using json = nlohmann::json;

inline constexpr const char* kFrameFormat = "mframe.frame";
inline constexpr const char* kSampledFormat = "mframe.sampled";

inline json complex_to_json(Complex c) { return json::array({c.real(), c.imag()}); }

inline json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json element_to_json(const AlgElement& a) {
  json out = json::array();
  for (const auto& b : a.blocks()) out.push_back(matrix_to_json(b));
  return out;
}

inline json vector_to_json(const ModuleVector& x) {
  json out = json::array();
  for (int i = 0; i < x.module().rank(); ++i) out.push_back(element_to_json(x.coord(i)));
  return out;
}

inline json operator_to_json(const ModuleOperator& t) {
  json rows = json::array();
  for (int i = 0; i < t.source().rank(); ++i) {
    json row = json::array();
    for (int j = 0; j < t.target().rank(); ++j) row.push_back(element_to_json(t.entry(i, j)));
    rows.push_back(std::move(row));
  }
  return {{"source_rank", t.source().rank()}, {"target_rank", t.target().rank()}, {"entries", std::move(rows)}};
}

inline json projection_to_json(const HilbertModule& h) {
  if (h.is_free()) return nullptr;
  return operator_to_json(ModuleOperator::identity(h))["entries"];
}

inline json frame_to_json(const Frame& f) {
  json vectors = json::array();
  for (const auto& x : f.elements()) vectors.push_back(vector_to_json(x));
  return {{"format", kFrameFormat},
          {"version", 1},
          {"algebra", {{"blocks", f.module().algebra().blocks()}}},
          {"rank", f.module().rank()},
          {"projection", projection_to_json(f.module())},
          {"vectors", std::move(vectors)}};
}

/// Canonical text: fixed key order, one vector per line.
inline std::string serialize_frame(const Frame& f) {
  const json doc = frame_to_json(f);
  std::ostringstream os;
  os << "{\n";
  os << "  \"format\": " << doc["format"].dump() << ",\n";
  os << "  \"version\": " << doc["version"].dump() << ",\n";
  os << "  \"algebra\": " << doc["algebra"].dump() << ",\n";
  os << "  \"rank\": " << doc["rank"].dump() << ",\n";
  os << "  \"projection\": " << doc["projection"].dump() << ",\n";
  os << "  \"vectors\": [\n";
  const json& vs = doc["vectors"];
  for (std::size_t j = 0; j < vs.size(); ++j) os << "    " << vs[j].dump() << (j + 1 < vs.size() ? ",\n" : "\n");
  os << "  ]\n}\n";
  return os.str();
}

namespace detail {

inline const json& field(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw ValidationError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(path.empty() ? key : path + "." + key, "missing field");
  return *it;
}

inline double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ValidationError(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ValidationError(path, "non-finite number");
  return d;
}

inline long long integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ValidationError(path, "expected an integer");
  return v.get<long long>();
}

inline const json& array(const json& v, const std::string& path, std::size_t expected = static_cast<std::size_t>(-1)) {
  if (!v.is_array()) throw ValidationError(path, "expected an array");
  if (expected != static_cast<std::size_t>(-1) && v.size() != expected)
    throw ValidationError(path, "expected " + std::to_string(expected) + " entries, got " + std::to_string(v.size()));
  return v;
}

inline Complex complex(const json& v, const std::string& path) {
  array(v, path, 2);
  return {number(v[0], path + "[0]"), number(v[1], path + "[1]")};
}

inline Matrix matrix(const json& v, int rows, int cols, const std::string& path) {
  array(v, path, static_cast<std::size_t>(rows));
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const std::string rp = path + "[" + std::to_string(i) + "]";
    array(v[i], rp, static_cast<std::size_t>(cols));
    for (int j = 0; j < cols; ++j) m(i, j) = complex(v[i][j], rp + "[" + std::to_string(j) + "]");
  }
  return m;
}

inline AlgebraDescriptor algebra(const json& doc, const std::string& path) {
  const json& blocks = array(field(field(doc, "algebra", path), "blocks", path + "algebra"), path + "algebra.blocks");
  std::vector<int> dims;
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const long long d = integer(blocks[k], path + "algebra.blocks[" + std::to_string(k) + "]");
    if (d < 1 || d > 64) throw ValidationError(path + "algebra.blocks[" + std::to_string(k) + "]", "block dimension out of range");
    dims.push_back(static_cast<int>(d));
  }
  if (dims.empty()) throw ValidationError(path + "algebra.blocks", "at least one block required");
  return AlgebraDescriptor(std::move(dims));
}

}  // namespace detail

inline AlgElement element_from_json(const json& v, const AlgebraDescriptor& a, const std::string& path) {
  detail::array(v, path, a.block_count());
  Blocks b;
  for (std::size_t k = 0; k < a.block_count(); ++k)
    b.push_back(detail::matrix(v[k], a.dim(k), a.dim(k), path + "[" + std::to_string(k) + "]"));
  return AlgElement(a, std::move(b));
}

inline std::vector<std::vector<AlgElement>> entries_from_json(const json& v, const AlgebraDescriptor& a, int rows, int cols,
                                                              const std::string& path) {
  detail::array(v, path, static_cast<std::size_t>(rows));
  std::vector<std::vector<AlgElement>> out;
  for (int i = 0; i < rows; ++i) {
    const std::string rp = path + "[" + std::to_string(i) + "]";
    detail::array(v[i], rp, static_cast<std::size_t>(cols));
    std::vector<AlgElement> row;
    for (int j = 0; j < cols; ++j) row.push_back(element_from_json(v[i][j], a, rp + "[" + std::to_string(j) + "]"));
    out.push_back(std::move(row));
  }
  return out;
}

inline Frame frame_from_json(const json& doc, double tol = kDefaultTol) {
  if (!doc.is_object()) throw ValidationError("", "frame document must be an object");
  const json& fmt = detail::field(doc, "format", "");
  if (!fmt.is_string() || fmt.get<std::string>() != kFrameFormat)
    throw ValidationError("format", std::string("expected \"") + kFrameFormat + "\"");
  if (detail::integer(detail::field(doc, "version", ""), "version") != 1) throw ValidationError("version", "unsupported version");
  const AlgebraDescriptor a = detail::algebra(doc, "");
  const long long rank = detail::integer(detail::field(doc, "rank", ""), "rank");
  if (rank < 0 || rank > 4096) throw ValidationError("rank", "rank out of range");
  const int n = static_cast<int>(rank);

  HilbertModule h(a, n);
  auto pit = doc.find("projection");
  if (pit != doc.end() && !pit->is_null()) {
    const ModuleOperator p = ModuleOperator::from_entries(h, h, entries_from_json(*pit, a, n, n, "projection"));
    try {
      h = HilbertModule(a, n, p.flatten(), 1e-9);
    } catch (const StructuralError& e) {
      throw ValidationError("projection", e.what());
    }
  }

  const json& vs = detail::array(detail::field(doc, "vectors", ""), "vectors");
  if (vs.empty()) throw ValidationError("vectors", "a frame needs at least one vector");
  std::vector<ModuleVector> xs;
  for (std::size_t j = 0; j < vs.size(); ++j) {
    const std::string path = "vectors[" + std::to_string(j) + "]";
    detail::array(vs[j], path, static_cast<std::size_t>(n));
    std::vector<AlgElement> coords;
    for (int i = 0; i < n; ++i) coords.push_back(element_from_json(vs[j][i], a, path + "[" + std::to_string(i) + "]"));
    try {
      xs.push_back(ModuleVector::from_coords(h, coords));
    } catch (const StructuralError& e) {
      throw ValidationError(path, e.what());
    }
  }
  return Frame(h, std::move(xs), tol);
}

inline json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(what, std::string("malformed JSON: ") + e.what());
  }
}

inline Frame parse_frame(const std::string& text, double tol = kDefaultTol) { return frame_from_json(parse_json(text, ""), tol); }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(path, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError(path, "cannot write file");
  out << text;
}

inline Frame read_frame(const std::string& path, double tol = kDefaultTol) {
  try {
    return parse_frame(read_file(path), tol);
  } catch (const ValidationError& e) {
    throw ValidationError(path + (e.path().empty() ? "" : ": " + e.path()), e.message());
  }
}

// Sampled functions: {"format": "mframe.sampled", "version": 1,
// "samples_per_unit": m, "support_start": s, "samples": [[re, im], ...]}.

inline json sampled_to_json(const SampledFunction& f) {
  json samples = json::array();
  for (const Complex& c : f.samples) samples.push_back(complex_to_json(c));
  return {{"format", kSampledFormat},
          {"version", 1},
          {"samples_per_unit", f.samples_per_unit},
          {"support_start", f.support_start},
          {"samples", std::move(samples)}};
}

inline SampledFunction sampled_from_json(const json& doc) {
  const json& fmt = detail::field(doc, "format", "");
  if (!fmt.is_string() || fmt.get<std::string>() != kSampledFormat)
    throw ValidationError("format", std::string("expected \"") + kSampledFormat + "\"");
  if (detail::integer(detail::field(doc, "version", ""), "version") != 1) throw ValidationError("version", "unsupported version");
  SampledFunction f;
  const long long m = detail::integer(detail::field(doc, "samples_per_unit", ""), "samples_per_unit");
  if (m < 1 || m > (1 << 20)) throw ValidationError("samples_per_unit", "out of range");
  f.samples_per_unit = static_cast<int>(m);
  f.support_start = detail::integer(detail::field(doc, "support_start", ""), "support_start");
  const json& s = detail::array(detail::field(doc, "samples", ""), "samples");
  for (std::size_t i = 0; i < s.size(); ++i) f.samples.push_back(detail::complex(s[i], "samples[" + std::to_string(i) + "]"));
  return f;
}

inline SampledFunction read_sampled(const std::string& path) {
  try {
    return sampled_from_json(parse_json(read_file(path), ""));
  } catch (const ValidationError& e) {
    throw ValidationError(path + (e.path().empty() ? "" : ": " + e.path()), e.message());
  }
}

inline json periodized_to_json(const PeriodizedElement& p) {
  json values = json::array();
  for (const Complex& c : p.values) values.push_back(complex_to_json(c));
  return values;
}

}  // namespace mframe::io

#pragma once

// JSON transform documents:
//
//   {"transforms": [{"matrix": [12 reals, row-major 3x4]}, {"param": [12 reals]}, ...],
//    "times": [...]}                       <- tracks only
//
// Needs nlohmann/json (vendor/json.hpp) on the include path.

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "affp/error.hpp"
#include "affp/param.hpp"

namespace affp {

/// One entry as written in the file; exactly one of the two is set.
struct TransformEntry {
  std::optional<HomAffine3> matrix;
  std::optional<AffineParam12> param;
};

struct TransformFile {
  std::vector<TransformEntry> transforms;
  std::vector<double> times;  // empty unless the document has "times"
};

namespace detail {

inline std::array<double, 12> read_twelve(const nlohmann::json& arr, const std::string& where) {
  if (!arr.is_array() || arr.size() != 12)
    throw Error(ErrorCode::ParseError, where + ": expected an array of 12 numbers");
  std::array<double, 12> v{};
  for (std::size_t k = 0; k < 12; ++k) {
    const auto& e = arr[k];
    if (!e.is_number() || !std::isfinite(e.get<double>()))
      throw Error(ErrorCode::ParseError, where + "[" + std::to_string(k) + "]: expected a finite number");
    v[k] = e.get<double>();
  }
  return v;
}

}  // namespace detail

/// Throws ParseError with a field path such as "transforms[3].matrix[5]".
/// Matrix entries must have det(linear) > 0 (NotOrientationPreserving,
/// naming the index).
inline TransformFile parse_transform_file(std::istream& in, const std::string& source = "<input>") {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, source + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("transforms") || !doc["transforms"].is_array())
    throw Error(ErrorCode::ParseError, source + ": expected an object with a \"transforms\" array");

  TransformFile out;
  const auto& list = doc["transforms"];
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string where = source + ": transforms[" + std::to_string(i) + "]";
    const auto& t = list[i];
    if (!t.is_object()) throw Error(ErrorCode::ParseError, where + ": expected an object");
    const bool has_m = t.contains("matrix");
    const bool has_p = t.contains("param");
    if (has_m == has_p)
      throw Error(ErrorCode::ParseError, where + ": needs exactly one of \"matrix\" or \"param\"");
    TransformEntry e;
    if (has_m) {
      const HomAffine3 a = HomAffine3::from_rows(detail::read_twelve(t["matrix"], where + ".matrix"));
      if (!(det(a.linear) > 0.0))
        throw Error(ErrorCode::NotOrientationPreserving,
                    where + ": det of the linear part is " + std::to_string(det(a.linear)) + " <= 0");
      e.matrix = a;
    } else {
      e.param = AffineParam12::from_array(detail::read_twelve(t["param"], where + ".param"));
    }
    out.transforms.push_back(e);
  }
  if (doc.contains("times")) {
    const auto& ts = doc["times"];
    if (!ts.is_array()) throw Error(ErrorCode::ParseError, source + ": times: expected an array");
    for (std::size_t k = 0; k < ts.size(); ++k) {
      if (!ts[k].is_number())
        throw Error(ErrorCode::ParseError, source + ": times[" + std::to_string(k) + "]: expected a number");
      out.times.push_back(ts[k].get<double>());
    }
  }
  return out;
}

inline TransformFile read_transform_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  return parse_transform_file(in, path);
}

/// The entry as a transform (param entries go through phi).
inline HomAffine3 as_matrix(const TransformEntry& e) { return e.matrix ? *e.matrix : phi(*e.param); }

/// The entry as parameters; matrix entries go through psi, or psi_consistent
/// when a reference is given.
inline AffineParam12 as_param(const TransformEntry& e, const AffineParam12* ref = nullptr) {
  if (e.param) return *e.param;
  return ref ? psi_consistent(*e.matrix, *ref) : psi(*e.matrix);
}

namespace detail {

// %.17g so values survive a write/read round trip bit for bit.
inline std::string number_list(const std::array<double, 12>& v) {
  std::string s = "[";
  char buf[40];
  for (std::size_t k = 0; k < v.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", v[k] == 0.0 ? 0.0 : v[k]);
    s += buf;
    if (k + 1 < v.size()) s += ", ";
  }
  return s + "]";
}

}  // namespace detail

inline void write_matrices(std::ostream& out, const std::vector<HomAffine3>& ts,
                           const std::vector<double>& times = {}) {
  out << "{";
  if (!times.empty()) {
    out << "\"times\": [";
    char buf[40];
    for (std::size_t k = 0; k < times.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", times[k]);
      out << buf << (k + 1 < times.size() ? ", " : "");
    }
    out << "],\n ";
  }
  out << "\"transforms\": [\n";
  for (std::size_t i = 0; i < ts.size(); ++i)
    out << "  {\"matrix\": " << detail::number_list(ts[i].to_rows()) << "}" << (i + 1 < ts.size() ? "," : "")
        << "\n";
  out << "]}\n";
}

inline void write_params(std::ostream& out, const std::vector<AffineParam12>& ps) {
  out << "{\"transforms\": [\n";
  for (std::size_t i = 0; i < ps.size(); ++i)
    out << "  {\"param\": " << detail::number_list(ps[i].to_array()) << "}" << (i + 1 < ps.size() ? "," : "")
        << "\n";
  out << "]}\n";
}

}  // namespace affp

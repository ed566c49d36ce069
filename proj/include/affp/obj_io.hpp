#pragma once

// Wavefront OBJ, triangles only. Reads `v` and `f` records (1-based or
// negative relative indices, `i/t/n` tokens allowed); every other record is
// skipped. Writes vertices with 17 significant digits.

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "affp/error.hpp"
#include "affp/meshblend.hpp"

namespace affp {

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && p == end;
}

}  // namespace detail

/// Throws ParseError with "<source>:<line>: ..." on malformed input.
inline TriMesh read_obj(std::istream& in, const std::string& source = "<obj>") {
  TriMesh mesh;
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::ParseError, source + ":" + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const auto tok = detail::split_ws(std::string_view(line).substr(0, hash));
    if (tok.empty()) continue;
    if (tok[0] == "v") {
      if (tok.size() < 4 || tok.size() > 5) fail("vertex needs 3 coordinates");
      Vec3 v;
      for (int k = 0; k < 3; ++k)
        if (!detail::parse_number(tok[k + 1], v[k]) || !std::isfinite(v[k]))
          fail("bad vertex coordinate '" + std::string(tok[k + 1]) + "'");
      mesh.vertices.push_back(v);
    } else if (tok[0] == "f") {
      if (tok.size() != 4)
        fail("face has " + std::to_string(tok.size() - 1) + " vertices; only triangles are supported");
      std::array<int, 3> f{};
      for (int k = 0; k < 3; ++k) {
        const std::string_view t = tok[k + 1].substr(0, tok[k + 1].find('/'));
        int idx = 0;
        if (!detail::parse_number(t, idx) || idx == 0) fail("bad face index '" + std::string(tok[k + 1]) + "'");
        const int nv = static_cast<int>(mesh.vertices.size());
        idx = idx > 0 ? idx - 1 : nv + idx;
        if (idx < 0 || idx >= nv) fail("face index " + std::string(t) + " out of range");
        f[k] = idx;
      }
      mesh.faces.push_back(f);
    }
  }
  return mesh;
}

inline TriMesh read_obj_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  return read_obj(in, path);
}

inline void write_obj(std::ostream& out, const TriMesh& mesh) {
  char buf[128];
  for (const Vec3& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", v.x, v.y, v.z);
    out << buf;
  }
  for (const auto& f : mesh.faces) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

inline void write_obj_file(const std::string& path, const TriMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  write_obj(out, mesh);
}

}  // namespace affp

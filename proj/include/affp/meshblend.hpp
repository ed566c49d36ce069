#pragma once

// Shape blending of compatibly triangulated meshes. Each face gets the affine
// map carrying the rest triangle (and its unit normal) onto the target
// triangle; maps are blended per face in parameter space, and the incoherent
// per-face results are patched back into one piecewise-linear deformation by
// linear least squares over vertex positions.
//
// Unknowns are the vertex positions plus one auxiliary point per face that
// stands in for "v0 + normal". The face map is then linear in the unknowns:
// A_j = [p0 p1 p2 q_j] C_j with C_j fixed by the rest triangle, and the energy
// sum_j |A_j - A'_j|_F^2 (3x4 blocks) has the sparse SPD normal equations
//   K = sum_j E_j^T C_j C_j^T E_j,   shared by the x, y and z coordinates.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "affp/blend.hpp"
#include "affp/error.hpp"
#include "affp/linalg3.hpp"
#include "affp/param.hpp"

namespace affp {

inline constexpr double kMinFaceArea = 1e-12;

struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;  // 0-based, counterclockwise

  [[nodiscard]] std::array<Vec3, 3> triangle(std::size_t f) const {
    const auto& ix = faces[f];
    return {vertices[ix[0]], vertices[ix[1]], vertices[ix[2]]};
  }

  /// Throws InvalidArgument when a face index is out of range.
  void validate() const {
    const int nv = static_cast<int>(vertices.size());
    for (std::size_t f = 0; f < faces.size(); ++f)
      for (int i : faces[f])
        if (i < 0 || i >= nv)
          throw Error(ErrorCode::InvalidArgument,
                      "face " + std::to_string(f) + " references vertex " + std::to_string(i) + " of " +
                          std::to_string(nv));
  }
};

/// Unit normal of a counterclockwise triangle. Throws DegenerateTriangle.
inline Vec3 face_normal(const std::array<Vec3, 3>& tri) {
  const Vec3 c = cross(tri[1] - tri[0], tri[2] - tri[0]);
  const double len = norm(c);
  if (!(0.5 * len > kMinFaceArea)) throw Error(ErrorCode::DegenerateTriangle, "triangle area below 1e-12");
  return c / len;
}

namespace detail {

inline Mat3 face_frame(const std::array<Vec3, 3>& tri) {
  return Mat3::from_columns(tri[1] - tri[0], tri[2] - tri[0], face_normal(tri));
}

}  // namespace detail

/// The affine map sending the rest triangle's vertices to the target's and
/// the rest unit normal to the target unit normal.
/// Throws DegenerateTriangle, and OrientationFlip if the result has det <= 0.
inline HomAffine3 per_face_affine(const std::array<Vec3, 3>& rest, const std::array<Vec3, 3>& target) {
  const Mat3 lin = detail::face_frame(target) * inverse(detail::face_frame(rest));
  if (!(det(lin) > 0.0)) throw Error(ErrorCode::OrientationFlip, "face map reverses orientation");
  return {lin, target[0] - lin * rest[0]};
}

/// Rest mesh plus targets with identical connectivity.
struct CompatibleSet {
  TriMesh rest;
  std::vector<TriMesh> targets;

  /// Throws InvalidArgument when connectivity or counts differ.
  void validate() const {
    rest.validate();
    for (std::size_t k = 0; k < targets.size(); ++k) {
      const TriMesh& t = targets[k];
      t.validate();
      if (t.vertices.size() != rest.vertices.size() || t.faces != rest.faces)
        throw Error(ErrorCode::InvalidArgument,
                    "target " + std::to_string(k) + " is not compatibly triangulated with the rest mesh");
    }
  }
};

struct MeshBlendOptions {
  BranchMode mode = BranchMode::Principal;
  double tolerance = 1e-10;  // relative residual |Kx - b| / |b|
  int max_iteration_factor = 20;
};

struct MeshBlendResult {
  TriMesh mesh;
  std::vector<Vec3> aux_points;          // per face, the solved "v0 + normal" point
  std::vector<HomAffine3> face_targets;  // blended per-face maps A'_j
  double relative_residual = 0.0;        // worst over the three coordinates
  int iterations = 0;
  double energy = 0.0;
};

namespace detail {

// Row i of C_j: coefficients of unknown i (p0, p1, p2, q) in the 3x4 face map.
using FaceCoeffs = std::array<std::array<double, 4>, 4>;

inline FaceCoeffs face_coeffs(const std::array<Vec3, 3>& rest) {
  const Mat3 d = inverse(face_frame(rest));
  const Vec3 d0 = d.row(0), d1 = d.row(1), d2 = d.row(2);
  const std::array<Vec3, 4> lin{-(d0 + d1 + d2), d0, d1, d2};
  FaceCoeffs c{};
  for (int i = 0; i < 4; ++i) {
    c[i] = {lin[i].x, lin[i].y, lin[i].z, (i == 0 ? 1.0 : 0.0) - dot(lin[i], rest[0])};
  }
  return c;
}

struct SparseSpd {
  std::vector<std::size_t> row_start;
  std::vector<std::size_t> col;
  std::vector<double> val;
  std::vector<double> diag;

  void multiply(std::span<const double> x, std::span<double> y) const {
    for (std::size_t r = 0; r + 1 < row_start.size(); ++r) {
      double s = 0.0;
      for (std::size_t k = row_start[r]; k < row_start[r + 1]; ++k) s += val[k] * x[col[k]];
      y[r] = s;
    }
  }
};

inline SparseSpd compress(std::size_t n, std::vector<std::pair<std::size_t, std::size_t>>& keys,
                          std::vector<double>& vals) {
  std::vector<std::size_t> order(keys.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
  SparseSpd m;
  m.row_start.assign(n + 1, 0);
  m.diag.assign(n, 0.0);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& k = keys[order[i]];
    if (!m.col.empty() && i > 0 && keys[order[i - 1]] == k) {
      m.val.back() += vals[order[i]];
    } else {
      m.col.push_back(k.second);
      m.val.push_back(vals[order[i]]);
      ++m.row_start[k.first + 1];
    }
  }
  for (std::size_t r = 0; r < n; ++r) m.row_start[r + 1] += m.row_start[r];
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t k = m.row_start[r]; k < m.row_start[r + 1]; ++k)
      if (m.col[k] == r) m.diag[r] = m.val[k];
  return m;
}

struct CgOutcome {
  double relative_residual;
  int iterations;
  bool converged;
};

// Jacobi-preconditioned conjugate gradient, warm-started from x.
inline CgOutcome solve_cg(const SparseSpd& k, std::span<const double> b, std::span<double> x, double tol,
                          int max_iter) {
  const std::size_t n = b.size();
  double bnorm = 0.0;
  for (double v : b) bnorm += v * v;
  bnorm = std::sqrt(bnorm);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return {0.0, 0, true};
  }
  std::vector<double> r(n), z(n), p(n), kp(n);
  k.multiply(x, r);
  double rnorm2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = b[i] - r[i];
    rnorm2 += r[i] * r[i];
  }
  auto precondition = [&] {
    double rz = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      z[i] = r[i] / k.diag[i];
      rz += r[i] * z[i];
    }
    return rz;
  };
  double rz = precondition();
  p = z;
  int it = 0;
  while (std::sqrt(rnorm2) > tol * bnorm && it < max_iter) {
    k.multiply(p, kp);
    double pkp = 0.0;
    for (std::size_t i = 0; i < n; ++i) pkp += p[i] * kp[i];
    if (!(pkp > 0.0)) break;
    const double alpha = rz / pkp;
    rnorm2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * kp[i];
      rnorm2 += r[i] * r[i];
    }
    const double rz_next = precondition();
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    ++it;
  }
  // report the true residual, not the recurrence
  k.multiply(x, kp);
  double res = 0.0;
  for (std::size_t i = 0; i < n; ++i) res += (b[i] - kp[i]) * (b[i] - kp[i]);
  const double rel = std::sqrt(res) / bnorm;
  return {rel, it, rel <= tol};
}

}  // namespace detail

/// sum_j |[p0 p1 p2 q_j] C_j - A'_j|_F^2 for the given vertex and auxiliary
/// point positions.
inline double patch_energy(const TriMesh& rest, std::span<const HomAffine3> face_targets,
                           std::span<const Vec3> vertices, std::span<const Vec3> aux_points) {
  double e = 0.0;
  for (std::size_t f = 0; f < rest.faces.size(); ++f) {
    const detail::FaceCoeffs c = detail::face_coeffs(rest.triangle(f));
    const auto& ix = rest.faces[f];
    const std::array<Vec3, 4> pts{vertices[ix[0]], vertices[ix[1]], vertices[ix[2]], aux_points[f]};
    const HomAffine3& t = face_targets[f];
    for (int r = 0; r < 3; ++r)
      for (int col = 0; col < 4; ++col) {
        double v = 0.0;
        for (int i = 0; i < 4; ++i) v += pts[i][r] * c[i][col];
        const double target = col < 3 ? t.linear(r, col) : t.translation[r];
        e += (v - target) * (v - target);
      }
  }
  return e;
}

/// Least-squares patch of the given per-face maps into vertex positions.
/// Vertices not referenced by any face keep their rest positions.
/// Throws SolverNotConverged if CG misses the tolerance.
inline MeshBlendResult patch_faces(const TriMesh& rest, std::vector<HomAffine3> face_targets,
                                   const MeshBlendOptions& opt = {}) {
  rest.validate();
  const std::size_t nf = rest.faces.size();
  if (face_targets.size() != nf)
    throw Error(ErrorCode::InvalidArgument, "one target map per face is required");

  constexpr std::size_t unused = static_cast<std::size_t>(-1);
  std::vector<std::size_t> unknown_of(rest.vertices.size(), unused);
  std::vector<std::size_t> vertex_of;
  for (const auto& f : rest.faces)
    for (int i : f)
      if (unknown_of[i] == unused) {
        unknown_of[i] = vertex_of.size();
        vertex_of.push_back(static_cast<std::size_t>(i));
      }
  const std::size_t nvu = vertex_of.size();
  const std::size_t n = nvu + nf;

  std::vector<std::pair<std::size_t, std::size_t>> keys;
  std::vector<double> vals;
  keys.reserve(16 * nf);
  vals.reserve(16 * nf);
  std::array<std::vector<double>, 3> rhs;
  for (auto& b : rhs) b.assign(n, 0.0);

  for (std::size_t f = 0; f < nf; ++f) {
    const auto tri = rest.triangle(f);
    const detail::FaceCoeffs c = detail::face_coeffs(tri);
    const auto& ix = rest.faces[f];
    const std::array<std::size_t, 4> loc{unknown_of[ix[0]], unknown_of[ix[1]], unknown_of[ix[2]], nvu + f};
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        double m = 0.0;
        for (int col = 0; col < 4; ++col) m += c[a][col] * c[b][col];
        keys.emplace_back(loc[a], loc[b]);
        vals.push_back(m);
      }
    const HomAffine3& t = face_targets[f];
    for (int r = 0; r < 3; ++r)
      for (int a = 0; a < 4; ++a) {
        double s = 0.0;
        for (int col = 0; col < 3; ++col) s += t.linear(r, col) * c[a][col];
        s += t.translation[r] * c[a][3];
        rhs[r][loc[a]] += s;
      }
  }

  // Extra connected components: pin their first vertex to where its first
  // face's blended map sends it, and eliminate it from the system.
  std::vector<std::size_t> root(rest.vertices.size());
  for (std::size_t i = 0; i < root.size(); ++i) root[i] = i;
  auto find = [&](std::size_t i) {
    while (root[i] != i) i = root[i] = root[root[i]];
    return i;
  };
  for (const auto& f : rest.faces) {
    root[find(f[1])] = find(f[0]);
    root[find(f[2])] = find(f[0]);
  }
  std::vector<bool> pinned(n, false);
  std::vector<Vec3> pin_value(n);
  std::vector<bool> component_seen(rest.vertices.size(), false);
  for (std::size_t f = 0; f < nf; ++f) {
    const int v = rest.faces[f][0];
    const std::size_t c = find(v);
    if (component_seen[c]) continue;
    component_seen[c] = true;
    if (f == 0) continue;
    pinned[unknown_of[v]] = true;
    pin_value[unknown_of[v]] = face_targets[f].apply(rest.vertices[v]);
  }
  if (std::find(pinned.begin(), pinned.end(), true) != pinned.end()) {
    std::size_t kept = 0;
    for (std::size_t e = 0; e < keys.size(); ++e) {
      const auto [row, col] = keys[e];
      if (pinned[row]) continue;
      if (pinned[col]) {
        for (int r = 0; r < 3; ++r) rhs[r][row] -= vals[e] * pin_value[col][r];
        continue;
      }
      keys[kept] = keys[e];
      vals[kept++] = vals[e];
    }
    keys.resize(kept);
    vals.resize(kept);
    for (std::size_t u = 0; u < n; ++u)
      if (pinned[u]) {
        keys.emplace_back(u, u);
        vals.push_back(1.0);
        for (int r = 0; r < 3; ++r) rhs[r][u] = pin_value[u][r];
      }
  }
  const detail::SparseSpd k = detail::compress(n, keys, vals);

  MeshBlendResult out;
  out.mesh = rest;
  out.aux_points.resize(nf);
  const int max_iter = opt.max_iteration_factor * static_cast<int>(n);
  for (int r = 0; r < 3; ++r) {
    std::vector<double> x(n);
    for (std::size_t u = 0; u < nvu; ++u) x[u] = rest.vertices[vertex_of[u]][r];
    for (std::size_t f = 0; f < nf; ++f) {
      const auto tri = rest.triangle(f);
      x[nvu + f] = (tri[0] + face_normal(tri))[r];
    }
    for (std::size_t u = 0; u < n; ++u)
      if (pinned[u]) x[u] = pin_value[u][r];
    const detail::CgOutcome cg = detail::solve_cg(k, rhs[r], x, opt.tolerance, max_iter);
    if (!cg.converged)
      throw Error(ErrorCode::SolverNotConverged,
                  "conjugate gradient stopped at relative residual " + std::to_string(cg.relative_residual));
    out.relative_residual = std::max(out.relative_residual, cg.relative_residual);
    out.iterations = std::max(out.iterations, cg.iterations);
    for (std::size_t u = 0; u < nvu; ++u) out.mesh.vertices[vertex_of[u]][r] = x[u];
    for (std::size_t f = 0; f < nf; ++f) out.aux_points[f][r] = x[nvu + f];
  }
  out.face_targets = std::move(face_targets);
  out.energy = patch_energy(rest, out.face_targets, out.mesh.vertices, out.aux_points);
  return out;
}

/// Blended shape U(w): per-face maps A'_j = blend(w, A_1j..A_nj), patched by
/// least squares. U(0) is the rest mesh and U(e_k) the k-th target.
/// Throws InvalidArgument, DegenerateTriangle, OrientationFlip or SolverNotConverged.
inline MeshBlendResult blend_shapes(const CompatibleSet& set, std::span<const double> weights,
                                    const MeshBlendOptions& opt = {}) {
  set.validate();
  if (weights.size() != set.targets.size())
    throw Error(ErrorCode::InvalidArgument, std::to_string(set.targets.size()) + " targets but " +
                                                std::to_string(weights.size()) + " weights");
  const std::size_t nf = set.rest.faces.size();
  std::vector<HomAffine3> blended(nf);
  std::vector<HomAffine3> per_target(set.targets.size());
  for (std::size_t f = 0; f < nf; ++f) {
    const auto rest_tri = set.rest.triangle(f);
    for (std::size_t k = 0; k < set.targets.size(); ++k)
      per_target[k] = per_face_affine(rest_tri, set.targets[k].triangle(f));
    blended[f] = set.targets.empty() ? HomAffine3::identity() : blend(per_target, weights, opt.mode);
  }
  return patch_faces(set.rest, std::move(blended), opt);
}

}  // namespace affp

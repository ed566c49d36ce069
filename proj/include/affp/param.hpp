#pragma once

// The 12-dimensional parametrisation of orientation-preserving affine maps:
//
//   phi(l, X, Y) = T(l) * [exp(X) exp(Y)]      (l in R^3, X in so(3), Y in sym(3))
//   psi(A)       = (t, log(A_lin S^-1), log S)  with S = sqrt(A_lin^T A_lin)
//
// exp(X) exp(Y) is the polar decomposition of the linear part, so psi doubles
// as a closed-form polar decomposition. Every subclass in the lattice below
// (rigid, similarity, linear, ...) is a linear subspace of the parameter space.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "affp/error.hpp"
#include "affp/expmap.hpp"
#include "affp/linalg3.hpp"
#include "affp/logmap.hpp"

namespace affp {

/// A point of R^3 x so(3) x sym(3). Serialised as
/// [l1, l2, l3, x4, x5, x6, y7, y8, y9, y10, y11, y12].
struct AffineParam12 {
  Vec3 l{};
  AntiSymMat3 x{};
  SymMat3 y{};

  static constexpr AffineParam12 zero() noexcept { return {}; }

  static constexpr AffineParam12 from_array(const std::array<double, 12>& v) noexcept {
    return {{v[0], v[1], v[2]}, {{v[3], v[4], v[5]}}, {{v[6], v[7], v[8], v[9], v[10], v[11]}}};
  }

  constexpr std::array<double, 12> to_array() const noexcept {
    return {l.x, l.y, l.z, x.x[0], x.x[1], x.x[2], y.y[0], y.y[1], y.y[2], y.y[3], y.y[4], y.y[5]};
  }

  constexpr AffineParam12 operator+(const AffineParam12& b) const noexcept { return {l + b.l, x + b.x, y + b.y}; }
  constexpr AffineParam12 operator-(const AffineParam12& b) const noexcept { return {l - b.l, x - b.x, y - b.y}; }
  constexpr AffineParam12 operator*(double s) const noexcept { return {l * s, x * s, y * s}; }
  constexpr AffineParam12& operator+=(const AffineParam12& b) noexcept { return *this = *this + b; }
  constexpr bool operator==(const AffineParam12&) const = default;
};

constexpr AffineParam12 operator*(double s, const AffineParam12& p) noexcept { return p * s; }

/// Euclidean norm on R^12 (so(3) and sym(3) components counted once each).
inline double norm(const AffineParam12& p) noexcept {
  double s = 0.0;
  for (double v : p.to_array()) s += v * v;
  return std::sqrt(s);
}

/// 3x4 block of a homogeneous affine map: x -> linear * x + translation.
struct HomAffine3 {
  Mat3 linear = Mat3::identity();
  Vec3 translation{};

  static constexpr HomAffine3 identity() noexcept { return {}; }

  /// Row-major 3x4 entries [a11 a12 a13 lx a21 ... lz].
  static constexpr HomAffine3 from_rows(const std::array<double, 12>& v) noexcept {
    return {{{v[0], v[1], v[2], v[4], v[5], v[6], v[8], v[9], v[10]}}, {v[3], v[7], v[11]}};
  }

  constexpr std::array<double, 12> to_rows() const noexcept {
    const Mat3& m = linear;
    return {m(0, 0), m(0, 1), m(0, 2), translation.x, m(1, 0), m(1, 1),
            m(1, 2), translation.y, m(2, 0), m(2, 1), m(2, 2), translation.z};
  }

  constexpr Vec3 apply(const Vec3& p) const noexcept { return linear * p + translation; }

  constexpr HomAffine3 operator*(const HomAffine3& b) const noexcept {
    return {linear * b.linear, linear * b.translation + translation};
  }
  constexpr bool operator==(const HomAffine3&) const = default;
};

/// |A - B|_F^2 over the 3x4 block.
constexpr double frobenius_sq_diff(const HomAffine3& a, const HomAffine3& b) noexcept {
  const Vec3 dt = a.translation - b.translation;
  return frobenius_sq(a.linear - b.linear) + dot(dt, dt);
}

inline constexpr double kIllConditionedDet = 1e-6;

/// psi loses accuracy as the linear part approaches singularity.
inline bool ill_conditioned(const HomAffine3& a) noexcept { return det(a.linear) < kIllConditionedDet; }

struct PsiOptions {
  // One Newton polar step on A_lin S^-1 before taking its log. Forming
  // A^T A squares the condition number, and without this step R drifts off
  // SO(3) by ~1e-9 for det(A) near 1e-3.
  bool reorthonormalize = true;
};

struct PolarParts {
  Mat3 rotation;
  SymMat3 stretch;
};

namespace detail {

struct PolarLogs {
  Mat3 rotation;
  SymMat3 log_stretch;
};

inline PolarLogs polar_logs(const Mat3& lin, bool reorthonormalize) {
  const double d = det(lin);
  if (!(d > 0.0) || !all_finite(lin))
    throw Error(ErrorCode::NotOrientationPreserving, "linear part has det " + std::to_string(d) + " <= 0");
  const SymMat3 g = gram(lin);
  SymEig3 ev = sym_eigenvalues(g);
  // det(G) = det(A)^2 is known to full relative precision, which the cubic
  // root of a nearly singular G is not.
  ev.l3 = std::min(ev.l2, d * d / (ev.l1 * ev.l2));
  if (!(ev.l3 > 0.0))
    throw Error(ErrorCode::NotOrientationPreserving, "linear part is numerically singular");
  const SymMat3 log_s = log_spd_half_gram(g, ev);
  Mat3 r = lin * inv_sqrt_from_half_log(log_s, ev);
  if (reorthonormalize) r = (r + transpose(inverse(r))) * 0.5;
  return {r, log_s};
}

}  // namespace detail

/// A_lin = R S with R a rotation and S SPD, computed without iteration.
/// Throws NotOrientationPreserving when det(A_lin) <= 0.
inline PolarParts polar_decompose(const Mat3& lin) {
  const detail::PolarLogs p = detail::polar_logs(lin, true);
  const SymMat3 log_s = p.log_stretch;
  return {p.rotation, exp_sym3(log_s)};
}

/// phi(l, X, Y) = T(l) [exp(X) exp(Y)]. Total on R^12; throws Overflow only
/// when exp(Y) is not representable.
inline HomAffine3 phi(const AffineParam12& p) { return {exp_so3(p.x) * exp_sym3(p.y), p.l}; }

/// Principal-branch inverse of phi (rotation angle in [0, pi]).
/// Throws NotOrientationPreserving when det(A_lin) <= 0.
inline AffineParam12 psi(const HomAffine3& a, const PsiOptions& opt = {}) {
  const detail::PolarLogs p = detail::polar_logs(a.linear, opt.reorthonormalize);
  return {a.translation, log_so3(p.rotation), p.log_stretch};
}

/// psi whose rotation log is the branch closest to `ref.x`.
inline AffineParam12 psi_consistent(const HomAffine3& a, const AffineParam12& ref, const PsiOptions& opt = {}) {
  const detail::PolarLogs p = detail::polar_logs(a.linear, opt.reorthonormalize);
  return {a.translation, consistent_log_so3(p.rotation, ref.x), p.log_stretch};
}

// ---------------------------------------------------------------------------
// Subclass lattice

enum class TransformClass { R3, SO3, Rplus, SE3, COplus3, Symplus3, Simplus3, GLplus3, Affplus3 };

inline constexpr std::array<TransformClass, 9> kAllClasses{
    TransformClass::R3,       TransformClass::SO3,      TransformClass::Rplus,
    TransformClass::SE3,      TransformClass::COplus3,  TransformClass::Symplus3,
    TransformClass::Simplus3, TransformClass::GLplus3,  TransformClass::Affplus3};

constexpr std::string_view to_string(TransformClass c) noexcept {
  switch (c) {
    case TransformClass::R3: return "R3";
    case TransformClass::SO3: return "SO3";
    case TransformClass::Rplus: return "Rplus";
    case TransformClass::SE3: return "SE3";
    case TransformClass::COplus3: return "COplus3";
    case TransformClass::Symplus3: return "Symplus3";
    case TransformClass::Simplus3: return "Simplus3";
    case TransformClass::GLplus3: return "GLplus3";
    case TransformClass::Affplus3: return "Affplus3";
  }
  return "?";
}

inline std::optional<TransformClass> parse_transform_class(std::string_view s) noexcept {
  for (TransformClass c : kAllClasses)
    if (to_string(c) == s) return c;
  return std::nullopt;
}

enum class SymPart { Zero, Scalar, Full };

/// Shape of the subspace V_c: which of the three factors are free.
struct ClassSubspace {
  bool translation;
  bool rotation;
  SymPart stretch;
};

constexpr ClassSubspace subspace(TransformClass c) noexcept {
  switch (c) {
    case TransformClass::R3: return {true, false, SymPart::Zero};
    case TransformClass::SO3: return {false, true, SymPart::Zero};
    case TransformClass::Rplus: return {false, false, SymPart::Scalar};
    case TransformClass::SE3: return {true, true, SymPart::Zero};
    case TransformClass::COplus3: return {false, true, SymPart::Scalar};
    case TransformClass::Symplus3: return {false, false, SymPart::Full};
    case TransformClass::Simplus3: return {true, true, SymPart::Scalar};
    case TransformClass::GLplus3: return {false, true, SymPart::Full};
    case TransformClass::Affplus3: return {true, true, SymPart::Full};
  }
  return {true, true, SymPart::Full};
}

/// True when class `lower` is contained in class `upper`.
constexpr bool contains(TransformClass upper, TransformClass lower) noexcept {
  const ClassSubspace u = subspace(upper);
  const ClassSubspace l = subspace(lower);
  return (!l.translation || u.translation) && (!l.rotation || u.rotation) &&
         static_cast<int>(l.stretch) <= static_cast<int>(u.stretch);
}

/// Orthogonal projection of p onto V_c.
constexpr AffineParam12 project_to_class(const AffineParam12& p, TransformClass c) noexcept {
  const ClassSubspace s = subspace(c);
  AffineParam12 r;
  if (s.translation) r.l = p.l;
  if (s.rotation) r.x = p.x;
  switch (s.stretch) {
    case SymPart::Zero: break;
    case SymPart::Scalar: r.y = SymMat3::scalar(trace(p.y) / 3.0); break;
    case SymPart::Full: r.y = p.y; break;
  }
  return r;
}

/// Distance from p to V_c is at most tol.
inline bool is_in_class(const AffineParam12& p, TransformClass c, double tol) noexcept {
  return norm(p - project_to_class(p, c)) <= tol;
}

/// Membership tested on the transformation itself. Scale-type conditions are
/// relative to the size of the linear part; the rest are absolute.
inline bool is_member(const HomAffine3& a, TransformClass c, double tol) noexcept {
  const Mat3& m = a.linear;
  if (!all_finite(m) || !(det(m) > 0.0)) return false;
  const ClassSubspace s = subspace(c);
  if (!s.translation && norm(a.translation) > tol) return false;

  const SymMat3 g = gram(m);
  const double mean_g = trace(g) / 3.0;
  switch (c) {
    case TransformClass::R3: return frobenius(m - Mat3::identity()) <= tol;
    case TransformClass::SO3:
    case TransformClass::SE3: return frobenius(g - SymMat3::identity()) <= tol;
    case TransformClass::Rplus: {
      const double mean = trace(m) / 3.0;
      return frobenius(m - Mat3::identity() * mean) <= tol * mean;
    }
    case TransformClass::COplus3:
    case TransformClass::Simplus3: return frobenius(g - SymMat3::scalar(mean_g)) <= tol * mean_g;
    case TransformClass::Symplus3: {
      const double scale = frobenius(m);
      return frobenius(m - transpose(m)) <= tol * scale && sym_eigenvalues(SymMat3::sym_part(m)).l3 > 0.0;
    }
    case TransformClass::GLplus3:
    case TransformClass::Affplus3: return true;
  }
  return false;
}

}  // namespace affp

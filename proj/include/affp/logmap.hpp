#pragma once

// Closed-form logarithms: log of an SPD matrix through the Cayley-Hamilton
// remainder (normalised by the middle eigenvalue), the principal SO(3) log with
// its small-angle and near-pi branches, and the branch-tracking rotation log.

#include <cmath>
#include <numbers>
#include <string>

#include "affp/error.hpp"
#include "affp/expmap.hpp"
#include "affp/linalg3.hpp"

namespace affp {

inline constexpr double kL2SeriesSwitch = 0.1;
inline constexpr double kLogGapSwitch = 1e-4;
inline constexpr double kNearPiSwitch = 1e-3;
inline constexpr double kRotationTolerance = 1e-6;
inline constexpr double kAxisComponentFloor = 1e-9;

namespace detail {

// sum_{k>=1} (-1)^k d^k / (k+1); 16 terms reach 1e-17 for |d| < 0.1.
inline double l2_series(double d) noexcept {
  double r = 0.0;
  for (int k = 16; k >= 1; --k) r = (r + ((k % 2 == 0) ? 1.0 : -1.0) / (k + 1)) * d;
  return r;
}

}  // namespace detail

/// L2(x) = (log(x) - (x - 1)) / (x - 1), with L2(1) = 0.
inline double l2(double x) noexcept {
  const double d = x - 1.0;
  if (std::abs(d) < kL2SeriesSwitch) return detail::l2_series(d);
  return (std::log(x) - d) / d;
}

/// (1/2) log(G) for SPD G with eigenvalues `ev`, i.e. log(S) for S = sqrt(G).
/// Throws NotPositiveDefinite when the smallest eigenvalue is not positive.
inline SymMat3 log_spd_half_gram(const SymMat3& g, const SymEig3& ev) {
  if (!(ev.l3 > 0.0)) throw Error(ErrorCode::NotPositiveDefinite, "smallest eigenvalue is not positive");
  const double r1 = ev.l1 / ev.l2;
  const double r3 = ev.l3 / ev.l2;
  double a = 0.0;
  double c = 0.0;
  if (r1 - r3 < kLogGapSwitch) {
    // divided differences of L2 expanded around r = 1
    const double d1 = r1 - 1.0;
    const double d3 = r3 - 1.0;
    const double h1 = d1 + d3;
    const double h2 = d1 * d1 + d1 * d3 + d3 * d3;
    const double h3 = h1 * (d1 * d1 + d3 * d3);
    c = -0.5 + h1 / 3.0 - h2 / 4.0 + h3 / 5.0;
    a = -1.0 + c + d1 * d3 * (1.0 / 3.0 - h1 / 4.0 + h2 / 5.0 - h3 / 6.0);
  } else {
    const double f1 = l2(r1);
    const double f3 = l2(r3);
    a = -1.0 + (r3 * f1 - r1 * f3) / (r1 - r3);
    c = (f1 - f3) / (r1 - r3);
  }
  const SymMat3 z = g * (1.0 / ev.l2);
  return (SymMat3::scalar(a + std::log(ev.l2)) - (a + c) * z + c * square(z)) * 0.5;
}

inline SymMat3 log_spd_half_gram(const SymMat3& g) { return log_spd_half_gram(g, sym_eigenvalues(g)); }

/// S^-1 = exp(-log S) given log S and the eigenvalues of G = S^2; the
/// eigenvalues of -log S are -log(l_i)/2, so no second eigen-solve happens.
inline SymMat3 inv_sqrt_from_half_log(const SymMat3& log_s, const SymEig3& gram_ev) {
  const SymEig3 neg{-0.5 * std::log(gram_ev.l3), -0.5 * std::log(gram_ev.l2), -0.5 * std::log(gram_ev.l1)};
  return exp_sym3(-log_s, neg);
}

/// G^(-1/2) for SPD G. Throws NotPositiveDefinite.
inline SymMat3 inv_sqrt_spd(const SymMat3& g, const SymEig3& ev) {
  return inv_sqrt_from_half_log(log_spd_half_gram(g, ev), ev);
}

inline SymMat3 inv_sqrt_spd(const SymMat3& g) { return inv_sqrt_spd(g, sym_eigenvalues(g)); }

namespace detail {

inline void require_rotation(const Mat3& r) {
  if (!all_finite(r)) throw Error(ErrorCode::NotARotation, "matrix has non-finite entries");
  const double dev = frobenius(transpose(r) * r - Mat3::identity());
  if (!(dev <= kRotationTolerance))
    throw Error(ErrorCode::NotARotation, "R^T R deviates from identity by " + std::to_string(dev));
  if (!(det(r) > 0.0)) throw Error(ErrorCode::NotARotation, "determinant is not positive");
}

// Rotation angle in [0, pi]. atan2 of the sine and cosine parts keeps full
// precision at both ends where acos alone loses half the digits.
inline double rotation_angle(const Mat3& r) noexcept {
  const AntiSymMat3 k = AntiSymMat3::skew_part(r);
  return std::atan2(angle(k), 0.5 * (trace(r) - 1.0));
}

}  // namespace detail

/// Principal logarithm of a rotation, angle in [0, pi]. Throws NotARotation.
inline AntiSymMat3 log_so3(const Mat3& r) {
  detail::require_rotation(r);
  const double theta = detail::rotation_angle(r);
  if (std::numbers::pi - theta >= kNearPiSwitch) return AntiSymMat3::skew_part(r) * (1.0 / sinc_guarded(theta));

  // Near pi the symmetric part is cos(t) I + (1 - cos(t)) v v^T, so any
  // column of it minus cos(t) I is parallel to the axis v.
  const double ct = std::cos(theta);
  const SymMat3 b = SymMat3::sym_part(r) - SymMat3::scalar(ct);
  int j = 0;
  for (int k = 1; k < 3; ++k)
    if (b(k, k) > b(j, j)) j = k;
  Vec3 v{b(0, j), b(1, j), b(2, j)};
  v = v / norm(v);

  // sign from the skew part, which equals sin(t) [v]_x
  double probe = 0.0;
  if (std::abs(v.y) >= kAxisComponentFloor)
    probe = v.y * (r(0, 2) - r(2, 0));
  else if (std::abs(v.x) >= kAxisComponentFloor)
    probe = v.x * (r(2, 1) - r(1, 2));
  else
    probe = v.z * (r(1, 0) - r(0, 1));
  const double eps = probe >= 0.0 ? 1.0 : -1.0;
  return AntiSymMat3::from_axis(v * (eps * theta));
}

/// The logarithm of `r` whose angle lies within pi of the angle of `ref`,
/// with the axis oriented towards `ref`. Lets a sequence of rotations be
/// unwrapped past 2 pi by passing the previous result as `ref`.
/// Throws NotARotation.
inline AntiSymMat3 consistent_log_so3(const Mat3& r, const AntiSymMat3& ref) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const AntiSymMat3 principal = log_so3(r);
  double theta = angle(principal);
  const double theta_ref = angle(ref);
  Vec3 u;
  if (theta > 0.0)
    u = principal.axis() / theta;
  else if (theta_ref > 0.0)
    u = ref.axis() / theta_ref;
  else
    return principal;

  const double theta0 = theta;
  if (dot(u, ref.axis()) < 0.0) {
    u = -u;
    theta = -theta;
  }
  while (theta_ref - theta > std::numbers::pi) theta += two_pi;
  while (theta - theta_ref > std::numbers::pi) theta -= two_pi;
  // untouched: hand back the principal log bit for bit
  if (theta == theta0 && theta0 > 0.0) return principal;
  return AntiSymMat3::from_axis(u * theta);
}

}  // namespace affp

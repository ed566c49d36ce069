#pragma once

// Linear combination in parameter space, pose curves through parameter-space
// knots, and the probe-driven point deformer.

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "affp/error.hpp"
#include "affp/param.hpp"

namespace affp {

enum class BranchMode { Principal, Consistent };

/// phi(sum_i w_i psi(A_i)). Weights are used as given (no normalisation), so
/// any real weights extrapolate. In Consistent mode `refs[i]` is the reference
/// for the rotation log of `transforms[i]`; missing refs default to zero.
/// Throws InvalidArgument on a length mismatch, plus whatever psi/phi throw.
inline HomAffine3 blend(std::span<const HomAffine3> transforms, std::span<const double> weights,
                        BranchMode mode = BranchMode::Principal, std::span<const AffineParam12> refs = {}) {
  if (transforms.size() != weights.size())
    throw Error(ErrorCode::InvalidArgument, "blend: " + std::to_string(transforms.size()) + " transforms but " +
                                                std::to_string(weights.size()) + " weights");
  if (transforms.empty()) throw Error(ErrorCode::InvalidArgument, "blend: no transforms");
  AffineParam12 acc;
  for (std::size_t i = 0; i < transforms.size(); ++i) {
    if (weights[i] == 0.0) continue;
    const AffineParam12 p = (mode == BranchMode::Consistent)
                                ? psi_consistent(transforms[i], i < refs.size() ? refs[i] : AffineParam12{})
                                : psi(transforms[i]);
    acc += weights[i] * p;
  }
  return phi(acc);
}

/// blend(...) applied to u.
inline Vec3 deform_point(const Vec3& u, std::span<const HomAffine3> probes, std::span<const double> weights_at_u,
                         BranchMode mode = BranchMode::Principal, std::span<const AffineParam12> refs = {}) {
  return blend(probes, weights_at_u, mode, refs).apply(u);
}

// ---------------------------------------------------------------------------
// Curves

enum class Curve { Linear, Hermite, BSpline };

namespace detail {

inline void check_knots(std::size_t n_knots, std::span<const double> times) {
  if (n_knots < 2) throw Error(ErrorCode::InvalidArgument, "curve needs at least 2 knots");
  if (times.size() != n_knots)
    throw Error(ErrorCode::InvalidArgument, "curve has " + std::to_string(n_knots) + " knots but " +
                                                std::to_string(times.size()) + " times");
  for (std::size_t j = 1; j < times.size(); ++j)
    if (!(times[j] > times[j - 1])) throw Error(ErrorCode::InvalidArgument, "knot times must increase strictly");
}

inline std::size_t segment_of(std::span<const double> times, double t) {
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t j = static_cast<std::size_t>(it - times.begin());
  return std::clamp<std::size_t>(j == 0 ? 0 : j - 1, 0, times.size() - 2);
}

}  // namespace detail

/// Evaluates a curve through (times[j], knots[j]) at t for any vector-space
/// type P (P + P, double * P).
///
///  - Linear: piecewise linear, passes through every knot.
///  - Hermite: cubic Hermite with Catmull-Rom tangents
///    (p[j+1] - p[j-1]) / (t[j+1] - t[j-1]), one-sided at the ends; passes
///    through every knot.
///  - BSpline: uniform cubic B-spline with the knots as control points and
///    clamped ends, reparametrised linearly onto [times.front(), times.back()].
///    It attains the first and last knot but only approximates interior ones.
///    Degree drops to (#knots - 1) for fewer than 4 knots.
///
/// Throws OutOfRange outside [times.front(), times.back()].
template <class P>
P interpolate(std::span<const P> knots, std::span<const double> times, double t, Curve curve) {
  detail::check_knots(knots.size(), times);
  if (!(t >= times.front() && t <= times.back()))
    throw Error(ErrorCode::OutOfRange, "t = " + std::to_string(t) + " outside [" + std::to_string(times.front()) +
                                           ", " + std::to_string(times.back()) + "]");
  const std::size_t n = knots.size();

  switch (curve) {
    case Curve::Linear: {
      const std::size_t j = detail::segment_of(times, t);
      const double s = (t - times[j]) / (times[j + 1] - times[j]);
      return (1.0 - s) * knots[j] + s * knots[j + 1];
    }
    case Curve::Hermite: {
      const std::size_t j = detail::segment_of(times, t);
      auto tangent = [&](std::size_t k) -> P {
        const std::size_t lo = k == 0 ? 0 : k - 1;
        const std::size_t hi = k + 1 == n ? k : k + 1;
        return (1.0 / (times[hi] - times[lo])) * (knots[hi] + (-1.0) * knots[lo]);
      };
      const double h = times[j + 1] - times[j];
      const double s = (t - times[j]) / h;
      const double s2 = s * s, s3 = s2 * s;
      const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s, h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
      return h00 * knots[j] + (h10 * h) * tangent(j) + h01 * knots[j + 1] + (h11 * h) * tangent(j + 1);
    }
    case Curve::BSpline: {
      const int deg = static_cast<int>(std::min<std::size_t>(3, n - 1));
      const int spans = static_cast<int>(n) - deg;  // number of non-empty knot intervals
      // clamped uniform knot vector: deg+1 zeros, 1..spans-1, deg+1 copies of spans
      auto knot = [&](int i) -> double { return std::clamp(i - deg, 0, spans); };
      const double u = (t - times.front()) / (times.back() - times.front()) * spans;
      int span = std::min(static_cast<int>(u), spans - 1) + deg;  // knot[span] <= u < knot[span+1]
      std::array<P, 4> d{};
      for (int k = 0; k <= deg; ++k) d[k] = knots[span - deg + k];
      // de Boor
      for (int r = 1; r <= deg; ++r)
        for (int k = deg; k >= r; --k) {
          const int i = span - deg + k;
          const double denom = knot(i + deg + 1 - r) - knot(i);
          const double alpha = denom > 0 ? (u - knot(i)) / denom : 0.0;
          d[k] = (1.0 - alpha) * d[k - 1] + alpha * d[k];
        }
      return d[deg];
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown curve");
}

/// Keyframed poses as parameter-space knots with strictly increasing times.
struct PoseTrack {
  std::vector<AffineParam12> knots;
  std::vector<double> times;

  /// Knots from transforms. Consistent mode chains each rotation log to the
  /// previous knot so motions past pi keep turning the same way.
  static PoseTrack from_transforms(std::span<const HomAffine3> poses, std::vector<double> times,
                                   BranchMode mode = BranchMode::Consistent) {
    PoseTrack track;
    track.times = std::move(times);
    AffineParam12 prev;
    for (const HomAffine3& a : poses) {
      prev = (mode == BranchMode::Consistent) ? psi_consistent(a, prev) : psi(a);
      track.knots.push_back(prev);
    }
    detail::check_knots(track.knots.size(), track.times);
    return track;
  }
};

/// phi(curve(t)) with the curve evaluated componentwise in R^12.
/// Throws OutOfRange for t outside the track, InvalidArgument for a malformed track.
inline HomAffine3 interpolate_pose(const PoseTrack& track, double t, Curve curve) {
  return phi(interpolate<AffineParam12>(track.knots, track.times, t, curve));
}

}  // namespace affp

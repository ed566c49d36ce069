#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "affp/blend.hpp"

using namespace affp;

namespace {

constexpr double kPi = std::numbers::pi;

HomAffine3 rotation(Vec3 axis, double theta) {
  return {exp_so3(AntiSymMat3::from_axis(axis * (theta / norm(axis)))), {}};
}

HomAffine3 random_affine(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  HomAffine3 a;
  do {
    for (double& v : a.linear.a) v = u(rng);
  } while (!(det(a.linear) > 1e-2));
  for (int i = 0; i < 3; ++i) a.translation[i] = u(rng);
  return a;
}

double rotation_angle_of(const HomAffine3& a) { return angle(log_so3(a.linear)); }

}  // namespace

TEST(Blend, UnitWeightReproduces) {
  std::mt19937_64 rng(51);
  for (int i = 0; i < 200; ++i) {
    std::vector<HomAffine3> as{random_affine(rng), random_affine(rng), random_affine(rng)};
    for (std::size_t k = 0; k < as.size(); ++k) {
      std::vector<double> w(as.size(), 0.0);
      w[k] = 1.0;
      EXPECT_LE(frobenius_sq_diff(blend(as, w), as[k]), 1e-20);
    }
  }
}

TEST(Blend, CoaxialRotationsAverageAngles) {
  const Vec3 axis{0.2, -1, 0.4};
  const std::vector<HomAffine3> as{rotation(axis, 0.4), rotation(axis, 2.2)};
  const std::vector<double> w{0.5, 0.5};
  EXPECT_LE(frobenius_sq_diff(blend(as, w), rotation(axis, 1.3)), 1e-24);
}

TEST(Blend, LargeRotationsStayRotations) {
  const std::vector<HomAffine3> as{rotation({1, 0.3, 0}, 0.9 * kPi), rotation({0, 0.5, 1}, -0.9 * kPi)};
  const std::vector<double> w{0.5, 0.5};
  const HomAffine3 b = blend(as, w);
  EXPECT_LE(frobenius(transpose(b.linear) * b.linear - Mat3::identity()), 1e-9);
  EXPECT_NEAR(det(b.linear), 1.0, 1e-9);
}

TEST(Blend, ExtrapolationStaysOrientationPreserving) {
  std::mt19937_64 rng(52);
  std::uniform_real_distribution<double> w(-3, 3);
  for (int i = 0; i < 500; ++i) {
    const std::vector<HomAffine3> as{random_affine(rng), random_affine(rng)};
    const std::vector<double> ws{w(rng), w(rng)};
    EXPECT_GT(det(blend(as, ws).linear), 0.0);
  }
}

TEST(Blend, ConsistentModeUsesReferences) {
  // a rotation by 1.9 pi read against a reference near 2 pi keeps its long way round
  const Vec3 axis{0, 0, 1};
  const std::vector<HomAffine3> as{rotation(axis, 1.9 * kPi)};
  const std::vector<AffineParam12> refs{{{}, AntiSymMat3::from_axis(axis * (1.8 * kPi)), {}}};
  const std::vector<double> w{0.5};
  const HomAffine3 principal = blend(as, w, BranchMode::Principal);
  const HomAffine3 consistent = blend(as, w, BranchMode::Consistent, refs);
  EXPECT_NEAR(rotation_angle_of(principal), 0.05 * kPi, 1e-12);
  EXPECT_NEAR(rotation_angle_of(consistent), 0.95 * kPi, 1e-12);
}

TEST(Blend, RejectsLengthMismatch) {
  const std::vector<HomAffine3> as{HomAffine3::identity()};
  const std::vector<double> w{0.5, 0.5};
  try {
    (void)blend(as, w);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
}

TEST(DeformPoint, Examples) {
  std::mt19937_64 rng(53);
  const HomAffine3 a = random_affine(rng);
  const Vec3 u{0.3, -0.2, 1.5};
  const std::vector<HomAffine3> one{a};
  EXPECT_LE(norm(deform_point(u, one, std::vector<double>{1.0}) - a.apply(u)), 1e-12);
  const std::vector<HomAffine3> two{a, random_affine(rng)};
  EXPECT_EQ(deform_point(u, two, std::vector<double>{0.0, 0.0}), u);

  // probes are opposite translations; complementary weights along a line
  const Vec3 t{1, 2, -1};
  const std::vector<HomAffine3> probes{{Mat3::identity(), t}, {Mat3::identity(), -t}};
  for (double s : {0.0, 0.25, 0.5, 1.0}) {
    const Vec3 p = Vec3{s, 0, 0};
    const Vec3 moved = deform_point(p, probes, std::vector<double>{1 - s, s});
    EXPECT_LE(norm(moved - (p + t * (1 - s) - t * s)), 1e-14);
  }
}

TEST(Interpolate, ScalarCurves) {
  const std::vector<double> ts{0, 1, 3, 4};
  const std::vector<double> ks{1, -1, 2, 5};
  for (Curve c : {Curve::Linear, Curve::Hermite})
    for (std::size_t j = 0; j < ts.size(); ++j)
      EXPECT_NEAR(interpolate<double>(ks, ts, ts[j], c), ks[j], 1e-15);
  EXPECT_NEAR(interpolate<double>(ks, ts, 2.0, Curve::Linear), 0.5, 1e-15);
  // clamped B-spline attains the end points
  EXPECT_NEAR(interpolate<double>(ks, ts, 0.0, Curve::BSpline), 1.0, 1e-15);
  EXPECT_NEAR(interpolate<double>(ks, ts, 4.0, Curve::BSpline), 5.0, 1e-15);
  // linear data on uniform knots is reproduced exactly by the interpolating curves
  const std::vector<double> uts{0, 1, 2, 3, 4};
  const std::vector<double> lin{0, 2, 4, 6, 8};
  for (Curve c : {Curve::Linear, Curve::Hermite})
    for (double t : {0.0, 0.3, 1.7, 2.5, 4.0}) EXPECT_NEAR(interpolate<double>(lin, uts, t, c), 2 * t, 1e-13);
  // the clamped spline only approximates, but stays monotone between the ends
  double prev = -1;
  for (int i = 0; i <= 40; ++i) {
    const double v = interpolate<double>(lin, uts, 0.1 * i, Curve::BSpline);
    EXPECT_GE(v, prev);
    EXPECT_LE(v, 8.0 + 1e-13);
    prev = v;
  }
}

TEST(Interpolate, BSplineIsSmoothAndBounded) {
  const std::vector<double> ts{0, 1, 2, 3, 4, 5};
  const std::vector<double> ks{0, 3, -1, 4, 1, 2};
  double prev = interpolate<double>(ks, ts, 0.0, Curve::BSpline);
  for (int i = 1; i <= 500; ++i) {
    const double v = interpolate<double>(ks, ts, 5.0 * i / 500, Curve::BSpline);
    EXPECT_LE(v, 4.0);
    EXPECT_GE(v, -1.0);
    EXPECT_LE(std::abs(v - prev), 0.1);
    prev = v;
  }
}

TEST(Interpolate, OutOfRange) {
  const std::vector<double> ts{0, 1};
  const std::vector<double> ks{0, 1};
  for (Curve c : {Curve::Linear, Curve::Hermite, Curve::BSpline}) {
    try {
      (void)interpolate<double>(ks, ts, 1.5, c);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::OutOfRange);
    }
  }
}

TEST(InterpolatePose, HermitePassesThroughKnots) {
  std::mt19937_64 rng(54);
  const std::vector<HomAffine3> poses{random_affine(rng), random_affine(rng), random_affine(rng),
                                      random_affine(rng)};
  const PoseTrack track = PoseTrack::from_transforms(poses, {0, 0.5, 2, 3}, BranchMode::Principal);
  for (std::size_t j = 0; j < poses.size(); ++j)
    EXPECT_LE(frobenius_sq_diff(interpolate_pose(track, track.times[j], Curve::Hermite), poses[j]), 1e-20);
}

TEST(InterpolatePose, LinearMidpointOfTranslation) {
  const std::vector<HomAffine3> poses{HomAffine3::identity(), {Mat3::identity(), {1, 0, 0}}};
  const PoseTrack track = PoseTrack::from_transforms(poses, {0, 1});
  const HomAffine3 m = interpolate_pose(track, 0.5, Curve::Linear);
  EXPECT_LE(frobenius_sq_diff(m, {Mat3::identity(), {0.5, 0, 0}}), 1e-30);
}

TEST(InterpolatePose, RotationTrackStaysOrthogonal) {
  const std::vector<HomAffine3> poses{rotation({1, 0, 0}, 0.3), rotation({0, 1, 1}, 2.5), rotation({1, 1, 0}, -1),
                                      rotation({0.3, -1, 0.2}, 3.0)};
  const PoseTrack track = PoseTrack::from_transforms(poses, {0, 1, 2, 3});
  for (Curve c : {Curve::Linear, Curve::Hermite, Curve::BSpline})
    for (int i = 0; i < 100; ++i) {
      const HomAffine3 a = interpolate_pose(track, 3.0 * i / 99, c);
      EXPECT_LE(frobenius(transpose(a.linear) * a.linear - Mat3::identity()), 1e-9);
      EXPECT_EQ(a.translation, Vec3{});
    }
}

TEST(PoseTrack, RejectsBadTimes) {
  const std::vector<HomAffine3> poses{HomAffine3::identity(), HomAffine3::identity()};
  EXPECT_THROW((void)PoseTrack::from_transforms(poses, {1, 1}), Error);
  EXPECT_THROW((void)PoseTrack::from_transforms(poses, {0}), Error);
}

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "affp/param.hpp"

using namespace affp;

namespace {

constexpr double kPi = std::numbers::pi;

HomAffine3 random_affine(std::mt19937_64& rng, double det_floor) {
  std::uniform_real_distribution<double> u(-1, 1);
  HomAffine3 a;
  do {
    for (double& v : a.linear.a) v = u(rng);
  } while (!(det(a.linear) > det_floor));
  for (int i = 0; i < 3; ++i) a.translation[i] = u(rng);
  return a;
}

AffineParam12 random_param(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::array<double, 12> v{};
  for (double& x : v) x = u(rng);
  return AffineParam12::from_array(v);
}

}  // namespace

TEST(Phi, Examples) {
  EXPECT_EQ(phi(AffineParam12{}), HomAffine3::identity());
  const HomAffine3 t = phi(AffineParam12{{1, -2, 3}, {}, {}});
  EXPECT_EQ(t.linear, Mat3::identity());
  EXPECT_EQ(t.translation, (Vec3{1, -2, 3}));
  const HomAffine3 s = phi(AffineParam12{{}, {}, SymMat3::scalar(std::log(2.0))});
  EXPECT_LE(frobenius(s.linear - Mat3::diag(2, 2, 2)), 1e-15);
}

TEST(Phi, AlwaysOrientationPreserving) {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 5000; ++i) {
    AffineParam12 p = random_param(rng, 1.0);
    p = p * (10.0 / norm(p) * std::uniform_real_distribution<double>(0, 1)(rng));
    EXPECT_GT(det(phi(p).linear), 0.0);
  }
}

TEST(Psi, Examples) {
  const AffineParam12 z = psi(HomAffine3::identity());
  EXPECT_LE(norm(z), 0.0);
  const AffineParam12 r = psi(HomAffine3{Mat3{{0, -1, 0, 1, 0, 0, 0, 0, 1}}, {}});
  EXPECT_NEAR(r.x.x[0], -kPi / 2, 1e-15);
  EXPECT_NEAR(norm(r - AffineParam12{{}, {{-kPi / 2, 0, 0}}, {}}), 0.0, 1e-15);
}

TEST(Psi, RoundTrip) {
  std::mt19937_64 rng(42);
  double worst = 0;
  for (int i = 0; i < 20000; ++i) {
    const HomAffine3 a = random_affine(rng, 1e-3);
    worst = std::max(worst, frobenius_sq_diff(a, phi(psi(a))));
  }
  EXPECT_LE(worst, 1e-20);
}

TEST(Psi, RoundTripWideDeterminantRange) {
  // det in [1e-3, 1e3]: scale unit-box samples
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> logs(std::log(0.5), std::log(10.0));
  for (int i = 0; i < 5000; ++i) {
    HomAffine3 a = random_affine(rng, 1e-2);
    a.linear = a.linear * std::exp(logs(rng));
    const double d = det(a.linear);
    if (d < 1e-3 || d > 1e3) continue;
    EXPECT_LE(frobenius_sq_diff(a, phi(psi(a))) / frobenius_sq(a.linear), 1e-20);
  }
}

TEST(Psi, InvertsPhiOnPrincipalBranch) {
  std::mt19937_64 rng(44);
  for (int i = 0; i < 5000; ++i) {
    AffineParam12 p = random_param(rng, 1.0);
    if (angle(p.x) >= kPi - 1e-3) continue;
    const AffineParam12 q = psi(phi(p));
    for (int k = 0; k < 12; ++k) EXPECT_NEAR(q.to_array()[k], p.to_array()[k], 1e-9);
  }
}

TEST(Psi, RejectsReflection) {
  try {
    (void)psi(HomAffine3{Mat3::diag(1, 1, -1), {}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotOrientationPreserving);
  }
}

TEST(Psi, IllConditionedFlag) {
  EXPECT_TRUE(ill_conditioned(HomAffine3{Mat3::diag(1, 1, 1e-7), {}}));
  EXPECT_FALSE(ill_conditioned(HomAffine3::identity()));
}

TEST(Psi, WithoutReorthonormalisationStillRoundTrips) {
  std::mt19937_64 rng(45);
  for (int i = 0; i < 2000; ++i) {
    const HomAffine3 a = random_affine(rng, 1e-1);
    EXPECT_LE(frobenius_sq_diff(a, phi(psi(a, PsiOptions{false}))), 1e-18);
  }
}

TEST(PsiConsistent, Examples) {
  std::mt19937_64 rng(46);
  for (int i = 0; i < 200; ++i) {
    const HomAffine3 a = random_affine(rng, 1e-2);
    if (angle(psi(a).x) > kPi - 1e-3) continue;
    EXPECT_EQ(psi_consistent(a, AffineParam12{}), psi(a));
  }
  AffineParam12 ref;
  ref.x = AntiSymMat3::from_axis({0, 2 * kPi, 0});
  const AffineParam12 p = psi_consistent(HomAffine3::identity(), ref);
  EXPECT_NEAR(angle(p.x), 2 * kPi, 1e-12);
}

TEST(PsiConsistent, TwistIsStrictlyIncreasing) {
  AffineParam12 prev;
  double last = -1;
  for (int k = 0; k <= 125; ++k) {
    const HomAffine3 a{exp_so3(AntiSymMat3::from_axis({0.1 * k, 0, 0})) * Mat3::diag(1.5, 1, 0.7), {}};
    prev = psi_consistent(a, prev);
    EXPECT_GT(angle(prev.x), last);
    last = angle(prev.x);
  }
  EXPECT_NEAR(last, 12.5, 1e-9);
}

TEST(Polar, Examples) {
  const Mat3 r = exp_so3(AntiSymMat3{{0.3, -1.0, 2.0}});
  const PolarParts pr = polar_decompose(r);
  EXPECT_LE(frobenius(pr.rotation - r), 1e-14);
  EXPECT_LE(frobenius(pr.stretch - SymMat3::identity()), 1e-14);
  const PolarParts pd = polar_decompose(Mat3::diag(2, 3, 4));
  EXPECT_LE(frobenius(pd.rotation - Mat3::identity()), 1e-14);
  EXPECT_LE(frobenius(pd.stretch - SymMat3::diag(2, 3, 4)), 1e-14);
}

TEST(Polar, RandomReconstruction) {
  std::mt19937_64 rng(47);
  for (int i = 0; i < 5000; ++i) {
    const Mat3 a = random_affine(rng, 1e-3).linear;
    const PolarParts p = polar_decompose(a);
    EXPECT_LE(frobenius(p.rotation * p.stretch - a), 1e-9);
    EXPECT_LE(frobenius(transpose(p.rotation) * p.rotation - Mat3::identity()), 1e-10);
    EXPECT_GT(sym_eigenvalues(p.stretch).l3, 0.0);
  }
}

TEST(Classes, ProjectionExamples) {
  std::mt19937_64 rng(48);
  for (int i = 0; i < 100; ++i) {
    const AffineParam12 p = random_param(rng, 2.0);
    EXPECT_EQ(project_to_class(p, TransformClass::SE3).y, SymMat3{});
    EXPECT_EQ(project_to_class(p, TransformClass::GLplus3).l, Vec3{});
    for (TransformClass c : kAllClasses) {
      const AffineParam12 q = project_to_class(p, c);
      EXPECT_EQ(project_to_class(q, c), q);
      EXPECT_TRUE(is_in_class(q, c, 1e-15));
    }
  }
  AffineParam12 p;
  p.y = SymMat3::diag(1, 2, 3);
  EXPECT_EQ(project_to_class(p, TransformClass::Simplus3).y, SymMat3::scalar(2));
}

TEST(Classes, SubspaceContainment) {
  AffineParam12 p;
  p.x = AntiSymMat3{{0.1, 0.2, 0.3}};
  EXPECT_TRUE(is_in_class(p, TransformClass::SO3, 0));
  EXPECT_TRUE(is_in_class(p, TransformClass::SE3, 0));
  EXPECT_FALSE(is_in_class(p, TransformClass::R3, 1e-3));
  EXPECT_TRUE(contains(TransformClass::SE3, TransformClass::SO3));
  EXPECT_TRUE(contains(TransformClass::Affplus3, TransformClass::Symplus3));
  EXPECT_TRUE(contains(TransformClass::Simplus3, TransformClass::Rplus));
  EXPECT_TRUE(contains(TransformClass::COplus3, TransformClass::SO3));
  EXPECT_FALSE(contains(TransformClass::SO3, TransformClass::SE3));
  EXPECT_FALSE(contains(TransformClass::Symplus3, TransformClass::SO3));
  EXPECT_FALSE(contains(TransformClass::GLplus3, TransformClass::R3));
  for (TransformClass a : kAllClasses) {
    EXPECT_TRUE(contains(a, a));
    EXPECT_TRUE(contains(TransformClass::Affplus3, a));
  }
}

TEST(Classes, PhiMapsSubspaceIntoClass) {
  std::mt19937_64 rng(49);
  for (int i = 0; i < 200; ++i) {
    const AffineParam12 p = random_param(rng, 2.0);
    for (TransformClass c : kAllClasses) {
      const HomAffine3 a = phi(project_to_class(p, c));
      EXPECT_TRUE(is_member(a, c, 1e-10)) << to_string(c);
    }
    const HomAffine3 so = phi(project_to_class(p, TransformClass::SO3));
    EXPECT_LE(frobenius(transpose(so.linear) * so.linear - Mat3::identity()), 1e-10);
    EXPECT_EQ(so.translation, Vec3{});
  }
}

TEST(Classes, NamesRoundTrip) {
  for (TransformClass c : kAllClasses) EXPECT_EQ(parse_transform_class(to_string(c)), c);
  EXPECT_FALSE(parse_transform_class("SO4").has_value());
}

TEST(Serialisation, ParamOrder) {
  const std::array<double, 12> v{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  const AffineParam12 p = AffineParam12::from_array(v);
  EXPECT_EQ(p.l, (Vec3{1, 2, 3}));
  EXPECT_EQ(p.x.to_mat()(0, 1), 4);
  EXPECT_EQ(p.x.to_mat()(0, 2), 5);
  EXPECT_EQ(p.x.to_mat()(1, 2), 6);
  EXPECT_EQ(p.y(1, 1), 10);
  EXPECT_EQ(p.to_array(), v);
  const HomAffine3 a = HomAffine3::from_rows(v);
  EXPECT_EQ(a.translation, (Vec3{4, 8, 12}));
  EXPECT_EQ(a.to_rows(), v);
}

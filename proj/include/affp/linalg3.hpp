#pragma once

// Fixed-size 3-vector / 3x3 kernels and the analytic eigenvalue solver for
// symmetric 3x3 matrices. Everything here is double precision, value typed and
// free of shared state.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "affp/error.hpp"

namespace affp {

struct Vec3 {
  double x{}, y{}, z{};

  constexpr double operator[](int i) const noexcept { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr double& operator[](int i) noexcept { return i == 0 ? x : (i == 1 ? y : z); }

  constexpr Vec3 operator+(const Vec3& b) const noexcept { return {x + b.x, y + b.y, z + b.z}; }
  constexpr Vec3 operator-(const Vec3& b) const noexcept { return {x - b.x, y - b.y, z - b.z}; }
  constexpr Vec3 operator-() const noexcept { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const noexcept { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator/(double s) const noexcept { return {x / s, y / s, z / s}; }
  constexpr Vec3& operator+=(const Vec3& b) noexcept {
    x += b.x;
    y += b.y;
    z += b.z;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& b) noexcept {
    x -= b.x;
    y -= b.y;
    z -= b.z;
    return *this;
  }
  constexpr bool operator==(const Vec3&) const = default;
};

constexpr Vec3 operator*(double s, const Vec3& v) noexcept { return v * s; }

constexpr double dot(const Vec3& a, const Vec3& b) noexcept { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) noexcept {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& a) noexcept { return std::sqrt(dot(a, a)); }

/// Row-major 3x3 matrix; element (i, j) is a[3 * i + j].
struct Mat3 {
  std::array<double, 9> a{};

  static constexpr Mat3 identity() noexcept { return {{1, 0, 0, 0, 1, 0, 0, 0, 1}}; }
  static constexpr Mat3 zero() noexcept { return {}; }
  static constexpr Mat3 diag(double d0, double d1, double d2) noexcept { return {{d0, 0, 0, 0, d1, 0, 0, 0, d2}}; }
  static constexpr Mat3 from_columns(const Vec3& c0, const Vec3& c1, const Vec3& c2) noexcept {
    return {{c0.x, c1.x, c2.x, c0.y, c1.y, c2.y, c0.z, c1.z, c2.z}};
  }

  constexpr double operator()(int i, int j) const noexcept { return a[3 * i + j]; }
  constexpr double& operator()(int i, int j) noexcept { return a[3 * i + j]; }

  constexpr Vec3 column(int j) const noexcept { return {a[j], a[3 + j], a[6 + j]}; }
  constexpr Vec3 row(int i) const noexcept { return {a[3 * i], a[3 * i + 1], a[3 * i + 2]}; }

  constexpr Mat3 operator+(const Mat3& b) const noexcept {
    Mat3 r;
    for (int k = 0; k < 9; ++k) r.a[k] = a[k] + b.a[k];
    return r;
  }
  constexpr Mat3 operator-(const Mat3& b) const noexcept {
    Mat3 r;
    for (int k = 0; k < 9; ++k) r.a[k] = a[k] - b.a[k];
    return r;
  }
  constexpr Mat3 operator-() const noexcept {
    Mat3 r;
    for (int k = 0; k < 9; ++k) r.a[k] = -a[k];
    return r;
  }
  constexpr Mat3 operator*(double s) const noexcept {
    Mat3 r;
    for (int k = 0; k < 9; ++k) r.a[k] = a[k] * s;
    return r;
  }
  constexpr Mat3 operator*(const Mat3& b) const noexcept {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        r(i, j) = (*this)(i, 0) * b(0, j) + (*this)(i, 1) * b(1, j) + (*this)(i, 2) * b(2, j);
    return r;
  }
  constexpr Vec3 operator*(const Vec3& v) const noexcept {
    return {a[0] * v.x + a[1] * v.y + a[2] * v.z, a[3] * v.x + a[4] * v.y + a[5] * v.z,
            a[6] * v.x + a[7] * v.y + a[8] * v.z};
  }
  constexpr bool operator==(const Mat3&) const = default;
};

constexpr Mat3 operator*(double s, const Mat3& m) noexcept { return m * s; }

constexpr Mat3 transpose(const Mat3& m) noexcept {
  return {{m(0, 0), m(1, 0), m(2, 0), m(0, 1), m(1, 1), m(2, 1), m(0, 2), m(1, 2), m(2, 2)}};
}

constexpr double trace(const Mat3& m) noexcept { return m(0, 0) + m(1, 1) + m(2, 2); }

constexpr double det(const Mat3& m) noexcept {
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
         m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

/// Throws ErrorCode::SingularMatrix when det(m) == 0.
inline Mat3 inverse(const Mat3& m) {
  const double d = det(m);
  if (d == 0.0 || !std::isfinite(d)) throw Error(ErrorCode::SingularMatrix, "3x3 matrix has zero determinant");
  const double s = 1.0 / d;
  Mat3 r;
  r(0, 0) = (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) * s;
  r(0, 1) = (m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2)) * s;
  r(0, 2) = (m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1)) * s;
  r(1, 0) = (m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2)) * s;
  r(1, 1) = (m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0)) * s;
  r(1, 2) = (m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2)) * s;
  r(2, 0) = (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0)) * s;
  r(2, 1) = (m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1)) * s;
  r(2, 2) = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)) * s;
  return r;
}

constexpr double frobenius_sq(const Mat3& m) noexcept {
  double s = 0.0;
  for (double v : m.a) s += v * v;
  return s;
}

inline double frobenius(const Mat3& m) noexcept { return std::sqrt(frobenius_sq(m)); }

inline bool all_finite(const Mat3& m) noexcept {
  return std::all_of(m.a.begin(), m.a.end(), [](double v) { return std::isfinite(v); });
}

/// Symmetric 3x3 matrix stored as (y7, y8, y9, y10, y11, y12), i.e. the upper
/// triangle [[y7,y8,y9],[y8,y10,y11],[y9,y11,y12]].
struct SymMat3 {
  std::array<double, 6> y{};

  static constexpr SymMat3 identity() noexcept { return {{1, 0, 0, 1, 0, 1}}; }
  static constexpr SymMat3 zero() noexcept { return {}; }
  static constexpr SymMat3 diag(double d0, double d1, double d2) noexcept { return {{d0, 0, 0, d1, 0, d2}}; }
  static constexpr SymMat3 scalar(double c) noexcept { return diag(c, c, c); }

  /// (M + M^T) / 2
  static constexpr SymMat3 sym_part(const Mat3& m) noexcept {
    return {{m(0, 0), 0.5 * (m(0, 1) + m(1, 0)), 0.5 * (m(0, 2) + m(2, 0)), m(1, 1), 0.5 * (m(1, 2) + m(2, 1)),
             m(2, 2)}};
  }

  static constexpr int index(int i, int j) noexcept {
    if (i > j) std::swap(i, j);
    // (0,0)=0 (0,1)=1 (0,2)=2 (1,1)=3 (1,2)=4 (2,2)=5
    return i == 0 ? j : (i == 1 ? 2 + j : 5);
  }

  constexpr double operator()(int i, int j) const noexcept { return y[index(i, j)]; }
  constexpr double& operator()(int i, int j) noexcept { return y[index(i, j)]; }

  constexpr Mat3 to_mat() const noexcept {
    return {{y[0], y[1], y[2], y[1], y[3], y[4], y[2], y[4], y[5]}};
  }

  constexpr SymMat3 operator+(const SymMat3& b) const noexcept {
    SymMat3 r;
    for (int k = 0; k < 6; ++k) r.y[k] = y[k] + b.y[k];
    return r;
  }
  constexpr SymMat3 operator-(const SymMat3& b) const noexcept {
    SymMat3 r;
    for (int k = 0; k < 6; ++k) r.y[k] = y[k] - b.y[k];
    return r;
  }
  constexpr SymMat3 operator-() const noexcept {
    SymMat3 r;
    for (int k = 0; k < 6; ++k) r.y[k] = -y[k];
    return r;
  }
  constexpr SymMat3 operator*(double s) const noexcept {
    SymMat3 r;
    for (int k = 0; k < 6; ++k) r.y[k] = y[k] * s;
    return r;
  }
  constexpr bool operator==(const SymMat3&) const = default;
};

constexpr SymMat3 operator*(double s, const SymMat3& m) noexcept { return m * s; }

constexpr double trace(const SymMat3& m) noexcept { return m.y[0] + m.y[3] + m.y[5]; }

constexpr double det(const SymMat3& m) noexcept {
  const double a = m.y[0], b = m.y[1], c = m.y[2], d = m.y[3], e = m.y[4], f = m.y[5];
  return a * (d * f - e * e) - b * (b * f - e * c) + c * (b * e - d * c);
}

constexpr double frobenius_sq(const SymMat3& m) noexcept {
  return m.y[0] * m.y[0] + m.y[3] * m.y[3] + m.y[5] * m.y[5] +
         2.0 * (m.y[1] * m.y[1] + m.y[2] * m.y[2] + m.y[4] * m.y[4]);
}

inline double frobenius(const SymMat3& m) noexcept { return std::sqrt(frobenius_sq(m)); }

/// M*M for symmetric M; the square is symmetric so only six entries are formed.
constexpr SymMat3 square(const SymMat3& m) noexcept {
  SymMat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) r(i, j) = m(i, 0) * m(0, j) + m(i, 1) * m(1, j) + m(i, 2) * m(2, j);
  return r;
}

/// A^T A.
constexpr SymMat3 gram(const Mat3& m) noexcept {
  SymMat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) r(i, j) = m(0, i) * m(0, j) + m(1, i) * m(1, j) + m(2, i) * m(2, j);
  return r;
}

constexpr Mat3 operator*(const Mat3& a, const SymMat3& b) noexcept { return a * b.to_mat(); }
constexpr Mat3 operator*(const SymMat3& a, const Mat3& b) noexcept { return a.to_mat() * b; }
constexpr Vec3 operator*(const SymMat3& a, const Vec3& v) noexcept { return a.to_mat() * v; }

/// Antisymmetric 3x3 matrix stored as (x4, x5, x6) = entries (0,1), (0,2), (1,2):
/// [[0,x4,x5],[-x4,0,x6],[-x5,-x6,0]].
struct AntiSymMat3 {
  std::array<double, 3> x{};

  static constexpr AntiSymMat3 zero() noexcept { return {}; }

  /// The generator [v]_x with [v]_x w = v cross w.
  static constexpr AntiSymMat3 from_axis(const Vec3& v) noexcept { return {{-v.z, v.y, -v.x}}; }

  /// (M - M^T) / 2
  static constexpr AntiSymMat3 skew_part(const Mat3& m) noexcept {
    return {{0.5 * (m(0, 1) - m(1, 0)), 0.5 * (m(0, 2) - m(2, 0)), 0.5 * (m(1, 2) - m(2, 1))}};
  }

  /// Inverse of from_axis.
  constexpr Vec3 axis() const noexcept { return {-x[2], x[1], -x[0]}; }

  constexpr Mat3 to_mat() const noexcept { return {{0, x[0], x[1], -x[0], 0, x[2], -x[1], -x[2], 0}}; }

  constexpr AntiSymMat3 operator+(const AntiSymMat3& b) const noexcept {
    return {{x[0] + b.x[0], x[1] + b.x[1], x[2] + b.x[2]}};
  }
  constexpr AntiSymMat3 operator-(const AntiSymMat3& b) const noexcept {
    return {{x[0] - b.x[0], x[1] - b.x[1], x[2] - b.x[2]}};
  }
  constexpr AntiSymMat3 operator-() const noexcept { return {{-x[0], -x[1], -x[2]}}; }
  constexpr AntiSymMat3 operator*(double s) const noexcept { return {{x[0] * s, x[1] * s, x[2] * s}}; }
  constexpr bool operator==(const AntiSymMat3&) const = default;
};

constexpr AntiSymMat3 operator*(double s, const AntiSymMat3& m) noexcept { return m * s; }

/// Rotation angle encoded by an so(3) element: sqrt(tr(X^T X) / 2).
inline double angle(const AntiSymMat3& m) noexcept {
  return std::sqrt(m.x[0] * m.x[0] + m.x[1] * m.x[1] + m.x[2] * m.x[2]);
}

/// Eigenvalues of a symmetric 3x3 matrix, l1 >= l2 >= l3.
struct SymEig3 {
  double l1{}, l2{}, l3{};
};

/// Real roots of det(xI - Y) by the trigonometric solution of the depressed
/// cubic. Diagonal input is returned exactly (sorted).
inline SymEig3 sym_eigenvalues(const SymMat3& m) noexcept {
  const double off = m.y[1] * m.y[1] + m.y[2] * m.y[2] + m.y[4] * m.y[4];
  if (off == 0.0) {
    std::array<double, 3> d{m.y[0], m.y[3], m.y[5]};
    std::sort(d.begin(), d.end(), std::greater<>());
    return {d[0], d[1], d[2]};
  }
  const double mean = trace(m) / 3.0;
  const SymMat3 k = m - SymMat3::scalar(mean);
  const double p = std::sqrt((k.y[0] * k.y[0] + k.y[3] * k.y[3] + k.y[5] * k.y[5] + 2.0 * off) / 6.0);
  const double r = std::clamp(det(k * (1.0 / p)) / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  double l1 = mean + 2.0 * p * std::cos(phi);
  double l3 = mean + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
  double l2 = 3.0 * mean - l1 - l3;
  // roundoff can swap neighbours at near-ties
  if (l2 > l1) std::swap(l1, l2);
  if (l3 > l2) std::swap(l2, l3);
  if (l2 > l1) std::swap(l1, l2);

  // acos loses digits as r -> +-1, i.e. when two roots are close relative to
  // the third. Recompute that pair from the 2x2 block orthogonal to the
  // isolated root's eigenvector.
  const bool top_isolated = l1 - l2 >= l2 - l3;
  const double iso = top_isolated ? l1 : l3;
  const Vec3 r0{m.y[0] - iso, m.y[1], m.y[2]};
  const Vec3 r1{m.y[1], m.y[3] - iso, m.y[4]};
  const Vec3 r2{m.y[2], m.y[4], m.y[5] - iso};
  Vec3 v = cross(r0, r1);
  double vv = dot(v, v);
  for (const Vec3& c : {cross(r0, r2), cross(r1, r2)}) {
    const double cc = dot(c, c);
    if (cc > vv) v = c, vv = cc;
  }
  if (!(vv > 0.0)) return {l1, l2, l3};
  v = v / std::sqrt(vv);
  // any unit vector orthogonal to v, then the third by cross product
  Vec3 u = std::abs(v[0]) <= std::abs(v[1]) && std::abs(v[0]) <= std::abs(v[2]) ? Vec3{0, v[2], -v[1]}
           : std::abs(v[1]) <= std::abs(v[2])                                  ? Vec3{v[2], 0, -v[0]}
                                                                                : Vec3{v[1], -v[0], 0};
  u = u / norm(u);
  const Vec3 w = cross(v, u);
  auto apply = [&](const Vec3& x) {
    return Vec3{m.y[0] * x[0] + m.y[1] * x[1] + m.y[2] * x[2], m.y[1] * x[0] + m.y[3] * x[1] + m.y[4] * x[2],
                m.y[2] * x[0] + m.y[4] * x[1] + m.y[5] * x[2]};
  };
  const Vec3 mu = apply(u);
  const double a = dot(u, mu), b = dot(w, mu), c = dot(w, apply(w));
  const double h = std::hypot(0.5 * (a - c), b);
  const double hi = 0.5 * (a + c) + h, lo = 0.5 * (a + c) - h;
  if (top_isolated) {
    l2 = std::min(hi, l1);
    l3 = lo;
  } else {
    l1 = hi;
    l2 = std::max(lo, l3);
  }
  return {l1, l2, l3};
}

}  // namespace affp

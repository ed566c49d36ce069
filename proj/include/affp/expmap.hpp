#pragma once

// Closed-form exponentials: Rodrigues' formula on so(3) and the shifted
// Cayley-Hamilton remainder formula on sym(3).

#include <cmath>

#include "affp/error.hpp"
#include "affp/linalg3.hpp"

namespace affp {

inline constexpr double kSincSwitch = 1e-4;
inline constexpr double kE2SeriesSwitch = 0.1;
inline constexpr double kExpGapSwitch = 1e-4;

/// sin(t)/t, replaced by 1 - t^2/6 when |t| < kSincSwitch.
inline double sinc_guarded(double t) noexcept {
  if (std::abs(t) < kSincSwitch) return 1.0 - t * t / 6.0;
  return std::sin(t) / t;
}

namespace detail {

// sum_{k>=0} x^k / (k+2)!, truncated where the next term drops below 1e-19 for |x| < 0.1.
inline double e2_series(double x) noexcept {
  constexpr double c[] = {1.0 / 2,       1.0 / 6,        1.0 / 24,        1.0 / 120,        1.0 / 720,
                          1.0 / 5040,    1.0 / 40320,    1.0 / 362880,    1.0 / 3628800,    1.0 / 39916800,
                          1.0 / 479001600};
  double r = c[10];
  for (int k = 9; k >= 0; --k) r = r * x + c[k];
  return r;
}

}  // namespace detail

/// e2(x) = (exp(x) - 1 - x) / x^2, with e2(0) = 1/2.
inline double e2(double x) noexcept {
  if (std::abs(x) < kE2SeriesSwitch) return detail::e2_series(x);
  return (std::expm1(x) - x) / (x * x);
}

/// Rodrigues: I + sinc(t) X + (1/2) sinc(t/2)^2 X^2 with t = sqrt(tr(X^T X)/2).
inline Mat3 exp_so3(const AntiSymMat3& x) noexcept {
  const double t = angle(x);
  const Mat3 xm = x.to_mat();
  const double s = sinc_guarded(t);
  const double h = sinc_guarded(0.5 * t);
  return Mat3::identity() + s * xm + (0.5 * h * h) * (xm * xm);
}

/// exp(Y) for symmetric Y given its (sorted) eigenvalues. Shifting by the
/// middle eigenvalue keeps every divided difference bounded as eigenvalues
/// collide; below kExpGapSwitch the coefficients come from their Taylor forms.
/// Throws Overflow when the result is not representable.
inline SymMat3 exp_sym3(const SymMat3& ym, const SymEig3& ev) {
  const double l1 = ev.l1 - ev.l2;  // >= 0
  const double l3 = ev.l3 - ev.l2;  // <= 0
  double b = 0.0;
  double c = 0.0;
  if (l1 - l3 < kExpGapSwitch) {
    const double s1 = l1 + l3;
    const double p = l1 * l3;
    const double h2 = l1 * l1 + p + l3 * l3;
    const double h3 = s1 * (l1 * l1 + l3 * l3);
    b = 1.0 - p * (1.0 / 6.0 + s1 / 24.0 + h2 / 120.0);
    c = 0.5 + s1 / 6.0 + h2 / 24.0 + h3 / 120.0;
  } else {
    const double e1 = e2(l1);
    const double e3 = e2(l3);
    b = 1.0 - l1 * l3 * (e1 - e3) / (l1 - l3);
    c = 0.5 + (l1 * (2.0 * e1 - 1.0) - l3 * (2.0 * e3 - 1.0)) / (2.0 * (l1 - l3));
  }
  const SymMat3 z = ym - SymMat3::scalar(ev.l2);
  const SymMat3 r = (SymMat3::identity() + b * z + c * square(z)) * std::exp(ev.l2);
  for (double v : r.y)
    if (!std::isfinite(v)) throw Error(ErrorCode::Overflow, "exp of symmetric matrix is not representable");
  return r;
}

inline SymMat3 exp_sym3(const SymMat3& ym) { return exp_sym3(ym, sym_eigenvalues(ym)); }

/// Coefficients of the remainder r(x) = a + b x + c x^2 with f(Y) = r(Y).
struct RemainderCoeffs {
  double a{}, b{}, c{};

  [[nodiscard]] SymMat3 apply(const SymMat3& ym) const noexcept {
    return SymMat3::scalar(a) + b * ym + c * square(ym);
  }
};

/// Solves the Vandermonde system for pairwise distinct eigenvalues, given
/// f evaluated at each of them. Throws DegenerateSpectrum when two coincide.
inline RemainderCoeffs vandermonde_coeffs(double f1, double f2, double f3, const SymEig3& ev) {
  const double l1 = ev.l1, l2 = ev.l2, l3 = ev.l3;
  if (l1 == l2 || l2 == l3 || l1 == l3)
    throw Error(ErrorCode::DegenerateSpectrum, "Vandermonde coefficients need pairwise distinct eigenvalues");
  const double s = f1 / ((l1 - l2) * (l1 - l3));
  const double t = f2 / ((l2 - l3) * (l2 - l1));
  const double u = f3 / ((l3 - l1) * (l3 - l2));
  return {s * l2 * l3 + t * l3 * l1 + u * l1 * l2, -s * (l2 + l3) - t * (l3 + l1) - u * (l1 + l2), s + t + u};
}

template <class F>
RemainderCoeffs vandermonde_coeffs(F&& f, const SymEig3& ev) {
  return vandermonde_coeffs(f(ev.l1), f(ev.l2), f(ev.l3), ev);
}

}  // namespace affp

#pragma once

// Slow reference implementations used by tests and benchmarks. Nothing here
// calls into the closed-form code paths.

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "affp/error.hpp"
#include "affp/linalg3.hpp"

namespace affp::oracle {

/// exp(A) = sum A^i / i! by scaling to norm <= 1/2, summing until the terms
/// stop contributing, then squaring back.
inline Mat3 exp_series(const Mat3& a) {
  const double nrm = frobenius(a);
  int k = 0;
  if (nrm > 0.5) k = static_cast<int>(std::ceil(std::log2(nrm / 0.5)));
  const Mat3 b = a * std::ldexp(1.0, -k);

  Mat3 sum = Mat3::identity();
  Mat3 term = Mat3::identity();
  for (int i = 1; i < 60; ++i) {
    term = term * b * (1.0 / i);
    const Mat3 next = sum + term;
    if (next == sum) break;
    sum = next;
  }
  for (int i = 0; i < k; ++i) sum = sum * sum;
  return sum;
}

struct EigenSystem {
  std::array<double, 3> values{};  // descending
  Mat3 vectors;                    // column i pairs with values[i]
};

/// Cyclic Jacobi rotations until the off-diagonal mass is negligible.
inline EigenSystem jacobi_eig(const SymMat3& y) {
  double m[3][3];
  double v[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i][j] = y(i, j);

  const double scale = std::max(frobenius(y), 1e-300);
  for (int sweep = 0; sweep < 64; ++sweep) {
    const double off = std::sqrt(2.0 * (m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2]));
    if (off <= 1e-15 * scale) break;
    for (int p = 0; p < 2; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        if (m[p][q] == 0.0) continue;
        const double theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < 3; ++k) {
          const double mkp = m[k][p], mkq = m[k][q];
          m[k][p] = c * mkp - s * mkq;
          m[k][q] = s * mkp + c * mkq;
        }
        for (int k = 0; k < 3; ++k) {
          const double mpk = m[p][k], mqk = m[q][k];
          m[p][k] = c * mpk - s * mqk;
          m[q][k] = s * mpk + c * mqk;
        }
        for (int k = 0; k < 3; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
        m[p][q] = m[q][p] = 0.0;
      }
    }
  }

  std::array<int, 3> order{0, 1, 2};
  std::sort(order.begin(), order.end(), [&](int a, int b) { return m[a][a] > m[b][b]; });
  EigenSystem out;
  for (int i = 0; i < 3; ++i) {
    out.values[i] = m[order[i]][order[i]];
    for (int k = 0; k < 3; ++k) out.vectors(k, i) = v[k][order[i]];
  }
  return out;
}

enum class MatFun { Exp, Log, Sqrt, InvSqrt };

/// P diag(f(d_i)) P^T from the Jacobi eigensystem.
/// Throws NotPositiveDefinite for Log/Sqrt/InvSqrt of a non-SPD input.
inline SymMat3 matfun_diag(const SymMat3& y, MatFun f) {
  const EigenSystem es = jacobi_eig(y);
  std::array<double, 3> fd{};
  for (int i = 0; i < 3; ++i) {
    const double d = es.values[i];
    if (f != MatFun::Exp && !(d > 0.0))
      throw Error(ErrorCode::NotPositiveDefinite, "matrix function needs a positive spectrum");
    switch (f) {
      case MatFun::Exp: fd[i] = std::exp(d); break;
      case MatFun::Log: fd[i] = std::log(d); break;
      case MatFun::Sqrt: fd[i] = std::sqrt(d); break;
      case MatFun::InvSqrt: fd[i] = 1.0 / std::sqrt(d); break;
    }
  }
  SymMat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += es.vectors(i, k) * fd[k] * es.vectors(j, k);
      r(i, j) = s;
    }
  return r;
}

}  // namespace affp::oracle

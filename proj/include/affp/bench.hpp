#pragma once

// Random-matrix protocol, error statistics and timing of the closed forms
// against the diagonalisation oracle. Generator: std::mt19937_64.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "affp/error.hpp"
#include "affp/expmap.hpp"
#include "affp/logmap.hpp"
#include "affp/oracle.hpp"
#include "affp/param.hpp"

namespace affp::bench {

inline constexpr const char* kGeneratorName = "mt19937_64";

/// Affine maps with i.i.d. uniform [-1,1] entries (linear part and
/// translation), rejection-resampled until det(linear) > det_floor.
class AffineSampler {
 public:
  AffineSampler(double det_floor, std::uint64_t seed) : floor_(det_floor), rng_(seed) {
    if (!(det_floor > 0.0)) throw Error(ErrorCode::InvalidArgument, "det floor must be positive");
  }

  HomAffine3 operator()() {
    for (;;) {
      HomAffine3 a;
      for (double& v : a.linear.a) v = unit_(rng_);
      for (int i = 0; i < 3; ++i) a.translation[i] = unit_(rng_);
      ++drawn_;
      if (det(a.linear) > floor_) {
        ++accepted_;
        return a;
      }
    }
  }

  [[nodiscard]] double acceptance_rate() const noexcept {
    return drawn_ == 0 ? 0.0 : static_cast<double>(accepted_) / static_cast<double>(drawn_);
  }

 private:
  double floor_;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> unit_{-1.0, 1.0};
  std::uint64_t drawn_ = 0;
  std::uint64_t accepted_ = 0;
};

/// Symmetric matrices spread over the Frobenius ball of the given radius:
/// Gaussian direction, radius drawn so the density is uniform in R^6.
class SymSampler {
 public:
  SymSampler(double radius, std::uint64_t seed) : radius_(radius), rng_(seed) {}

  SymMat3 operator()() {
    SymMat3 y;
    double f = 0.0;
    while (f == 0.0) {
      for (double& v : y.y) v = gauss_(rng_);
      f = frobenius(y);
    }
    const double r = radius_ * std::pow(unit_(rng_), 1.0 / 6.0);
    return y * (r / f);
  }

 private:
  double radius_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> gauss_{0.0, 1.0};
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

/// One CSV row. NaN marks a column that does not apply.
struct BenchRow {
  std::string name;
  std::size_t n = 0;
  double max_sq_frob_error = std::numeric_limits<double>::quiet_NaN();
  double mean_ns_per_call = std::numeric_limits<double>::quiet_NaN();
  double speed_ratio = std::numeric_limits<double>::quiet_NaN();
};

struct BenchReport {
  std::uint64_t seed = 0;
  double acceptance_rate = std::numeric_limits<double>::quiet_NaN();
  std::vector<BenchRow> rows;
};

/// max |A - phi(psi(A))|_F^2 over n samples, on the full 3x4 block.
inline BenchRow roundtrip_error_stats(std::size_t n, double det_floor, std::uint64_t seed,
                                      double* acceptance_rate = nullptr) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "need at least one sample");
  AffineSampler draw(det_floor, seed);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const HomAffine3 a = draw();
    worst = std::max(worst, frobenius_sq_diff(a, phi(psi(a))));
  }
  if (acceptance_rate) *acceptance_rate = draw.acceptance_rate();
  return {"roundtrip_phi_psi", n, worst, std::numeric_limits<double>::quiet_NaN(),
          std::numeric_limits<double>::quiet_NaN()};
}

/// max |Y - log(exp(Y))|_F^2 and max |exp_sym3(Y) - oracle exp(Y)|_F^2.
struct SymRoundTrip {
  double log_exp_sq = 0.0;
  double exp_vs_oracle_sq = 0.0;
  double exp_vs_oracle_rel = 0.0;  // |.|_F / |oracle|_F
};

inline SymRoundTrip sym_roundtrip_stats(std::size_t n, double radius, std::uint64_t seed) {
  SymSampler draw(radius, seed);
  SymRoundTrip s;
  for (std::size_t i = 0; i < n; ++i) {
    const SymMat3 y = draw();
    const SymMat3 e = exp_sym3(y);
    // log S = 2 * (half log of S); squaring S first would double cond
    const SymMat3 back = log_spd_half_gram(e) * 2.0;
    s.log_exp_sq = std::max(s.log_exp_sq, frobenius_sq(y - back));
    const SymMat3 ref = oracle::matfun_diag(y, oracle::MatFun::Exp);
    const double d = frobenius_sq(e - ref);
    s.exp_vs_oracle_sq = std::max(s.exp_vs_oracle_sq, d);
    s.exp_vs_oracle_rel = std::max(s.exp_vs_oracle_rel, std::sqrt(d) / frobenius(ref));
  }
  return s;
}

namespace detail {

// Best-of-`repeats` mean nanoseconds per call of f over the inputs.
template <class In, class F>
double time_per_call(const std::vector<In>& inputs, F&& f, int repeats, double& sink) {
  double best = std::numeric_limits<double>::infinity();
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    double acc = 0.0;
    for (const In& x : inputs) acc += f(x);
    const auto t1 = std::chrono::steady_clock::now();
    sink += acc;
    const double ns = std::chrono::duration<double, std::nano>(t1 - t0).count();
    best = std::min(best, ns / static_cast<double>(inputs.size()));
  }
  return best;
}

}  // namespace detail

/// Times exp_sym3 and log_spd (eigenvalues + closed form) against the
/// Jacobi-diagonalisation oracle on n pre-generated inputs. Rows:
/// exp_sym3, exp_diag, log_spd, log_diag; speed_ratio on the closed-form rows
/// is oracle time / closed-form time. Error columns hold the max squared
/// Frobenius gap to the oracle.
inline std::vector<BenchRow> timing_run(std::size_t n, std::uint64_t seed, int repeats = 3) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "need at least one sample");
  repeats = std::max(repeats, 1);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<SymMat3> ys(n);
  std::vector<SymMat3> spd(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (double& v : ys[i].y) v = unit(rng);
    // SPD inputs as Gram matrices of uniform matrices, as psi sees them
    Mat3 m;
    do {
      for (double& v : m.a) v = unit(rng);
    } while (!(det(m) > 1e-3));
    spd[i] = gram(m);
  }

  double sink = 0.0;
  const double t_exp =
      detail::time_per_call(ys, [](const SymMat3& y) { return exp_sym3(y).y[1]; }, repeats, sink);
  const double t_exp_diag = detail::time_per_call(
      ys, [](const SymMat3& y) { return oracle::matfun_diag(y, oracle::MatFun::Exp).y[1]; }, repeats, sink);
  const double t_log =
      detail::time_per_call(spd, [](const SymMat3& g) { return log_spd_half_gram(g).y[1]; }, repeats, sink);
  const double t_log_diag = detail::time_per_call(
      spd, [](const SymMat3& g) { return oracle::matfun_diag(g, oracle::MatFun::Log).y[1]; }, repeats, sink);

  double e_exp = 0.0, e_log = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    e_exp = std::max(e_exp, frobenius_sq(exp_sym3(ys[i]) - oracle::matfun_diag(ys[i], oracle::MatFun::Exp)));
    e_log = std::max(e_log, frobenius_sq(log_spd_half_gram(spd[i]) * 2.0 -
                                         oracle::matfun_diag(spd[i], oracle::MatFun::Log)));
  }
  if (sink == 0.12345) std::fputc(' ', stderr);  // keep the timed work observable

  const double nan = std::numeric_limits<double>::quiet_NaN();
  return {{"exp_sym3", n, e_exp, t_exp, t_exp_diag / t_exp},
          {"exp_diag", n, 0.0, t_exp_diag, nan},
          {"log_spd", n, e_log, t_log, t_log_diag / t_log},
          {"log_diag", n, 0.0, t_log_diag, nan}};
}

/// Error statistics plus timings under one seed.
inline BenchReport run_all(std::size_t n, double det_floor, std::uint64_t seed) {
  BenchReport rep;
  rep.seed = seed;
  double rate = 0.0;
  rep.rows.push_back(roundtrip_error_stats(n, det_floor, seed, &rate));
  rep.acceptance_rate = rate;
  for (BenchRow& r : timing_run(n, seed)) rep.rows.push_back(std::move(r));
  return rep;
}

/// CSV: a comment line with generator and seed, then the header row.
inline void write_csv(std::ostream& out, const BenchReport& rep) {
  out << "# generator=" << kGeneratorName << " seed=" << rep.seed;
  if (!std::isnan(rep.acceptance_rate)) {
    char buf[64];
    std::snprintf(buf, sizeof buf, " acceptance_rate=%.6g", rep.acceptance_rate);
    out << buf;
  }
  out << "\nname,n,max_sq_frob_error,mean_ns_per_call,speed_ratio\n";
  auto num = [](double v) -> std::string {
    if (std::isnan(v)) return "";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  };
  for (const BenchRow& r : rep.rows)
    out << r.name << ',' << r.n << ',' << num(r.max_sq_frob_error) << ',' << num(r.mean_ns_per_call) << ','
        << num(r.speed_ratio) << '\n';
}

}  // namespace affp::bench

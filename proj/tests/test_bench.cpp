#include <gtest/gtest.h>

#include <sstream>
#include <string>

#include "affp/bench.hpp"

using namespace affp;
using namespace affp::bench;

TEST(Sampler, RespectsFloorAndIsDeterministic) {
  AffineSampler a(1e-3, 99), b(1e-3, 99);
  for (int i = 0; i < 10000; ++i) {
    const HomAffine3 x = a();
    EXPECT_GT(det(x.linear), 1e-3);
    EXPECT_EQ(x, b());
  }
  EXPECT_GT(a.acceptance_rate(), 0.0);
  EXPECT_LT(a.acceptance_rate(), 1.0);
}

TEST(Sampler, SymmetricSamplesInBall) {
  SymSampler s(5.0, 3);
  for (int i = 0; i < 1000; ++i) EXPECT_LE(frobenius(s()), 5.0 + 1e-12);
}

TEST(RoundTripStats, IdentityIsExact) {
  EXPECT_LE(frobenius_sq_diff(HomAffine3::identity(), phi(psi(HomAffine3::identity()))), 1e-28);
}

TEST(RoundTripStats, ReproducibleAndOrderFree) {
  const BenchRow a = roundtrip_error_stats(2000, 1e-3, 5);
  const BenchRow b = roundtrip_error_stats(2000, 1e-3, 5);
  EXPECT_EQ(a.max_sq_frob_error, b.max_sq_frob_error);
  EXPECT_LE(a.max_sq_frob_error, 1e-20);
}

TEST(RoundTripStats, NearSingularInputsDegrade) {
  const BenchRow loose = roundtrip_error_stats(10000, 1e-3, 6);
  const BenchRow tight = roundtrip_error_stats(10000, 1e-6, 6);
  EXPECT_GT(tight.max_sq_frob_error, loose.max_sq_frob_error);
}

TEST(Timing, SmokeRunEmitsCsv) {
  BenchReport rep;
  rep.seed = 8;
  rep.rows = timing_run(1000, 8);
  ASSERT_EQ(rep.rows.size(), 4u);
  for (const BenchRow& r : rep.rows) {
    EXPECT_GT(r.mean_ns_per_call, 0.0);
    EXPECT_GE(r.max_sq_frob_error, 0.0);
  }
  std::ostringstream out;
  write_csv(out, rep);
  const std::string csv = out.str();
  EXPECT_EQ(csv.rfind("# generator=mt19937_64 seed=8", 0), 0u) << csv;
  EXPECT_NE(csv.find("\nname,n,max_sq_frob_error,mean_ns_per_call,speed_ratio\n"), std::string::npos);
  EXPECT_NE(csv.find("\nexp_sym3,1000,"), std::string::npos);
  EXPECT_NE(csv.find("\nlog_diag,1000,"), std::string::npos);
}

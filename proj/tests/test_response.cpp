#include <gtest/gtest.h>

#include <map>

#include "common.hpp"

using namespace iffm;
using namespace iffm::testing;

TEST(Quadrature, SimpsonExactOnCubics) {
  std::vector<double> f(11);
  const double h = 0.1;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = i * h;
    f[i] = x * x * x - 2 * x + 1;
  }
  EXPECT_NEAR(simpson(f, h), 0.25 - 1.0 + 1.0, 1e-14);
  f.resize(10);  // odd interval count closes with a 3/8 panel
  const double b = 0.9;
  EXPECT_NEAR(simpson(f, h), b * b * b * b / 4 - b * b + b, 1e-14);
}

TEST(Quadrature, LogGrid) {
  const auto g = default_u_grid();
  ASSERT_EQ(g.size(), 121u);
  EXPECT_EQ(g.front(), 1e-3);
  EXPECT_EQ(g.back(), 1e3);
  EXPECT_NEAR(g[20], 1e-2, 1e-15);
  EXPECT_NEAR(g[30], 1e-1 / std::sqrt(10.0), 1e-15);
  EXPECT_NEAR(g[60], 1.0, 1e-14);
  EXPECT_THROW(log_grid(0.0, 1.0, 5), Error);
}

TEST(DoseResponse, Scalar5AtEquilibrium) {
  const auto tr = simulate(LinearSubsystem::unit_scalar(), scalar(5), 2.0, scalar_init(2.0), SimConfig{});
  const auto dr = dose_response(tr);
  EXPECT_NEAR(dr.dr, 1.0, 1e-12);
  EXPECT_NEAR(dr.cdr, 1.5, 1e-12);
}

TEST(DoseResponse, Scalar1FromRestIgnoresInput) {
  // y = 1 - t e^{-t} for every u
  for (double u : {0.01, 1.0, 100.0}) {
    const auto dr = dose_response(simulate(LinearSubsystem::unit_scalar(), scalar(1), u, scalar_init(0.0), SimConfig{}));
    EXPECT_NEAR(dr.dr, 1 - 1.5 * std::exp(-1.5), 1e-9);
    EXPECT_NEAR(dr.cdr, 0.5 + 2.5 * std::exp(-1.5), 1e-9);
  }
}

TEST(DoseResponse, CumulativeMatchesSimpson) {
  const auto tr = simulate(bench_system(), bench_motif(1), 1.0, bench_init(1, bench_x0()[0]), SimConfig{});
  EXPECT_NEAR(dose_response(tr).cdr, simpson(tr.y, tr.t[1] - tr.t[0]), 1e-8);
}

namespace {

const SweepResult& bench_sweep(int iffm, int init) {
  static std::map<std::pair<int, int>, SweepResult> cache;
  const auto key = std::make_pair(iffm, init);
  if (!cache.count(key)) {
    cache[key] = sweep(bench_system(), bench_motif(iffm), bench_init(iffm, bench_x0()[init]), SimConfig{},
                       default_u_grid());
  }
  return cache[key];
}

}  // namespace

TEST(Sweep, RepresentationIdentityAndFiniteDifference) {
  for (int i = 1; i <= 4; ++i) {
    const auto& sw = bench_sweep(i, 0);
    ASSERT_EQ(sw.entries.size(), 121u);
    for (const auto& e : sw.entries) ASSERT_TRUE(e.ok()) << e.message;
    EXPECT_LE(sw.max_identity_gap(), 1e-7) << i;
    EXPECT_LE(sw.max_fd_gap(), 1e-4) << i;
  }
}

TEST(Sweep, CumulativeResponseNonnegative) {
  for (int i = 1; i <= 4; ++i)
    for (const auto& e : bench_sweep(i, 1).entries) EXPECT_GE(e.cdr, 0.0);
}

TEST(Sweep, DerivativeAgreesWithSecants) {
  for (int i = 1; i <= 4; ++i) {
    const auto& es = bench_sweep(i, 2).entries;
    for (std::size_t k = 0; k + 1 < es.size(); ++k) {
      const double a = es[k].d_cdr_q, b = es[k + 1].d_cdr_q;
      if (std::abs(a) <= 1e-8 || std::abs(b) <= 1e-8 || (a > 0) != (b > 0)) continue;
      EXPECT_EQ(a > 0, es[k + 1].cdr - es[k].cdr > 0) << i << " u=" << es[k].u;
    }
  }
}

TEST(Sweep, Scalar1DecreasesFromPositiveStart) {
  const auto sw = sweep(LinearSubsystem::unit_scalar(), scalar(1), scalar_init(0.8), SimConfig{}, log_grid(0.01, 100.0, 21));
  for (const auto& e : sw.entries) EXPECT_LT(e.d_cdr_q, 0.0);
}

TEST(Sweep, Iffm2SensitivityNonnegative) {
  const auto sys = bench_system();
  for (const auto& x0 : bench_x0()) {
    for (double u : log_grid(1e-3, 1e3, 25)) {
      const auto tr = simulate(sys, bench_motif(2), u, bench_init(2, x0), SimConfig{});
      EXPECT_GE(min_of(tr.q), -1e-10) << u;
    }
  }
}

TEST(Sweep, ResultsIndependentOfWorkerCount) {
  const auto grid = log_grid(1e-2, 1e2, 17);
  SweepOptions serial, parallel;
  parallel.jobs = 4;
  const auto a = sweep(bench_system(), bench_motif(4), bench_init(4, bench_x0()[1]), SimConfig{}, grid, serial);
  const auto b = sweep(bench_system(), bench_motif(4), bench_init(4, bench_x0()[1]), SimConfig{}, grid, parallel);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    EXPECT_EQ(a.entries[k].cdr, b.entries[k].cdr);
    EXPECT_EQ(a.entries[k].d_cdr_q, b.entries[k].d_cdr_q);
    EXPECT_EQ(a.entries[k].d_cdr_kernel, b.entries[k].d_cdr_kernel);
    EXPECT_EQ(a.entries[k].d_cdr_fd, b.entries[k].d_cdr_fd);
  }
}

TEST(Sweep, DomainViolationsAreRecorded) {
  const auto sw = sweep(LinearSubsystem::unit_scalar(), scalar(3), scalar_init(0.0), SimConfig{}, {0.5, 1.0});
  ASSERT_EQ(sw.entries.size(), 2u);
  for (const auto& e : sw.entries) {
    EXPECT_EQ(e.status, SweepStatus::DomainViolation);
    EXPECT_FALSE(e.message.empty());
  }
}

TEST(Sweep, GridValidationAndWarnings) {
  EXPECT_THROW(sweep(bench_system(), bench_motif(1), bench_init(1, bench_x0()[0]), SimConfig{}, {1.0, 0.5}), Error);
  EXPECT_THROW(sweep(bench_system(), bench_motif(1), bench_init(1, bench_x0()[0]), SimConfig{}, {}), Error);
  const auto sw = sweep(bench_system(), bench_motif(1), bench_init(1, bench_x0()[0]), SimConfig{}, {1e-4, 1.0});
  EXPECT_EQ(sw.warnings.size(), 1u);
}

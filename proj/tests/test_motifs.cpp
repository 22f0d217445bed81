#include <gtest/gtest.h>

#include <random>

#include "common.hpp"

using namespace iffm;
using namespace iffm::testing;

namespace {

Vector vec1(double v) { return Vector::Constant(1, v); }

MotifSpec any_motif(MotifKind k) {
  if (is_scalar(k)) return MotifSpec::unit_scalar(k);
  return MotifSpec::make(k, bench_params());
}

}  // namespace

TEST(Motifs, CrossWalk) {
  EXPECT_EQ(iffm_kind(1), MotifKind::Vec5);
  EXPECT_EQ(iffm_kind(2), MotifKind::Vec3);
  EXPECT_EQ(iffm_kind(3), MotifKind::Vec2);
  EXPECT_EQ(iffm_kind(4), MotifKind::Vec4);
  EXPECT_EQ(kind_name(MotifKind::Vec5), "iffm-1");
  EXPECT_EQ(*parse_kind("iffm-2"), MotifKind::Vec3);
  EXPECT_EQ(*parse_kind("vec-5"), MotifKind::Vec5);
  EXPECT_EQ(*parse_kind("scalar-8"), MotifKind::Scalar8);
  EXPECT_FALSE(parse_kind("iffm-5"));
  EXPECT_FALSE(parse_kind("scalar-9"));
  EXPECT_FALSE(parse_kind("scalar-"));
  for (MotifKind k : kAllKinds) EXPECT_EQ(*parse_kind(kind_name(k)), k);
}

TEST(Motifs, ParameterValidation) {
  auto p = bench_params();
  p.d = 0.0;
  EXPECT_THROW(MotifSpec::make(MotifKind::Vec5, p), Error);
  p = bench_params();
  p.K = 0.0;
  EXPECT_THROW(MotifSpec::make(MotifKind::Vec3, p), Error);
  p.c = Vector::Ones(1);
  EXPECT_NO_THROW(MotifSpec::make(MotifKind::Scalar3, p));
  p.c(0) = -1.0;
  EXPECT_THROW(MotifSpec::make(MotifKind::Scalar3, p), Error);
}

TEST(FEval, Scalar5SteadyState) {
  EXPECT_DOUBLE_EQ(scalar(5).f_eval(vec1(1.0), 1.0, 1.0), 0.0);
}

TEST(FEval, Scalar3SteadyState) {
  EXPECT_DOUBLE_EQ(scalar(3).f_eval(vec1(2.0), 1.0, 2.0), 0.0);
}

TEST(FEval, Iffm2AtZeroState) {
  const auto m = bench_motif(2);
  const auto p = bench_params();
  const double y = p.beta / (p.d * p.K);
  for (double u : {0.3, 1.0, 7.0}) {
    EXPECT_NEAR(m.f_eval(Vector::Zero(5), y, u), p.beta * (u - 1.0) / p.K, 1e-14);
  }
}

TEST(FEval, VectorForms) {
  const auto p = bench_params();
  const Vector x = bench_x0()[1];
  const double s = p.c.dot(x), y = 0.7, u = 2.5;
  EXPECT_NEAR(bench_motif(1).f_eval(x, y, u), -s * y + p.d * u, 1e-14);
  EXPECT_NEAR(bench_motif(2).f_eval(x, y, u), p.beta * u / (p.K + s) - p.d * y, 1e-14);
  EXPECT_NEAR(bench_motif(3).f_eval(x, y, u), s - p.d * u * y, 1e-14);
  EXPECT_NEAR(bench_motif(4).f_eval(x, y, u), 1.0 / (p.K + s) - p.d * y / (p.beta * u), 1e-14);
}

TEST(FEval, DomainGuards) {
  EXPECT_THROW(scalar(3).f_eval(vec1(0.0), 1.0, 1.0), DomainViolation);
  EXPECT_THROW(scalar(1).f_eval(vec1(1.0), 1.0, 0.0), DomainViolation);
  EXPECT_NO_THROW(scalar(1).f_eval(vec1(0.0), 1.0, 1.0));
}

TEST(Partials, Scalar2) {
  const auto pd = scalar(2).partials(vec1(0.4), 1.3, 2.0);
  EXPECT_DOUBLE_EQ(pd.df_dx(0), 1.0);
  EXPECT_DOUBLE_EQ(pd.df_dy, -2.0);
  EXPECT_DOUBLE_EQ(pd.df_du, -1.3);
}

TEST(Partials, Iffm4OutputDerivative) {
  const auto p = bench_params();
  for (double u : {0.01, 1.0, 50.0}) {
    EXPECT_NEAR(bench_motif(4).partials(bench_x0()[2], 0.9, u).df_dy, -p.d / (p.beta * u), 1e-15);
  }
}

TEST(Partials, AgreeWithFiniteDifferences) {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> pos(0.1, 3.0);
  for (MotifKind k : kAllKinds) {
    const auto m = any_motif(k);
    const Eigen::Index n = m.params().c.size();
    for (int trial = 0; trial < 100; ++trial) {
      Vector x(n);
      for (Eigen::Index i = 0; i < n; ++i) x(i) = pos(rng);
      const double y = pos(rng), u = pos(rng);
      const auto pd = m.partials(x, y, u);
      auto close = [&](double analytic, double fd) {
        return std::abs(analytic - fd) <= 1e-6 * std::max(1.0, std::abs(analytic));
      };
      for (Eigen::Index i = 0; i < n; ++i) {
        const double h = 1e-6 * x(i);
        Vector xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        const double fd = (m.f_eval(xp, y, u) - m.f_eval(xm, y, u)) / (2 * h);
        EXPECT_TRUE(close(pd.df_dx(i), fd)) << m.name() << " dx" << i;
      }
      const double hy = 1e-6 * y, hu = 1e-6 * u;
      EXPECT_TRUE(close(pd.df_dy, (m.f_eval(x, y + hy, u) - m.f_eval(x, y - hy, u)) / (2 * hy))) << m.name();
      EXPECT_TRUE(close(pd.df_du, (m.f_eval(x, y, u + hu) - m.f_eval(x, y, u - hu)) / (2 * hu))) << m.name();
    }
  }
}

TEST(Partials, DecayRateNonnegativeAndIncoherent) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> pos(0.05, 4.0);
  for (MotifKind k : kAllKinds) {
    const auto m = any_motif(k);
    const Eigen::Index n = m.params().c.size();
    for (int trial = 0; trial < 100; ++trial) {
      Vector x(n);
      for (Eigen::Index i = 0; i < n; ++i) x(i) = pos(rng);
      const double y = pos(rng), u = pos(rng);
      const auto ag = m.a_and_g(x, Vector::Zero(n), y, u);
      EXPECT_GE(ag.a, 0.0) << m.name();
      const auto pd = m.partials(x, y, u);
      const double dx = pd.df_dx.sum();
      if (dx != 0.0 && pd.df_du != 0.0) {
        EXPECT_LT(dx * pd.df_du, 0.0) << m.name();
      }
    }
  }
}

TEST(AandG, Scalar1AlongExactTrajectory) {
  const double u = 2.0, x0 = 1.5;
  for (double t : {0.0, 0.4, 1.5}) {
    const auto cf = closed_form_scalar(MotifKind::Scalar1, u, x0, t);
    const auto ag = scalar(1).a_and_g(vec1(cf.x), vec1(cf.p), 1.0, u);
    EXPECT_NEAR(ag.g, -x0 * std::exp(-t) / (u * u), 1e-14);
    EXPECT_DOUBLE_EQ(ag.a, 1.0);
  }
}

TEST(AandG, Scalar3AlongExactTrajectory) {
  const double u = 0.5, x0 = 2.0;
  for (double t : {0.0, 0.7, 1.5}) {
    const auto cf = closed_form_scalar(MotifKind::Scalar3, u, x0, t);
    const auto ag = scalar(3).a_and_g(vec1(cf.x), vec1(cf.p), 0.8, u);
    EXPECT_NEAR(ag.g, x0 * std::exp(-t) / (cf.x * cf.x), 1e-14);
    EXPECT_GT(ag.g, 0.0);
  }
}

TEST(AandG, Scalar1FromRestHasNoSource) {
  for (double t : {0.0, 0.5, 1.5}) {
    const auto cf = closed_form_scalar(MotifKind::Scalar1, 3.0, 0.0, t);
    EXPECT_NEAR(scalar(1).a_and_g(vec1(cf.x), vec1(cf.p), 1.0, 3.0).g, 0.0, 1e-15);
  }
}

TEST(YSteady, UnitScalarsAdaptPerfectly) {
  const auto sys = LinearSubsystem::unit_scalar();
  for (int s = 1; s <= 8; ++s) {
    for (double u : {0.01, 0.5, 1.0, 30.0}) {
      const double y = scalar(s).y_steady(sys, u);
      EXPECT_NEAR(y, 1.0, 1e-12) << s << " " << u;
      EXPECT_NEAR(scalar(s).f_eval(sys.steady_state(u), y, u), 0.0, 1e-12);
    }
  }
}

TEST(YSteady, Iffm1AndIffm3) {
  const auto sys = bench_system();
  const auto p = bench_params();
  const double cw = p.c.dot(sys.unit_steady_state());
  for (double u : {0.1, 1.0, 10.0}) {
    EXPECT_NEAR(bench_motif(1).y_steady(sys, u), p.d / cw, 1e-13);
    EXPECT_NEAR(bench_motif(3).y_steady(sys, u), cw / p.d, 1e-13);
  }
}

TEST(YSteady, MichaelisKindsDependOnInput) {
  const auto sys = bench_system();
  EXPECT_GT(std::abs(bench_motif(2).y_steady(sys, 10.0) - bench_motif(2).y_steady(sys, 0.1)), 1e-3);
}

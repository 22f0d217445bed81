#pragma once

// Forward simulation of the augmented system and the backward kernel pass.
//
// Augmented state, m = 2n + 5:
//   x (n)    x' = A x + b u
//   p (n)    p' = A p + b                      p = dx/du
//   y        y' = F(x, y, u)
//   q        q' = F_x p + F_y q + F_u          q = dy/du
//   int_y    (int y)' = y                      -> cDR
//   G        G' = g = F_x p + F_u
//   int_q    (int q)' = q                      -> d cDR / du
//
// The kernel lambda(t) = int_t^T exp(-int_t^s a) ds solves lambda' = a lambda - 1,
// lambda(T) = 0, and is integrated backward in a second pass over the forward
// dense solution.  The same pass accumulates int_0^T lambda g.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "iffm/dopri5.hpp"
#include "iffm/errors.hpp"
#include "iffm/linsys.hpp"
#include "iffm/motifs.hpp"

namespace iffm {

struct SimConfig {
  double T = 1.5;
  double rtol = 1e-9;
  double atol = 1e-12;
  double dt_max = std::numeric_limits<double>::infinity();
  int n_samples = 2001;
  double x_floor = kDefaultXFloor;

  void validate() const {
    if (!(T > 0.0) || !std::isfinite(T)) throw Error(ErrorCode::InvalidArgument, "T must be positive");
    if (!(rtol > 0.0 && rtol <= 1e-3)) throw Error(ErrorCode::InvalidArgument, "rtol must lie in (0, 1e-3]");
    if (!(atol > 0.0 && atol <= rtol)) throw Error(ErrorCode::InvalidArgument, "atol must lie in (0, rtol]");
    if (n_samples < 64) throw Error(ErrorCode::InvalidArgument, "n_samples must be at least 64");
    if (!(dt_max > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt_max must be positive");
    if (!(x_floor > 0.0)) throw Error(ErrorCode::InvalidArgument, "x_floor must be positive");
  }

  /// Same settings with both tolerances divided by `factor`.
  SimConfig tightened(double factor) const {
    SimConfig c = *this;
    c.rtol /= factor;
    c.atol /= factor;
    return c;
  }

  std::vector<double> sample_times() const {
    std::vector<double> t(static_cast<std::size_t>(n_samples));
    for (int k = 0; k < n_samples; ++k) t[k] = T * static_cast<double>(k) / (n_samples - 1);
    t.back() = T;
    return t;
  }
};

// ---------------------------------------------------------------------------
// Initial conditions

/// x0 = -A^{-1} b v, a point on the steady-state ray.
struct SteadyRay {
  double v = 0.0;
};

enum class YStart { Explicit, AdaptedSteadyState, MichaelisStart };

struct InitialPolicy {
  std::variant<Vector, SteadyRay> x0 = SteadyRay{0.0};
  YStart y0_mode = YStart::AdaptedSteadyState;
  double y0 = 0.0;  ///< used when y0_mode == Explicit
  std::string label;
};

struct ResolvedInit {
  Vector x0;
  double y0 = 0.0;
};

inline ResolvedInit resolve(const InitialPolicy& init, const LinearSubsystem& sys,
                            const MotifSpec& motif, double u) {
  ResolvedInit r;
  if (const auto* ray = std::get_if<SteadyRay>(&init.x0)) {
    if (!(ray->v >= 0.0)) throw Error(ErrorCode::InvalidArgument, "steady ray parameter must be >= 0");
    r.x0 = sys.unit_steady_state() * ray->v;
  } else {
    r.x0 = std::get<Vector>(init.x0);
  }
  if (r.x0.size() != sys.dim()) throw Error(ErrorCode::DimensionMismatch, "x0 has wrong dimension");
  if ((r.x0.array() < 0.0).any()) throw Error(ErrorCode::InvalidArgument, "x0 must be nonnegative");
  switch (init.y0_mode) {
    case YStart::Explicit:
      r.y0 = init.y0;
      break;
    case YStart::AdaptedSteadyState:
      r.y0 = motif.y_steady(sys, u);
      break;
    case YStart::MichaelisStart: {
      const auto& p = motif.params();
      const double den = p.d * (p.K + motif.readout(r.x0));
      if (!(den > 0.0)) throw Error(ErrorCode::InvalidArgument, "Michaelis start needs K + c'x0 > 0");
      r.y0 = p.beta / den;
      break;
    }
  }
  if (!(r.y0 >= 0.0) || !std::isfinite(r.y0)) throw Error(ErrorCode::InvalidArgument, "y0 must be finite and >= 0");
  return r;
}

// ---------------------------------------------------------------------------
// Trajectory

struct TrajectoryMeta {
  std::string motif;
  double u = 0.0;
  Vector x0;
  double y0 = 0.0;
};

struct Trajectory {
  std::vector<double> t;
  Matrix x;  ///< samples x n
  Matrix p;  ///< samples x n
  std::vector<double> y, q, int_y, G, a, g, int_q;
  TrajectoryMeta meta;
  MotifSpec motif;
  ode::DenseSolution dense;
  Eigen::Index n = 0;
  SimConfig config;

  std::size_t size() const { return t.size(); }
  double T() const { return t.back(); }

  /// a(t) and g(t) at an arbitrary time, from the dense forward solution.
  SensitivityCoefficients coefficients_at(double time) const {
    std::vector<double> z(dense.dim());
    dense.evaluate(time, z);
    return coefficients_from_state(z.data(), time);
  }

  SensitivityCoefficients coefficients_from_state(const double* z, double time) const {
    const Eigen::Map<const Vector> xs(z, n);
    const Eigen::Map<const Vector> ps(z + n, n);
    const ReducedEval e = motif.eval(motif.readout(xs), z[2 * n], meta.u, time);
    return {-e.df_dy, e.df_ds * motif.params().c.dot(ps) + e.df_du};
  }
};

namespace detail {

struct AugmentedRhs {
  const LinearSubsystem& sys;
  const MotifSpec& motif;
  double u;
  std::vector<double> a_rowmajor;
  std::vector<double> c;
  Eigen::Index n;

  AugmentedRhs(const LinearSubsystem& s, const MotifSpec& m, double input)
      : sys(s), motif(m), u(input), n(s.dim()) {
    a_rowmajor.resize(static_cast<std::size_t>(n * n));
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) a_rowmajor[i * n + j] = s.A()(i, j);
    c.assign(m.params().c.data(), m.params().c.data() + n);
  }

  void operator()(double t, const double* z, double* dz) const {
    const double* x = z;
    const double* p = z + n;
    const double* b = sys.b().data();
    double s = 0.0, cp = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double ax = 0.0, ap = 0.0;
      const double* row = a_rowmajor.data() + i * n;
      for (Eigen::Index j = 0; j < n; ++j) {
        ax += row[j] * x[j];
        ap += row[j] * p[j];
      }
      dz[i] = ax + b[i] * u;
      dz[n + i] = ap + b[i];
      s += c[i] * x[i];
      cp += c[i] * p[i];
    }
    const double y = z[2 * n];
    const double q = z[2 * n + 1];
    const ReducedEval e = motif.eval(s, y, u, t);
    const double g = e.df_ds * cp + e.df_du;
    dz[2 * n] = e.f;
    dz[2 * n + 1] = g + e.df_dy * q;
    dz[2 * n + 2] = y;
    dz[2 * n + 3] = g;
    dz[2 * n + 4] = q;
  }
};

inline ode::Options options_from(const SimConfig& cfg) {
  ode::Options o;
  o.rtol = cfg.rtol;
  o.atol = cfg.atol;
  o.h_max = cfg.dt_max;
  return o;
}

}  // namespace detail

/// Integrates the augmented system from resolved initial data. Throws
/// DomainViolation or Error(StepFailure).
inline Trajectory simulate(const LinearSubsystem& sys, const MotifSpec& motif_in, double u,
                           const ResolvedInit& init, const SimConfig& cfg) {
  cfg.validate();
  if (!(u > 0.0) || !std::isfinite(u)) throw Error(ErrorCode::InvalidArgument, "u must be positive");
  if (motif_in.params().c.size() != sys.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "motif readout c does not match subsystem dimension");
  }
  if (init.x0.size() != sys.dim()) throw Error(ErrorCode::DimensionMismatch, "x0 has wrong dimension");

  MotifSpec motif = cfg.x_floor == motif_in.x_floor()
                        ? motif_in
                        : MotifSpec::make(motif_in.kind(), motif_in.params(), cfg.x_floor);
  const Eigen::Index n = sys.dim();
  const std::size_t m = static_cast<std::size_t>(2 * n + 5);

  std::vector<double> z0(m, 0.0);
  for (Eigen::Index i = 0; i < n; ++i) z0[i] = init.x0(i);
  z0[2 * n] = init.y0;

  const std::vector<double> times = cfg.sample_times();
  detail::AugmentedRhs rhs(sys, motif, u);
  ode::DenseSolution dense = ode::integrate(rhs, z0, times, detail::options_from(cfg));

  Trajectory tr{.t = times,
                .x = Matrix(times.size(), n),
                .p = Matrix(times.size(), n),
                .y = {}, .q = {}, .int_y = {}, .G = {}, .a = {}, .g = {}, .int_q = {},
                .meta = {motif.name(), u, init.x0, init.y0},
                .motif = motif,
                .dense = {},
                .n = n,
                .config = cfg};
  const std::size_t N = times.size();
  for (auto* v : {&tr.y, &tr.q, &tr.int_y, &tr.G, &tr.a, &tr.g, &tr.int_q}) v->resize(N);

  // Every sample time is a mesh point; walk the mesh once.
  const auto mesh = dense.mesh();
  std::size_t k = 0;
  for (std::size_t j = 0; j < N; ++j) {
    while (mesh[k] != times[j]) ++k;
    const auto z = dense.state(k);
    for (Eigen::Index i = 0; i < n; ++i) {
      tr.x(j, i) = z[i];
      tr.p(j, i) = z[n + i];
    }
    tr.y[j] = z[2 * n];
    tr.q[j] = z[2 * n + 1];
    tr.int_y[j] = z[2 * n + 2];
    tr.G[j] = z[2 * n + 3];
    tr.int_q[j] = z[2 * n + 4];
    const auto ag = tr.coefficients_from_state(z.data(), times[j]);
    tr.a[j] = ag.a;
    tr.g[j] = ag.g;
  }
  tr.dense = std::move(dense);
  return tr;
}

inline Trajectory simulate(const LinearSubsystem& sys, const MotifSpec& motif, double u,
                           const InitialPolicy& init, const SimConfig& cfg) {
  return simulate(sys, motif, u, resolve(init, sys, motif, u), cfg);
}

// ---------------------------------------------------------------------------
// Kernel

struct KernelProfile {
  std::vector<double> t;
  std::vector<double> lambda;
  std::vector<double> lambda_dot;
  /// int_0^T lambda(s) g(s) ds, accumulated alongside lambda.
  double lambda_g_integral = 0.0;
  /// Backward solution in reversed time tau = T - t; components (lambda, int lambda g).
  ode::DenseSolution backward;
  double T = 0.0;

  double lambda_at(double time) const {
    double w[2];
    backward.evaluate(T - time, w);
    return w[0];
  }
};

/// Backward pass for lambda' = a lambda - 1, lambda(T) = 0, over the forward solution.
/// Uses the forward run's tolerances; the stops are the forward mesh, reversed.
inline KernelProfile kernel(const Trajectory& traj, const SimConfig& cfg) {
  const double T = traj.T();
  const auto mesh = traj.dense.mesh();
  std::vector<double> stops(mesh.size());
  for (std::size_t k = 0; k < mesh.size(); ++k) stops[k] = T - mesh[mesh.size() - 1 - k];
  stops.front() = 0.0;
  stops.back() = T;

  std::vector<double> z(traj.dense.dim());
  auto rhs = [&](double tau, const double* w, double* dw) {
    const double time = T - tau;
    traj.dense.evaluate(time, z);
    const auto ag = traj.coefficients_from_state(z.data(), time);
    dw[0] = 1.0 - ag.a * w[0];
    dw[1] = w[0] * ag.g;
  };
  const double w0[2] = {0.0, 0.0};
  ode::Options opt = detail::options_from(cfg);
  ode::DenseSolution back = ode::integrate(rhs, std::span<const double>(w0, 2), stops, opt);

  KernelProfile kp;
  kp.T = T;
  kp.t = traj.t;
  const std::size_t N = traj.size();
  kp.lambda.resize(N);
  kp.lambda_dot.resize(N);
  const auto bmesh = back.mesh();
  std::size_t k = bmesh.size() - 1;
  for (std::size_t j = 0; j < N; ++j) {
    const double tau = T - traj.t[j];
    while (k > 0 && bmesh[k] > tau + 1e-15 * T) --k;
    kp.lambda[j] = back.state(k)[0];
  }
  kp.lambda.back() = 0.0;
  for (std::size_t j = 0; j < N; ++j) kp.lambda_dot[j] = traj.a[j] * kp.lambda[j] - 1.0;
  kp.lambda_g_integral = back.state(bmesh.size() - 1)[1];
  kp.backward = std::move(back);
  return kp;
}

inline KernelProfile kernel(const Trajectory& traj) { return kernel(traj, traj.config); }

// ---------------------------------------------------------------------------
// Closed forms for x' = -x + u

struct ScalarClosedForm {
  double x = 0.0;
  double p = 0.0;
};

inline ScalarClosedForm closed_form_scalar(MotifKind kind, double u, double x0, double t) {
  if (!is_scalar(kind)) throw Error(ErrorCode::UnsupportedKind, "closed forms exist for scalar kinds only");
  const double e = std::exp(-t);
  return {u + (x0 - u) * e, -std::expm1(-t)};
}

}  // namespace iffm

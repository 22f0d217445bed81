#pragma once

// Brute-force references for the engine: finite-difference sensitivities,
// Richardson-extrapolated d cDR / du, and the kernel by nested quadrature.
// Every oracle runs at tolerances 100x tighter than the engine.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "iffm/integrator.hpp"

namespace iffm {

inline constexpr double kOracleTightening = 100.0;
inline constexpr double kRichardsonStep = 1e-3;

struct OracleReport {
  std::string name;
  double engine = 0.0;
  double oracle = 0.0;
  double abs_gap = 0.0;
  double rel_gap = 0.0;  ///< abs_gap / max(|oracle|, scale_floor)
  double tol = 0.0;      ///< applied to rel_gap
  double scale_floor = 0.0;
  bool pass = false;
};

inline OracleReport make_report(std::string name, double engine, double oracle, double tol,
                                double scale_floor = 0.0) {
  OracleReport r;
  r.name = std::move(name);
  r.engine = engine;
  r.oracle = oracle;
  r.abs_gap = std::abs(engine - oracle);
  r.tol = tol;
  r.scale_floor = scale_floor;
  const double scale = std::max(std::abs(oracle), scale_floor);
  r.rel_gap = scale > 0.0 ? r.abs_gap / scale : (r.abs_gap == 0.0 ? 0.0 : INFINITY);
  r.pass = std::isfinite(r.rel_gap) && r.rel_gap <= tol;
  return r;
}

/// Central difference [y_{u+h}(t) - y_{u-h}(t)] / 2h on the sample grid, from
/// two runs at tightened tolerance with the initial data fixed at their
/// nominal-u values.
inline std::vector<double> fd_sensitivity(const LinearSubsystem& sys, const MotifSpec& motif, double u,
                                          const ResolvedInit& init, const SimConfig& cfg, double h) {
  if (!(h > 0.0) || !(u - h > 0.0)) throw Error(ErrorCode::InvalidArgument, "fd_sensitivity needs 0 < h < u");
  const SimConfig tight = cfg.tightened(kOracleTightening);
  const Trajectory up = simulate(sys, motif, u + h, init, tight);
  const Trajectory dn = simulate(sys, motif, u - h, init, tight);
  std::vector<double> q(up.size());
  for (std::size_t k = 0; k < q.size(); ++k) q[k] = (up.y[k] - dn.y[k]) / (2.0 * h);
  return q;
}

inline std::vector<double> fd_sensitivity(const LinearSubsystem& sys, const MotifSpec& motif, double u,
                                          const InitialPolicy& init, const SimConfig& cfg, double h) {
  return fd_sensitivity(sys, motif, u, resolve(init, sys, motif, u), cfg, h);
}

/// (4 D(h/2) - D(h)) / 3 with D the central difference of cDR, h = 1e-3 u.
inline double richardson_dcdr(const LinearSubsystem& sys, const MotifSpec& motif, double u,
                              const ResolvedInit& init, const SimConfig& cfg) {
  if (!(u > 0.0)) throw Error(ErrorCode::InvalidArgument, "richardson_dcdr needs u > 0");
  const SimConfig tight = cfg.tightened(kOracleTightening);
  const double h = kRichardsonStep * u;
  auto cdr = [&](double v) { return simulate(sys, motif, v, init, tight).int_y.back(); };
  const double d1 = (cdr(u + h) - cdr(u - h)) / (2.0 * h);
  const double d2 = (cdr(u + h / 2) - cdr(u - h / 2)) / h;
  return (4.0 * d2 - d1) / 3.0;
}

inline double richardson_dcdr(const LinearSubsystem& sys, const MotifSpec& motif, double u,
                              const InitialPolicy& init, const SimConfig& cfg) {
  return richardson_dcdr(sys, motif, u, resolve(init, sys, motif, u), cfg);
}

/// lambda(t) = int_t^T exp(-int_t^s a) ds by nested Gauss-Kronrod, with a(t)
/// read from the trajectory's dense output. Panels follow the forward mesh so
/// that a is smooth on each of them.
inline double lambda_by_quadrature(const Trajectory& traj, double t_probe) {
  const double T = traj.T();
  if (!(t_probe >= 0.0 && t_probe <= T)) throw Error(ErrorCode::InvalidArgument, "probe time outside [0, T]");
  if (t_probe == T) return 0.0;
  using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;
  constexpr unsigned kDepth = 0;
  constexpr double kTol = 1e-14;

  std::vector<double> z(traj.dense.dim());
  auto a = [&](double s) {
    traj.dense.evaluate(s, z);
    return traj.coefficients_from_state(z.data(), s).a;
  };
  std::vector<double> knots{t_probe};
  for (double m : traj.dense.mesh())
    if (m > t_probe && m < T) knots.push_back(m);
  knots.push_back(T);

  const std::size_t panels = knots.size() - 1;
  std::vector<double> cumulative(knots.size(), 0.0);
  for (std::size_t k = 0; k < panels; ++k) {
    cumulative[k + 1] = cumulative[k] + Rule::integrate(a, knots[k], knots[k + 1], kDepth, kTol);
  }
  double total = 0.0;
  for (std::size_t k = 0; k < panels; ++k) {
    auto outer = [&](double s) {
      return std::exp(-(cumulative[k] + Rule::integrate(a, knots[k], s, kDepth, kTol)));
    };
    total += Rule::integrate(outer, knots[k], knots[k + 1], kDepth, kTol);
  }
  return total;
}

}  // namespace iffm

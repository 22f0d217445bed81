#pragma once

// Dose response over an input grid, with three estimates of d cDR / du:
//   d_cdr_q       int_0^T q dt         (forward sensitivity)
//   d_cdr_kernel  int_0^T lambda g dt  (backward kernel)
//   d_cdr_fd      [cDR(u+h) - cDR(u-h)] / 2h, h = 1e-4 u

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "iffm/integrator.hpp"
#include "iffm/parallel.hpp"
#include "iffm/quadrature.hpp"

namespace iffm {

inline constexpr int kDefaultGridPoints = 121;
inline constexpr double kDefaultGridMin = 1e-3;
inline constexpr double kDefaultGridMax = 1e3;
inline constexpr double kSweepFdStep = 1e-4;

inline std::vector<double> default_u_grid() {
  return log_grid(kDefaultGridMin, kDefaultGridMax, kDefaultGridPoints);
}

struct DoseResponse {
  double dr = 0.0;
  double cdr = 0.0;
};

inline DoseResponse dose_response(const Trajectory& traj) {
  return {traj.y.back(), traj.int_y.back()};
}

enum class SweepStatus { Ok, DomainViolation };

inline const char* to_string(SweepStatus s) {
  return s == SweepStatus::Ok ? "ok" : "domain-violation";
}

struct SweepEntry {
  double u = 0.0;
  double dr = NAN;
  double cdr = NAN;
  double d_cdr_q = NAN;
  double d_cdr_kernel = NAN;
  double d_cdr_fd = NAN;
  SweepStatus status = SweepStatus::Ok;
  std::string message;

  bool ok() const { return status == SweepStatus::Ok; }
};

struct SweepResult {
  std::string motif;
  std::string init_label;
  std::vector<SweepEntry> entries;
  std::vector<std::string> warnings;

  std::vector<double> u_grid() const {
    std::vector<double> u;
    for (const auto& e : entries) u.push_back(e.u);
    return u;
  }

  /// max |d_cdr_q - d_cdr_kernel| / (1 + |d_cdr_q|) over ok entries.
  double max_identity_gap() const {
    double worst = 0.0;
    for (const auto& e : entries) {
      if (!e.ok()) continue;
      worst = std::max(worst, std::abs(e.d_cdr_q - e.d_cdr_kernel) / (1.0 + std::abs(e.d_cdr_q)));
    }
    return worst;
  }

  /// max |d_cdr_q - d_cdr_fd| / (1 + |d_cdr_q|) over ok entries.
  double max_fd_gap() const {
    double worst = 0.0;
    for (const auto& e : entries) {
      if (!e.ok()) continue;
      worst = std::max(worst, std::abs(e.d_cdr_q - e.d_cdr_fd) / (1.0 + std::abs(e.d_cdr_q)));
    }
    return worst;
  }
};

/// Called once per ok grid point with the forward trajectory and its kernel.
/// Invocations for different indices may run concurrently.
using SweepHook = std::function<void(std::size_t, const Trajectory&, const KernelProfile&)>;

struct SweepOptions {
  int jobs = 1;
  SweepHook hook;
};

namespace detail {

inline void check_grid(const std::vector<double>& u_grid) {
  if (u_grid.empty()) throw Error(ErrorCode::InvalidArgument, "u grid is empty");
  for (std::size_t k = 0; k < u_grid.size(); ++k) {
    if (!(u_grid[k] > 0.0) || !std::isfinite(u_grid[k])) {
      throw Error(ErrorCode::InvalidArgument, "u grid entries must be positive");
    }
    if (k > 0 && !(u_grid[k] > u_grid[k - 1])) {
      throw Error(ErrorCode::InvalidArgument, "u grid must be strictly increasing");
    }
  }
}

inline SweepEntry sweep_point(const LinearSubsystem& sys, const MotifSpec& motif,
                              const InitialPolicy& init, const SimConfig& cfg, double u,
                              std::size_t index, const SweepHook& hook) {
  SweepEntry e;
  e.u = u;
  try {
    const ResolvedInit r = resolve(init, sys, motif, u);
    const Trajectory tr = simulate(sys, motif, u, r, cfg);
    const KernelProfile ker = kernel(tr, cfg);
    const DoseResponse dr = dose_response(tr);
    e.dr = dr.dr;
    e.cdr = dr.cdr;
    e.d_cdr_q = tr.int_q.back();
    e.d_cdr_kernel = ker.lambda_g_integral;

    const double h = kSweepFdStep * u;
    const double up = simulate(sys, motif, u + h, r, cfg).int_y.back();
    const double dn = simulate(sys, motif, u - h, r, cfg).int_y.back();
    e.d_cdr_fd = (up - dn) / (2.0 * h);
    if (hook) hook(index, tr, ker);
  } catch (const DomainViolation& ex) {
    e = SweepEntry{};
    e.u = u;
    e.status = SweepStatus::DomainViolation;
    e.message = ex.what();
  }
  return e;
}

}  // namespace detail

/// Runs simulate + kernel at each u. Domain violations are recorded per entry.
/// Initial data are resolved at the nominal u and reused for the FD runs.
inline SweepResult sweep(const LinearSubsystem& sys, const MotifSpec& motif, const InitialPolicy& init,
                         const SimConfig& cfg, const std::vector<double>& u_grid,
                         const SweepOptions& opt = {}) {
  cfg.validate();
  detail::check_grid(u_grid);
  SweepResult out;
  out.motif = motif.name();
  out.init_label = init.label;
  if (u_grid.front() < kDefaultGridMin) {
    out.warnings.push_back("u below 1e-3 is outside the validated range");
  }
  out.entries.resize(u_grid.size());
  parallel_for(u_grid.size(), opt.jobs, [&](std::size_t i) {
    out.entries[i] = detail::sweep_point(sys, motif, init, cfg, u_grid[i], i, opt.hook);
  });
  return out;
}

}  // namespace iffm

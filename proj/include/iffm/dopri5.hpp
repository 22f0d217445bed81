#pragma once

// Dormand-Prince 5(4) with FSAL, PI step control and the 4th-order continuous
// extension (Hairer, Norsett & Wanner, "Solving ODEs I", routine DOPRI5/CONTD5).
//
// Integration is always in increasing t.  The caller supplies a sorted list of
// stop times; every stop is hit exactly by an accepted step, so samples at the
// stops never go through interpolation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "iffm/errors.hpp"

namespace iffm::ode {

namespace dp {
inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                        a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                        a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
inline constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                        a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                        e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
}  // namespace dp

struct Options {
  double rtol = 1e-9;
  double atol = 1e-12;
  double h_max = std::numeric_limits<double>::infinity();
  /// Steps below h_min_rel * (t_end - t0) abort with StepFailure.
  double h_min_rel = 1e-12;
  std::size_t max_steps = 50'000'000;
};

/// Piecewise quartic dense solution over the accepted mesh.
class DenseSolution {
 public:
  DenseSolution() = default;
  explicit DenseSolution(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t mesh_size() const { return t_.size(); }
  std::span<const double> mesh() const { return t_; }
  double t_begin() const { return t_.front(); }
  double t_end() const { return t_.back(); }

  std::span<const double> state(std::size_t k) const { return {z_.data() + k * dim_, dim_}; }
  std::span<const double> derivative(std::size_t k) const { return {dz_.data() + k * dim_, dim_}; }

  /// Index of the mesh interval containing t (clamped to the ends).
  std::size_t interval(double t) const {
    if (t_.size() < 2) return 0;
    auto it = std::upper_bound(t_.begin(), t_.end(), t);
    std::size_t k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - t_.begin()) - 1));
    return std::min(k, t_.size() - 2);
  }

  void evaluate(double t, std::span<double> out) const { evaluate_in(interval(t), t, out); }

  /// Evaluate inside a known interval k, [t_k, t_{k+1}].
  void evaluate_in(std::size_t k, double t, std::span<double> out) const {
    if (t_.size() == 1) {
      std::copy_n(z_.begin(), dim_, out.begin());
      return;
    }
    const double h = t_[k + 1] - t_[k];
    const double theta = (t - t_[k]) / h;
    const double theta1 = 1.0 - theta;
    const double* r = cont_.data() + k * 5 * dim_;
    for (std::size_t i = 0; i < dim_; ++i) {
      out[i] = r[i] + theta * (r[dim_ + i] +
                               theta1 * (r[2 * dim_ + i] +
                                         theta * (r[3 * dim_ + i] + theta1 * r[4 * dim_ + i])));
    }
  }

  // Builder interface for the stepper.
  void push_point(double t, std::span<const double> z, std::span<const double> dz) {
    t_.push_back(t);
    z_.insert(z_.end(), z.begin(), z.end());
    dz_.insert(dz_.end(), dz.begin(), dz.end());
  }
  void push_coefficients(std::span<const double> rcont) {
    cont_.insert(cont_.end(), rcont.begin(), rcont.end());
  }

 private:
  std::size_t dim_ = 0;
  std::vector<double> t_;
  std::vector<double> z_;
  std::vector<double> dz_;
  std::vector<double> cont_;
};

/// Integrates z' = rhs(t, z) from stops.front() to stops.back(), landing on every stop.
///
/// `rhs(t, const double* z, double* dz)` may throw iffm::DomainViolation.  A
/// violation at an accepted point is fatal; one raised inside a trial stage
/// shrinks the step instead, since the trial state is not on the solution.
template <class Rhs>
DenseSolution integrate(Rhs&& rhs, std::span<const double> z0, std::span<const double> stops,
                        const Options& opt) {
  using namespace dp;
  const std::size_t m = z0.size();
  if (stops.size() < 2) throw Error(ErrorCode::InvalidArgument, "need at least two stop times");
  const double t0 = stops.front();
  const double t_end = stops.back();
  const double span = t_end - t0;
  if (!(span > 0.0)) throw Error(ErrorCode::InvalidArgument, "stop times must increase");
  const double h_min = opt.h_min_rel * span;

  std::vector<double> y(z0.begin(), z0.end()), y1(m), ytmp(m), err(m), rcont(5 * m);
  std::vector<double> k1(m), k2(m), k3(m), k4(m), k5(m), k6(m), k7(m);

  DenseSolution sol(m);
  double t = t0;
  rhs(t, y.data(), k1.data());
  sol.push_point(t, y, k1);

  auto scale = [&](double a, double b) {
    return opt.atol + opt.rtol * std::max(std::abs(a), std::abs(b));
  };

  // Initial step guess (Hairer's HINIT).
  double h;
  {
    double dnf = 0.0, dny = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double sk = scale(y[i], y[i]);
      dnf += (k1[i] / sk) * (k1[i] / sk);
      dny += (y[i] / sk) * (y[i] / sk);
    }
    h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
    h = std::min({h, opt.h_max, span});
    for (std::size_t i = 0; i < m; ++i) ytmp[i] = y[i] + h * k1[i];
    double der2 = 0.0;
    try {
      rhs(t + h, ytmp.data(), k2.data());
      for (std::size_t i = 0; i < m; ++i) {
        const double sk = scale(y[i], y[i]);
        der2 += ((k2[i] - k1[i]) / sk) * ((k2[i] - k1[i]) / sk);
      }
      der2 = std::sqrt(der2) / h;
    } catch (const DomainViolation&) {
      der2 = 1e30;
    }
    const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
    const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.2);
    h = std::min({100.0 * h, h1, opt.h_max, span});
  }

  std::size_t next_stop = 1;
  double err_old = 1e-4;
  bool last_rejected = false;
  std::size_t steps = 0;

  while (next_stop < stops.size()) {
    if (++steps > opt.max_steps) throw Error(ErrorCode::StepFailure, "step budget exhausted");
    const double target = stops[next_stop];
    bool lands = false;
    double h_step = std::min(h, opt.h_max);
    if (t + h_step >= target - 1e-14 * std::max(1.0, std::abs(target))) {
      h_step = target - t;
      lands = true;
    }
    if (h_step < h_min) {
      throw Error(ErrorCode::StepFailure, "step size underflow at t = " + std::to_string(t));
    }

    bool stage_failed = false;
    try {
      for (std::size_t i = 0; i < m; ++i) ytmp[i] = y[i] + h_step * a21 * k1[i];
      rhs(t + c2 * h_step, ytmp.data(), k2.data());
      for (std::size_t i = 0; i < m; ++i) ytmp[i] = y[i] + h_step * (a31 * k1[i] + a32 * k2[i]);
      rhs(t + c3 * h_step, ytmp.data(), k3.data());
      for (std::size_t i = 0; i < m; ++i)
        ytmp[i] = y[i] + h_step * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
      rhs(t + c4 * h_step, ytmp.data(), k4.data());
      for (std::size_t i = 0; i < m; ++i)
        ytmp[i] = y[i] + h_step * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
      rhs(t + c5 * h_step, ytmp.data(), k5.data());
      for (std::size_t i = 0; i < m; ++i)
        ytmp[i] = y[i] + h_step * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
      const double t_new = lands ? target : t + h_step;
      rhs(t_new, ytmp.data(), k6.data());
      for (std::size_t i = 0; i < m; ++i)
        y1[i] = y[i] + h_step * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
      rhs(t_new, y1.data(), k7.data());
    } catch (const DomainViolation&) {
      if (h_step * 0.25 < h_min) throw;
      stage_failed = true;
    }
    if (stage_failed) {
      h = h_step * 0.25;
      last_rejected = true;
      continue;
    }

    double e2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      err[i] = h_step * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sk = scale(y[i], y1[i]);
      e2 += (err[i] / sk) * (err[i] / sk);
    }
    const double enorm = std::sqrt(e2 / static_cast<double>(m));
    if (!std::isfinite(enorm)) {
      h = h_step * 0.25;
      last_rejected = true;
      continue;
    }

    // PI controller (beta = 0.04), safety 0.9, factor in [0.2, 10].
    const double fac11 = std::pow(std::max(enorm, 1e-300), 0.2 - 0.04 * 0.75);
    double fac = fac11 / std::pow(err_old, 0.04);
    fac = std::clamp(fac / 0.9, 0.1, 5.0);
    double h_new = h_step / fac;

    if (enorm <= 1.0) {
      err_old = std::max(enorm, 1e-4);
      for (std::size_t i = 0; i < m; ++i) {
        const double ydiff = y1[i] - y[i];
        const double bspl = h_step * k1[i] - ydiff;
        rcont[i] = y[i];
        rcont[m + i] = ydiff;
        rcont[2 * m + i] = bspl;
        rcont[3 * m + i] = ydiff - h_step * k7[i] - bspl;
        rcont[4 * m + i] =
            h_step * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
      }
      t = lands ? target : t + h_step;
      std::swap(y, y1);
      std::swap(k1, k7);
      sol.push_coefficients(rcont);
      sol.push_point(t, y, k1);
      if (lands) ++next_stop;
      if (last_rejected) h_new = std::min(h_new, h_step);
      last_rejected = false;
      // A step shortened to land on a stop says little about the natural size.
      h = lands ? std::max(h_new, std::min(h, opt.h_max)) : h_new;
      if (lands && h > h_new * 10.0) h = h_new * 10.0;
    } else {
      h = h_step / std::min(1.0 / 0.2, fac11 / 0.9);
      last_rejected = true;
    }
  }
  return sol;
}

}  // namespace iffm::ode

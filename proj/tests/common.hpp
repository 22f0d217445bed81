#pragma once

#include <cmath>
#include <vector>

#include "iffm/iffm.hpp"

namespace iffm::testing {

inline LinearSubsystem bench_system() {
  Matrix a(5, 5);
  a << -3.0, 0.8, 0.0, 0.0, 0.0,
       0.4, -2.6, 0.7, 0.0, 0.0,
       0.0, 0.5, -2.8, 0.6, 0.0,
       0.0, 0.0, 0.4, -2.3, 0.7,
       0.0, 0.0, 0.0, 0.3, -1.7;
  Vector b(5);
  b << 1.0, 0.8, 0.9, 0.7, 0.6;
  return LinearSubsystem::validate(a, b);
}

inline MotifParams bench_params() {
  MotifParams p;
  p.c = Vector(5);
  p.c << 0.9, 0.7, 0.8, 0.6, 0.5;
  p.d = 1.2;
  p.beta = 1.5;
  p.K = 0.8;
  p.gamma = 0.8;
  return p;
}

inline MotifSpec bench_motif(int iffm) { return MotifSpec::make(iffm_kind(iffm), bench_params()); }

inline std::vector<Vector> bench_x0() {
  Vector a = Vector::Zero(5), b(5), c(5);
  b << 0.5, 0.6, 0.7, 0.8, 0.9;
  c << 2.0, 2.1, 2.3, 2.4, 2.5;
  return {a, b, c};
}

inline InitialPolicy bench_init(int iffm, const Vector& x0) {
  InitialPolicy p;
  p.x0 = x0;
  p.y0_mode = (iffm == 2 || iffm == 4) ? YStart::MichaelisStart : YStart::AdaptedSteadyState;
  return p;
}

inline std::vector<InitialPolicy> bench_inits(int iffm) {
  std::vector<InitialPolicy> out;
  int k = 1;
  for (const auto& x0 : bench_x0()) {
    auto p = bench_init(iffm, x0);
    p.label = "x0_" + std::to_string(k++);
    out.push_back(p);
  }
  return out;
}

inline InitialPolicy scalar_init(double x0, double y0 = 1.0) {
  InitialPolicy p;
  p.x0 = Vector(Vector::Constant(1, x0));
  p.y0_mode = YStart::Explicit;
  p.y0 = y0;
  return p;
}

inline MotifSpec scalar(int system) { return MotifSpec::unit_scalar(static_cast<MotifKind>(system - 1)); }

/// Fixed-step classical RK4 for x' = A x + b u, p' = A p + b.
inline Propagation rk4_propagate(const LinearSubsystem& sys, double u, const Vector& x0, double t, double dt) {
  Vector x = x0, p = Vector::Zero(sys.dim());
  const Matrix& A = sys.A();
  const Vector& b = sys.b();
  const int steps = static_cast<int>(std::round(t / dt));
  const double h = t / steps;
  auto f = [&](const Vector& v, double scale) -> Vector { return A * v + b * scale; };
  for (int k = 0; k < steps; ++k) {
    const Vector k1 = f(x, u), k2 = f(x + 0.5 * h * k1, u), k3 = f(x + 0.5 * h * k2, u), k4 = f(x + h * k3, u);
    x += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    const Vector l1 = f(p, 1), l2 = f(p + 0.5 * h * l1, 1), l3 = f(p + 0.5 * h * l2, 1), l4 = f(p + h * l3, 1);
    p += h / 6.0 * (l1 + 2 * l2 + 2 * l3 + l4);
  }
  return {x, p};
}

inline double min_of(const std::vector<double>& v) {
  double m = v.front();
  for (double x : v) m = std::min(m, x);
  return m;
}

inline double max_of(const std::vector<double>& v) {
  double m = v.front();
  for (double x : v) m = std::max(m, x);
  return m;
}

}  // namespace iffm::testing

#pragma once

// Output dynamics y' = F(x, y, u) of the incoherent feedforward motifs.
//
// Every motif depends on x only through the readout s = c^T x, so F and its
// partials are written in terms of (s, y, u) and dF/dx = (dF/ds) c.  Kinds with
// an inverse-x term use the Michaelis form 1/(K + s).

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include "iffm/errors.hpp"
#include "iffm/linsys.hpp"

namespace iffm {

enum class MotifKind {
  Scalar1, Scalar2, Scalar3, Scalar4, Scalar5, Scalar6, Scalar7, Scalar8,
  Vec1, Vec2, Vec3, Vec4, Vec5, Vec6, Vec7, Vec8,
};

inline constexpr std::array<MotifKind, 16> kAllKinds = {
    MotifKind::Scalar1, MotifKind::Scalar2, MotifKind::Scalar3, MotifKind::Scalar4,
    MotifKind::Scalar5, MotifKind::Scalar6, MotifKind::Scalar7, MotifKind::Scalar8,
    MotifKind::Vec1,    MotifKind::Vec2,    MotifKind::Vec3,    MotifKind::Vec4,
    MotifKind::Vec5,    MotifKind::Vec6,    MotifKind::Vec7,    MotifKind::Vec8,
};

inline constexpr double kDefaultXFloor = 1e-12;

inline bool is_scalar(MotifKind k) { return static_cast<int>(k) <= static_cast<int>(MotifKind::Scalar8); }

/// Table-1 system number, 1..8, shared by a scalar kind and its vector analogue.
inline int system_number(MotifKind k) {
  const int i = static_cast<int>(k);
  return (i % 8) + 1;
}

/// Kinds whose F contains 1/(K + c^T x).
inline bool has_inverse_readout(MotifKind k) {
  const int sys = system_number(k);
  return sys == 3 || sys == 4 || sys == 7 || sys == 8;
}

/// Kinds whose F depends on the Hill-type gain beta (vector forms only).
inline bool uses_beta(MotifKind k) {
  if (is_scalar(k)) return false;
  const int sys = system_number(k);
  return sys != 2 && sys != 5;
}

/// IFFM number (1..4) for the main-text motifs, or nullopt.
/// IFFM1 = system 5, IFFM2 = system 3, IFFM3 = system 2, IFFM4 = system 4.
inline std::optional<int> iffm_number(MotifKind k) {
  if (is_scalar(k)) return std::nullopt;
  switch (system_number(k)) {
    case 5: return 1;
    case 3: return 2;
    case 2: return 3;
    case 4: return 4;
    default: return std::nullopt;
  }
}

inline MotifKind iffm_kind(int iffm) {
  switch (iffm) {
    case 1: return MotifKind::Vec5;
    case 2: return MotifKind::Vec3;
    case 3: return MotifKind::Vec2;
    case 4: return MotifKind::Vec4;
    default: throw Error(ErrorCode::UnsupportedKind, "IFFM index must be 1..4");
  }
}

/// Canonical config name: scalar-N, iffm-N for the four main-text motifs, vec-N otherwise.
inline std::string kind_name(MotifKind k) {
  if (is_scalar(k)) return "scalar-" + std::to_string(system_number(k));
  if (auto i = iffm_number(k)) return "iffm-" + std::to_string(*i);
  return "vec-" + std::to_string(system_number(k));
}

inline std::optional<MotifKind> parse_kind(std::string_view name) {
  auto number_after = [&](std::string_view prefix) -> int {
    if (name.substr(0, prefix.size()) != prefix || name.size() != prefix.size() + 1) return 0;
    const char c = name.back();
    return (c >= '1' && c <= '9') ? c - '0' : 0;
  };
  if (int n = number_after("scalar-"); n >= 1 && n <= 8) return static_cast<MotifKind>(n - 1);
  if (int n = number_after("vec-"); n >= 1 && n <= 8) return static_cast<MotifKind>(8 + n - 1);
  if (int n = number_after("iffm-"); n >= 1 && n <= 4) return iffm_kind(n);
  return std::nullopt;
}

/// Right-hand side in readable form, for listings.
inline std::string equation(MotifKind k) {
  switch (k) {
    case MotifKind::Scalar1: return "y' = x/u - y";
    case MotifKind::Scalar2: return "y' = x - u y";
    case MotifKind::Scalar3: return "y' = u/x - y";
    case MotifKind::Scalar4: return "y' = 1/x - y/u";
    case MotifKind::Scalar5: return "y' = u - x y";
    case MotifKind::Scalar6: return "y' = 1 - x y/u";
    case MotifKind::Scalar7: return "y' = 1/u - y/x";
    case MotifKind::Scalar8: return "y' = 1 - u y/x";
    case MotifKind::Vec1: return "y' = c'x/(beta u) - d y";
    case MotifKind::Vec2: return "y' = c'x - d u y";
    case MotifKind::Vec3: return "y' = beta u/(K + c'x) - d y";
    case MotifKind::Vec4: return "y' = 1/(K + c'x) - d y/(beta u)";
    case MotifKind::Vec5: return "y' = -c'x y + d u";
    case MotifKind::Vec6: return "y' = d - c'x y/(beta u)";
    case MotifKind::Vec7: return "y' = 1/(beta u) - d y/(K + c'x)";
    case MotifKind::Vec8: return "y' = d - beta u y/(K + c'x)";
  }
  return {};
}

/// F and its partials in the readout variable s = c^T x.
struct ReducedEval {
  double f = 0.0;
  double df_ds = 0.0;
  double df_dy = 0.0;
  double df_du = 0.0;
};

struct Partials {
  Vector df_dx;
  double df_dy = 0.0;
  double df_du = 0.0;
};

struct SensitivityCoefficients {
  double a = 0.0;  ///< -dF/dy
  double g = 0.0;  ///< dF/dx . p + dF/du
};

struct MotifParams {
  Vector c;
  double d = 1.0;
  double beta = 1.0;
  double K = 0.0;
  double gamma = 0.0;  ///< accepted from configs, used by no motif
};

class MotifSpec {
 public:
  /// Validates c > 0, d > 0, beta > 0, K >= 0 (K > 0 for vector kinds).
  static MotifSpec make(MotifKind kind, MotifParams params, double x_floor = kDefaultXFloor) {
    if (params.c.size() == 0) throw Error(ErrorCode::InvalidArgument, "c must be nonempty");
    for (Eigen::Index i = 0; i < params.c.size(); ++i) {
      if (!(params.c(i) > 0.0) || !std::isfinite(params.c(i))) {
        throw Error(ErrorCode::InvalidArgument, "c(" + std::to_string(i) + ") must be positive");
      }
    }
    if (!(params.d > 0.0) || !std::isfinite(params.d)) throw Error(ErrorCode::InvalidArgument, "d must be positive");
    if (!(params.beta > 0.0) || !std::isfinite(params.beta)) throw Error(ErrorCode::InvalidArgument, "beta must be positive");
    if (!(params.K >= 0.0) || !std::isfinite(params.K)) throw Error(ErrorCode::InvalidArgument, "K must be nonnegative");
    if (!is_scalar(kind) && !(params.K > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "K must be positive for vector kinds");
    }
    if (!(x_floor > 0.0)) throw Error(ErrorCode::InvalidArgument, "x_floor must be positive");
    return MotifSpec(kind, std::move(params), x_floor);
  }

  /// Unit parameters (c = 1, d = 1, K = 0) on an n-dimensional subsystem.
  static MotifSpec unit_scalar(MotifKind kind, Eigen::Index n = 1) {
    MotifParams p;
    p.c = Vector::Ones(n);
    return make(kind, std::move(p));
  }

  MotifKind kind() const { return kind_; }
  const MotifParams& params() const { return params_; }
  double x_floor() const { return x_floor_; }
  std::string name() const { return kind_name(kind_); }

  double readout(const Vector& x) const { return params_.c.dot(x); }

  /// Throws DomainViolation when u <= 0 or an inverse-readout denominator K + s
  /// is at or below the floor. `t` is attached to the error for context.
  ReducedEval eval(double s, double y, double u,
                   double t = std::numeric_limits<double>::quiet_NaN()) const {
    if (!(u > 0.0)) throw DomainViolation(t, "input u must be positive");
    const double d = params_.d;
    const double beta = params_.beta;
    double den = 0.0;
    if (has_inverse_readout(kind_)) {
      den = params_.K + s;
      if (!(den > x_floor_)) {
        throw DomainViolation(t, "K + c'x = " + std::to_string(den) + " fell below x_floor at t = " +
                                     std::to_string(t));
      }
    }
    ReducedEval e;
    switch (kind_) {
      case MotifKind::Scalar1:
        e = {s / u - d * y, 1.0 / u, -d, -s / (u * u)};
        break;
      case MotifKind::Scalar2:
      case MotifKind::Vec2:
        e = {s - d * u * y, 1.0, -d * u, -d * y};
        break;
      case MotifKind::Scalar3:
        e = {u / den - d * y, -u / (den * den), -d, 1.0 / den};
        break;
      case MotifKind::Scalar4:
        e = {1.0 / den - d * y / u, -1.0 / (den * den), -d / u, d * y / (u * u)};
        break;
      case MotifKind::Scalar5:
        e = {u - d * s * y, -d * y, -d * s, 1.0};
        break;
      case MotifKind::Scalar6:
        e = {1.0 - d * s * y / u, -d * y / u, -d * s / u, d * s * y / (u * u)};
        break;
      case MotifKind::Scalar7:
        e = {1.0 / u - d * y / den, d * y / (den * den), -d / den, -1.0 / (u * u)};
        break;
      case MotifKind::Scalar8:
        e = {1.0 - d * u * y / den, d * u * y / (den * den), -d * u / den, -d * y / den};
        break;
      case MotifKind::Vec1:
        e = {s / (beta * u) - d * y, 1.0 / (beta * u), -d, -s / (beta * u * u)};
        break;
      case MotifKind::Vec3:
        e = {beta * u / den - d * y, -beta * u / (den * den), -d, beta / den};
        break;
      case MotifKind::Vec4:
        e = {1.0 / den - d * y / (beta * u), -1.0 / (den * den), -d / (beta * u),
             d * y / (beta * u * u)};
        break;
      case MotifKind::Vec5:
        e = {-s * y + d * u, -y, -s, d};
        break;
      case MotifKind::Vec6:
        e = {d - s * y / (beta * u), -y / (beta * u), -s / (beta * u), s * y / (beta * u * u)};
        break;
      case MotifKind::Vec7:
        e = {1.0 / (beta * u) - d * y / den, d * y / (den * den), -d / den, -1.0 / (beta * u * u)};
        break;
      case MotifKind::Vec8:
        e = {d - beta * u * y / den, beta * u * y / (den * den), -beta * u / den, -beta * y / den};
        break;
    }
    return e;
  }

  double f_eval(const Vector& x, double y, double u) const { return eval(readout(x), y, u).f; }

  Partials partials(const Vector& x, double y, double u) const {
    const ReducedEval e = eval(readout(x), y, u);
    return Partials{params_.c * e.df_ds, e.df_dy, e.df_du};
  }

  SensitivityCoefficients a_and_g(const Vector& x, const Vector& p, double y, double u) const {
    const ReducedEval e = eval(readout(x), y, u);
    return {-e.df_dy, e.df_ds * params_.c.dot(p) + e.df_du};
  }

  /// Root of F(x_ss(u), y, u) = 0. F is affine in y, so y = F(x_ss, 0, u) / (-dF/dy).
  double y_steady(const LinearSubsystem& sys, double u) const {
    if (!(u > 0.0)) throw Error(ErrorCode::InvalidArgument, "y_steady requires u > 0");
    if (sys.dim() != params_.c.size()) {
      throw Error(ErrorCode::DimensionMismatch, "c and A have different dimensions");
    }
    const double s = readout(sys.steady_state(u));
    const ReducedEval e = eval(s, 0.0, u);
    const double y = e.f / (-e.df_dy);
    if (!std::isfinite(y)) throw Error(ErrorCode::NoSteadyState, "steady-state output is not finite");
    return y;
  }

 private:
  MotifSpec(MotifKind kind, MotifParams params, double x_floor)
      : kind_(kind), params_(std::move(params)), x_floor_(x_floor) {}

  MotifKind kind_;
  MotifParams params_;
  double x_floor_;
};

}  // namespace iffm

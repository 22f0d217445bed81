#pragma once

// Fixed-sign certificates and opposite-sign witnesses for u -> cDR(u, T),
// and motif-level verdicts.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iffm/integrator.hpp"
#include "iffm/response.hpp"

namespace iffm {

inline constexpr double kSignBand = 1e-9;
inline constexpr double kWitnessBand = 1e-8;

enum class Sign { NonNegative, NonPositive, IdenticallyZero, Mixed };

inline const char* to_string(Sign s) {
  switch (s) {
    case Sign::NonNegative: return ">= 0";
    case Sign::NonPositive: return "<= 0";
    case Sign::IdenticallyZero: return "= 0";
    case Sign::Mixed: return "No fixed sign";
  }
  return "";
}

struct SignProfile {
  Sign value = Sign::IdenticallyZero;
  /// Largest magnitude on the side opposite to `value` (0 if none). For Mixed,
  /// the smaller of the two one-sided extremes.
  double worst_violation = 0.0;
  /// Abscissa of the worst violation (sample index when no abscissa given).
  double where = 0.0;
  double max_abs = 0.0;
};

/// A sample counts as zero when |v| <= eps (1 + running max |v|). Mixed needs
/// one sample above the band on each side.
inline SignProfile sign_profile(std::span<const double> v, double eps = kSignBand,
                                std::span<const double> at = {}) {
  if (v.empty()) throw Error(ErrorCode::InvalidArgument, "sign_profile needs a nonempty series");
  auto where_of = [&](std::size_t k) { return at.size() == v.size() ? at[k] : static_cast<double>(k); };
  double running = 0.0;
  bool pos = false, neg = false;
  double most_pos = 0.0, most_neg = 0.0;
  std::size_t k_pos = 0, k_neg = 0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    running = std::max(running, std::abs(v[k]));
    const double band = eps * (1.0 + running);
    if (v[k] > band) pos = true;
    if (v[k] < -band) neg = true;
    if (v[k] > most_pos) { most_pos = v[k]; k_pos = k; }
    if (v[k] < most_neg) { most_neg = v[k]; k_neg = k; }
  }
  SignProfile p;
  p.max_abs = running;
  if (pos && neg) {
    p.value = Sign::Mixed;
    const bool neg_smaller = -most_neg < most_pos;
    p.worst_violation = neg_smaller ? -most_neg : most_pos;
    p.where = where_of(neg_smaller ? k_neg : k_pos);
  } else if (pos) {
    p.value = Sign::NonNegative;
    p.worst_violation = -most_neg;
    p.where = where_of(k_neg);
  } else if (neg) {
    p.value = Sign::NonPositive;
    p.worst_violation = most_pos;
    p.where = where_of(k_pos);
  } else {
    p.value = Sign::IdenticallyZero;
    p.worst_violation = std::max(most_pos, -most_neg);
    p.where = where_of(most_pos >= -most_neg ? k_pos : k_neg);
  }
  return p;
}

/// Joins per-series profiles: any Mixed or opposite fixed signs give Mixed.
inline Sign combine(Sign a, Sign b) {
  if (a == Sign::IdenticallyZero) return b;
  if (b == Sign::IdenticallyZero) return a;
  return a == b ? a : Sign::Mixed;
}

enum class Direction { Nondecreasing, Nonincreasing, Constant, Nonmonotone, Inconclusive };

inline const char* to_string(Direction d) {
  switch (d) {
    case Direction::Nondecreasing: return "nondecreasing";
    case Direction::Nonincreasing: return "nonincreasing";
    case Direction::Constant: return "constant";
    case Direction::Nonmonotone: return "nonmonotone";
    case Direction::Inconclusive: return "inconclusive";
  }
  return "";
}

inline bool is_monotone(Direction d) {
  return d == Direction::Nondecreasing || d == Direction::Nonincreasing || d == Direction::Constant;
}

inline Direction direction_of(Sign s) {
  switch (s) {
    case Sign::NonNegative: return Direction::Nondecreasing;
    case Sign::NonPositive: return Direction::Nonincreasing;
    case Sign::IdenticallyZero: return Direction::Constant;
    case Sign::Mixed: return Direction::Nonmonotone;
  }
  return Direction::Inconclusive;
}

/// Sign of a product of two fixed-sign factors.
inline Sign product_sign(Sign a, Sign b) {
  if (a == Sign::Mixed || b == Sign::Mixed) return Sign::Mixed;
  if (a == Sign::IdenticallyZero || b == Sign::IdenticallyZero) return Sign::IdenticallyZero;
  return a == b ? Sign::NonNegative : Sign::NonPositive;
}

inline Sign negate(Sign s) {
  if (s == Sign::NonNegative) return Sign::NonPositive;
  if (s == Sign::NonPositive) return Sign::NonNegative;
  return s;
}

enum class CertificateKind { Thm1i, Thm1ii, DrLevel, None };

inline const char* to_string(CertificateKind c) {
  switch (c) {
    case CertificateKind::Thm1i: return "Thm1-i";
    case CertificateKind::Thm1ii: return "Thm1-ii";
    case CertificateKind::DrLevel: return "DR-level";
    case CertificateKind::None: return "none";
  }
  return "";
}

struct Certificate {
  CertificateKind kind = CertificateKind::None;
  Direction direction = Direction::Inconclusive;
};

struct Theorem1Branches {
  std::optional<Direction> i;   ///< lambda and g of fixed sign, direction sign(lambda g)
  std::optional<Direction> ii;  ///< lambda' and G of fixed sign, direction sign(-lambda' G)
};

inline Theorem1Branches theorem1_branches(const Trajectory& traj, const KernelProfile& ker,
                                          double eps = kSignBand) {
  if (ker.lambda.size() != traj.size()) {
    throw Error(ErrorCode::DimensionMismatch, "trajectory and kernel grids differ");
  }
  Theorem1Branches out;
  const Sign lam = sign_profile(ker.lambda, eps).value;
  const Sign g = sign_profile(traj.g, eps).value;
  if (lam != Sign::Mixed && g != Sign::Mixed) out.i = direction_of(product_sign(lam, g));
  const Sign lam_dot = sign_profile(ker.lambda_dot, eps).value;
  const Sign G = sign_profile(traj.G, eps).value;
  if (lam_dot != Sign::Mixed && G != Sign::Mixed) out.ii = direction_of(negate(product_sign(lam_dot, G)));
  return out;
}

/// Branch (i) if it holds at this u, otherwise branch (ii).
inline std::optional<Certificate> theorem1_certificate(const Trajectory& traj, const KernelProfile& ker,
                                                       double eps = kSignBand) {
  const Theorem1Branches b = theorem1_branches(traj, ker, eps);
  if (b.i) return Certificate{CertificateKind::Thm1i, *b.i};
  if (b.ii) return Certificate{CertificateKind::Thm1ii, *b.ii};
  return std::nullopt;
}

/// Opposite-sign derivatives: d cDR/du > 0 at u_minus and < 0 at u_plus; u_minus may exceed u_plus.
struct Witness {
  double u_minus = 0.0;
  double u_plus = 0.0;
  double d_minus = 0.0;  ///< d_cdr_q at u_minus (> 0)
  double d_plus = 0.0;   ///< d_cdr_q at u_plus (< 0)
  double fd_minus = 0.0;
  double fd_plus = 0.0;
};

/// u of the largest positive and of the most negative d_cdr_q. An entry counts
/// when |d| > 1e-8 (1 + |d|) and d_cdr_fd has the same sign.
inline std::optional<Witness> theorem2_witness(const SweepResult& sw, double eps = kWitnessBand) {
  const SweepEntry* pos = nullptr;
  const SweepEntry* neg = nullptr;
  for (const auto& e : sw.entries) {
    if (!e.ok()) continue;
    const double band = eps * (1.0 + std::abs(e.d_cdr_q));
    if (e.d_cdr_q > band && e.d_cdr_fd > 0.0 && (!pos || e.d_cdr_q > pos->d_cdr_q)) pos = &e;
    if (e.d_cdr_q < -band && e.d_cdr_fd < 0.0 && (!neg || e.d_cdr_q < neg->d_cdr_q)) neg = &e;
  }
  if (!pos || !neg) return std::nullopt;
  return Witness{pos->u, neg->u, pos->d_cdr_q, neg->d_cdr_q, pos->d_cdr_fd, neg->d_cdr_fd};
}

// ---------------------------------------------------------------------------
// Verdicts

struct PointAnalysis {
  Theorem1Branches branches;
  Sign q = Sign::IdenticallyZero;
  Sign a = Sign::IdenticallyZero;
  Sign G = Sign::IdenticallyZero;
  Sign g = Sign::IdenticallyZero;
};

struct InitVerdict {
  std::string label;
  Direction dr = Direction::Inconclusive;
  Direction cdr = Direction::Inconclusive;
  Certificate certificate;
  std::optional<Witness> witness;
  Sign a_sign = Sign::IdenticallyZero;
  Sign G_sign = Sign::IdenticallyZero;
  SweepResult sweep;
  std::vector<PointAnalysis> points;
};

struct Verdict {
  std::string motif;
  Direction dr = Direction::Inconclusive;
  Direction cdr = Direction::Inconclusive;
  Certificate certificate;
  std::optional<Witness> witness;
  Sign a_sign = Sign::IdenticallyZero;
  Sign G_sign = Sign::IdenticallyZero;
  std::vector<InitVerdict> per_init;
};

struct VerdictOptions {
  std::vector<double> u_grid = default_u_grid();
  int jobs = 1;
  double eps = kSignBand;
};

namespace detail {

inline Direction join_directions(const std::vector<Direction>& ds) {
  bool any_nonmono = false, any_inconclusive = false;
  for (Direction d : ds) {
    any_nonmono |= d == Direction::Nonmonotone;
    any_inconclusive |= d == Direction::Inconclusive;
  }
  if (any_nonmono) return Direction::Nonmonotone;
  if (any_inconclusive) return Direction::Inconclusive;
  Direction out = Direction::Constant;
  for (Direction d : ds) {
    if (d == Direction::Constant) continue;
    if (out == Direction::Constant) out = d;
    else if (out != d) return Direction::Inconclusive;
  }
  return out;
}

/// Certificate that holds at every ok grid point with one direction, in
/// preference order Thm1-i, Thm1-ii, DR-level.
inline Certificate uniform_certificate(const std::vector<PointAnalysis>& pts,
                                       const std::vector<SweepEntry>& entries) {
  auto try_kind = [&](CertificateKind kind) -> std::optional<Certificate> {
    std::optional<Direction> dir;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (!entries[i].ok()) continue;
      const auto& b = kind == CertificateKind::Thm1i ? pts[i].branches.i : pts[i].branches.ii;
      if (!b) return std::nullopt;
      if (*b == Direction::Constant) continue;
      if (dir && *dir != *b) return std::nullopt;
      dir = *b;
    }
    return Certificate{kind, dir.value_or(Direction::Constant)};
  };
  if (auto c = try_kind(CertificateKind::Thm1i)) return *c;
  if (auto c = try_kind(CertificateKind::Thm1ii)) return *c;
  Sign q = Sign::IdenticallyZero;
  bool any = false;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!entries[i].ok()) continue;
    any = true;
    q = combine(q, pts[i].q);
  }
  if (any && q != Sign::Mixed) return {CertificateKind::DrLevel, direction_of(q)};
  return {};
}

}  // namespace detail

inline InitVerdict verdict_for_init(const MotifSpec& motif, const LinearSubsystem& sys,
                                    const InitialPolicy& init, const SimConfig& cfg,
                                    const VerdictOptions& opt = {}) {
  InitVerdict iv;
  iv.label = init.label;
  iv.points.resize(opt.u_grid.size());
  SweepOptions so;
  so.jobs = opt.jobs;
  so.hook = [&](std::size_t i, const Trajectory& tr, const KernelProfile& ker) {
    PointAnalysis pa;
    pa.branches = theorem1_branches(tr, ker, opt.eps);
    pa.q = sign_profile(tr.q, opt.eps).value;
    pa.a = sign_profile(tr.a, opt.eps).value;
    pa.G = sign_profile(tr.G, opt.eps).value;
    pa.g = sign_profile(tr.g, opt.eps).value;
    iv.points[i] = pa;
  };
  iv.sweep = sweep(sys, motif, init, cfg, opt.u_grid, so);

  std::vector<double> dr, dq;
  for (std::size_t i = 0; i < iv.sweep.entries.size(); ++i) {
    const auto& e = iv.sweep.entries[i];
    if (!e.ok()) continue;
    dr.push_back(e.dr);
    dq.push_back(e.d_cdr_q);
    iv.a_sign = combine(iv.a_sign, iv.points[i].a);
    iv.G_sign = combine(iv.G_sign, iv.points[i].G);
  }
  if (dr.size() >= 2) {
    std::vector<double> diff(dr.size() - 1);
    for (std::size_t k = 0; k + 1 < dr.size(); ++k) diff[k] = dr[k + 1] - dr[k];
    iv.dr = direction_of(sign_profile(diff, opt.eps).value);
  }
  if (!dq.empty()) {
    iv.cdr = direction_of(sign_profile(dq, opt.eps).value);
    iv.witness = theorem2_witness(iv.sweep);
    if (iv.cdr == Direction::Nonmonotone && !iv.witness) iv.cdr = Direction::Inconclusive;
  }
  iv.certificate = detail::uniform_certificate(iv.points, iv.sweep.entries);
  return iv;
}

/// Motif-level verdict across initial conditions: nonmonotone if any init is,
/// monotone only when every init agrees on the direction.
inline Verdict verdict(const MotifSpec& motif, const LinearSubsystem& sys,
                       const std::vector<InitialPolicy>& inits, const SimConfig& cfg,
                       const VerdictOptions& opt = {}) {
  if (inits.empty()) throw Error(ErrorCode::InvalidArgument, "verdict needs at least one initial condition");
  Verdict v;
  v.motif = motif.name();
  std::vector<Direction> drs, cdrs;
  for (const auto& init : inits) {
    InitVerdict iv = verdict_for_init(motif, sys, init, cfg, opt);
    drs.push_back(iv.dr);
    cdrs.push_back(iv.cdr);
    v.a_sign = combine(v.a_sign, iv.a_sign);
    v.G_sign = combine(v.G_sign, iv.G_sign);
    if (!v.witness && iv.witness) v.witness = iv.witness;
    if (v.certificate.kind == CertificateKind::None && iv.certificate.kind != CertificateKind::None) {
      v.certificate = iv.certificate;
    }
    v.per_init.push_back(std::move(iv));
  }
  v.dr = detail::join_directions(drs);
  v.cdr = detail::join_directions(cdrs);
  return v;
}

}  // namespace iffm

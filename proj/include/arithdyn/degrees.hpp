#pragma once

// Estimators over orbit height data: arithmetic degrees, the inequality
// alpha <= delta, the growth constant, canonical heights with an explicit
// truncation radius, orbit counting, and the sqrt-perturbed linear
// recursion bound.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "height_sequence.hpp"
#include "heights.hpp"
#include "projmaps.hpp"

namespace arithdyn {

// ---------------------------------------------------------------------------
// Height sequences from orbits

/// h(f^n P) for n = 0..nmax. A closed orbit is extended periodically.
/// An orbit cut short by indeterminacy yields only the known prefix.
inline HeightSequence height_sequence(const OrbitRecord& orb, std::string source = {}) {
  std::vector<double> h;
  const std::size_t len = orb.known_length();
  h.reserve(len);
  for (std::size_t n = 0; n < len; ++n) h.push_back(orb.height_at(n).value);
  return HeightSequence::from_heights(std::move(h), std::move(source));
}

/// c >= 0 with h+(f(Q)) + c <= d (h+(Q) + c) for every Q where f is defined:
/// |F_i(x)| <= T M max|x_j|^d, so c = log(T M) / (d - 1).
/// Zero when d = 1 (no such shift exists) or when T M = 1.
inline double height_growth_slack(const RationalMapPN& f) {
  if (f.degree() < 2) return 0.0;
  std::size_t t = 0;
  for (const auto& p : f.polys()) t = std::max(t, p.size());
  const double log_tm = std::log(static_cast<double>(t)) + log_abs(f.max_abs_coeff());
  if (log_tm <= 0) return 0.0;
  return std::nextafter(log_tm / (f.degree() - 1), INFINITY);
}

// ---------------------------------------------------------------------------
// Arithmetic degrees

struct ArithDegreeEstimate {
  double upper_est = 1.0;
  double lower_est = 1.0;
  std::size_t tail_start = 0;
  bool converged = false;
  double spread = 0.0;
  double naive_root = 1.0;  // h+(f^nmax P)^{1/nmax}
  double slack = 0.0;
  std::vector<double> tail_values;
};

/// Over the tail window n >= tail_start,
///   b_n = ((h+_n + c) / (h+_m + c))^{1/(n-m)},  m = floor(n/2),
/// which tends to the same limit as h+_n^{1/n} without the h(P)^{1/n}
/// factor. With c from height_growth_slack, b_n <= deg f.
inline ArithDegreeEstimate arithdeg_estimate(const HeightSequence& hs, double tail_fraction = 0.5,
                                             double slack = 0.0,
                                             double convergence_spread = 0.05) {
  const std::size_t nmax = hs.nmax();
  if (hs.hplus_values.size() < 5) throw ContractViolation("arithdeg_estimate needs nmax >= 4");
  if (!(tail_fraction > 0 && tail_fraction <= 1)) throw ContractViolation("tail fraction out of (0, 1]");
  if (!(slack >= 0)) throw ContractViolation("slack must be nonnegative");
  ArithDegreeEstimate est;
  est.slack = slack;
  auto tail_len = static_cast<std::size_t>(std::floor(tail_fraction * static_cast<double>(nmax)));
  tail_len = std::clamp<std::size_t>(tail_len, 1, nmax - 1);
  est.tail_start = nmax - tail_len;
  const auto& hp = hs.hplus_values;
  for (std::size_t n = est.tail_start; n <= nmax; ++n) {
    const std::size_t m = n / 2;
    const double r = (hp[n] + slack) / (hp[m] + slack);
    est.tail_values.push_back(r == 1.0 ? 1.0 : std::pow(r, 1.0 / static_cast<double>(n - m)));
  }
  auto [lo, hi] = std::minmax_element(est.tail_values.begin(), est.tail_values.end());
  est.lower_est = std::max(1.0, *lo);
  est.upper_est = std::max(1.0, *hi);
  est.spread = est.upper_est - est.lower_est;
  est.converged = est.spread <= convergence_spread;
  est.naive_root = std::pow(hp[nmax], 1.0 / static_cast<double>(nmax));
  return est;
}

/// The degrees depend only on the eventual orbit: estimates for P and f^k(P)
/// agree within tol at both ends.
inline bool tail_invariance_check(const HeightSequence& hs_p, const HeightSequence& hs_fkp,
                                  double tol = 1e-2, double slack = 0.0) {
  auto a = arithdeg_estimate(hs_p, 0.5, slack);
  auto b = arithdeg_estimate(hs_fkp, 0.5, slack);
  return std::abs(a.upper_est - b.upper_est) <= tol && std::abs(a.lower_est - b.lower_est) <= tol;
}

struct InequalityReport {
  bool consistent = true;
  double margin = 0.0;  // delta_upper - lower_est
  double lower_est = 0.0;
  double delta_upper = 0.0;
};

/// One-directional: only lower_est > delta_upper + tol is a violation.
inline InequalityReport fundamental_inequality_check(const ArithDegreeEstimate& est,
                                                     double delta_upper, double tol = 1e-6) {
  InequalityReport r;
  r.lower_est = est.lower_est;
  r.delta_upper = delta_upper;
  r.margin = delta_upper - est.lower_est;
  r.consistent = !(est.lower_est > delta_upper + tol);
  return r;
}

// ---------------------------------------------------------------------------
// Growth constant

struct GrowthFit {
  double epsilon = 0.1;
  double delta_used = 1.0;
  double C_fit = 1.0;
  std::vector<double> profile;  // running max of h+_n / ((delta+eps)^n h+_0)
  std::size_t n_first = 0, n_last = 0;

  /// Bounded profile: the final value at most twice the value at nmax/2.
  bool conforming() const {
    if (profile.empty()) return true;
    return profile.back() <= 2.0 * profile[(profile.size() - 1) / 2];
  }
};

inline GrowthFit growth_fit(const HeightSequence& hs, double delta_upper, double epsilon) {
  if (hs.hplus_values.size() < 2) throw ContractViolation("growth_fit needs nmax >= 1");
  if (!(epsilon > 0)) throw ContractViolation("epsilon must be positive");
  GrowthFit g;
  g.epsilon = epsilon;
  g.delta_used = delta_upper;
  g.n_first = 0;
  g.n_last = hs.nmax();
  const double log_rate = std::log(delta_upper + epsilon);
  const double log_h0 = std::log(hs.hplus_values[0]);
  double run = 0.0;
  for (std::size_t n = 0; n < hs.hplus_values.size(); ++n) {
    double v = std::exp(std::log(hs.hplus_values[n]) - log_h0 - n * log_rate);
    run = std::max(run, v);
    g.profile.push_back(run);
  }
  g.C_fit = run;
  return g;
}

// ---------------------------------------------------------------------------
// Canonical heights

enum class CanhtMode { certified_p1, certified_power, heuristic };

inline const char* to_string(CanhtMode m) {
  switch (m) {
    case CanhtMode::certified_p1: return "certified_p1";
    case CanhtMode::certified_power: return "certified_power";
    case CanhtMode::heuristic: return "heuristic";
  }
  return "?";
}

struct CanonicalHeightResult {
  double value = 0.0;
  double error_radius = 0.0;
  double beta = 0.0;
  std::size_t n_used = 0;
  CanhtMode mode = CanhtMode::heuristic;
  double c_step = 0.0;          // bound for |h(f Q) - beta h(Q)| along the orbit
  bool preperiodic = false;     // the orbit closed up; value is exactly 0
  std::optional<double> gamma;  // (delta + eps) / beta^2, heuristic diagnostics only
  std::vector<double> partials; // beta^{-k} h(f^k P), k = 0..n_used

  bool certified() const { return mode != CanhtMode::heuristic; }
};

/// From h_k = h(f^k P), k = 0..n:
///   value = beta^{-n} h_n,  error_radius = c_step beta^{-n} / (beta - 1).
/// The partial sums telescope with increments bounded by c_step beta^{-k-1}.
inline CanonicalHeightResult canonical_height_from_heights(std::span<const double> h, double beta,
                                                           double c_step, CanhtMode mode) {
  if (!(beta > 1)) throw ContractViolation("canonical height needs beta > 1");
  if (h.empty()) throw ContractViolation("empty height sequence");
  CanonicalHeightResult r;
  r.beta = beta;
  r.mode = mode;
  r.c_step = c_step;
  r.n_used = h.size() - 1;
  double scale = 1.0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    r.partials.push_back(h[k] * scale);
    scale /= beta;
  }
  r.value = r.partials.back();
  r.error_radius = c_step * (scale * beta) / (beta - 1.0);
  return r;
}

namespace detail {
inline double observed_step_error(std::span<const double> h, double beta) {
  double c = 0.0;
  for (std::size_t k = 0; k + 1 < h.size(); ++k) c = std::max(c, std::abs(h[k + 1] - beta * h[k]));
  return c;
}
}  // namespace detail

inline CanhtMode certified_mode_for(const RationalMapPN& f, double beta) {
  if (beta != static_cast<double>(f.degree()))
    throw ContractViolation("certified mode requires beta = deg f");
  if (f.is_power_map()) return CanhtMode::certified_power;
  if (f.dim() == 1 && is_morphism_p1(f)) return CanhtMode::certified_p1;
  throw ContractViolation("certified mode requires a power map or a morphism of P^1");
}

/// The certified step constant for f, or nullopt in heuristic mode.
inline std::optional<double> certified_step_constant(const RationalMapPN& f, CanhtMode mode) {
  switch (mode) {
    case CanhtMode::certified_power: return 0.0;
    case CanhtMode::certified_p1: return p1_step_constants(f).c_step();
    case CanhtMode::heuristic: return std::nullopt;
  }
  return std::nullopt;
}

/// ĥ(f^shift P) from an orbit record with at least n + shift + 1 known
/// points. A closed orbit gives ĥ = 0 exactly.
inline CanonicalHeightResult canonical_height(const OrbitRecord& orb, double beta, CanhtMode mode,
                                              std::optional<double> c_step, std::size_t n,
                                              std::size_t shift = 0,
                                              std::optional<double> delta_upper = std::nullopt,
                                              double epsilon = 0.1) {
  if (!(beta > 1)) throw ContractViolation("canonical height needs beta > 1");
  if (orb.terminated_by == OrbitEnd::hit_indeterminacy && orb.points.size() < n + shift + 1)
    throw IndeterminatePoint("orbit reaches the indeterminacy locus at step " +
                             std::to_string(orb.step));
  if (orb.terminated_by == OrbitEnd::cycle_detected) {
    CanonicalHeightResult r;
    r.beta = beta;
    r.mode = mode;
    r.c_step = c_step.value_or(0.0);
    r.n_used = n;
    r.preperiodic = true;
    double scale = 1.0;
    for (std::size_t k = 0; k <= n; ++k) {
      r.partials.push_back(orb.height_at(k + shift).value * scale);
      scale /= beta;
    }
    return r;
  }
  if (orb.points.size() < n + shift + 1) throw ContractViolation("orbit shorter than requested n");
  std::vector<double> h;
  for (std::size_t k = 0; k <= n; ++k) h.push_back(orb.heights[k + shift].value);
  const double c = c_step ? *c_step : detail::observed_step_error(h, beta);
  auto r = canonical_height_from_heights(h, beta, c, mode);
  if (mode == CanhtMode::heuristic && delta_upper) r.gamma = (*delta_upper + epsilon) / (beta * beta);
  return r;
}

/// Runs the orbit itself. certified = true selects certified_power or
/// certified_p1 and rejects other maps.
inline CanonicalHeightResult canonical_height(const RationalMapPN& f, const ProjPointQ& p,
                                              double beta, std::size_t nmax, bool certified) {
  CanhtMode mode = certified ? certified_mode_for(f, beta) : CanhtMode::heuristic;
  auto orb = orbit(f, p, nmax);
  return canonical_height(orb, beta, mode, certified_step_constant(f, mode), nmax);
}

struct CanhtLawReport {
  bool transform_ok = false;      // |v1 - beta v0| <= r1 + beta r0
  bool transform_sum_ok = false;  // |v1 - beta v0| <= r1 + r0
  double transform_gap = 0.0;
  bool height_gap_ok = false;  // |ĥ(P) - h(P)| <= c_step / (beta - 1)
  double height_gap = 0.0;
  bool arithdeg_checked = false;
  bool arithdeg_ok = true;  // lower_est >= beta - tol when ĥ(P) > radius;
                            // tol defaults to the convergence spread
  bool certified = false;

  bool all_ok() const { return transform_ok && height_gap_ok && arithdeg_ok; }
};

inline CanhtLawReport canht_functional_checks(double h_p, const CanonicalHeightResult& at_p,
                                              const CanonicalHeightResult& at_fp,
                                              const std::optional<ArithDegreeEstimate>& alpha = {},
                                              double alpha_tol = 0.05) {
  if (at_p.beta != at_fp.beta) throw ContractViolation("results use different beta");
  const double beta = at_p.beta;
  CanhtLawReport r;
  r.certified = at_p.certified() && at_fp.certified();
  // Allowance for rounding in the logs; the radii themselves may be 0.
  auto rounding = [](double scale) { return 1e-12 * std::max(1.0, scale); };
  r.transform_gap = std::abs(at_fp.value - beta * at_p.value);
  const double t_round = rounding(std::abs(at_fp.value) + beta * std::abs(at_p.value));
  r.transform_ok = r.transform_gap <= at_fp.error_radius + beta * at_p.error_radius + t_round;
  r.transform_sum_ok = r.transform_gap <= at_fp.error_radius + at_p.error_radius + t_round;
  r.height_gap = std::abs(at_p.value - h_p);
  r.height_gap_ok = r.height_gap <= at_p.c_step / (beta - 1.0) + rounding(std::abs(at_p.value) + std::abs(h_p));
  if (at_p.value > at_p.error_radius && alpha) {
    r.arithdeg_checked = true;
    r.arithdeg_ok = alpha->lower_est >= beta - alpha_tol;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Preperiodic points

enum class PreperiodicKind { preperiodic, wandering, undecided };

inline const char* to_string(PreperiodicKind k) {
  switch (k) {
    case PreperiodicKind::preperiodic: return "preperiodic";
    case PreperiodicKind::wandering: return "wandering";
    case PreperiodicKind::undecided: return "undecided";
  }
  return "?";
}

struct PreperiodicVerdict {
  PreperiodicKind kind = PreperiodicKind::undecided;
  std::size_t period = 0;
  std::size_t preperiod = 0;
};

/// An exact cycle in the orbit wins; otherwise a certified ĥ bounded away
/// from 0 proves the point wandering.
inline PreperiodicVerdict preperiodic_detect(const OrbitRecord& orb,
                                             const std::optional<CanonicalHeightResult>& ch = {}) {
  PreperiodicVerdict v;
  if (orb.terminated_by == OrbitEnd::cycle_detected) {
    v.kind = PreperiodicKind::preperiodic;
    v.period = orb.period;
    v.preperiod = orb.preperiod;
    return v;
  }
  if (ch && ch->certified() && ch->value - ch->error_radius > 0) v.kind = PreperiodicKind::wandering;
  return v;
}

// ---------------------------------------------------------------------------
// Counting function

struct CountingRow {
  double B = 0.0;  // bound on the log-height scale
  std::size_t count = 0;
  double ratio = 0.0;  // count / log B
};

struct CountingResult {
  std::vector<CountingRow> rows;
  std::optional<std::string> warning;
  double predicted_limit = std::numeric_limits<double>::infinity();  // 1 / log alpha
};

/// #{n <= nmax : h(f^n P) <= B} for each B > 1. The orbit points are taken
/// as distinct, so pass the sequence up to the first repeat.
inline CountingResult counting_function(const HeightSequence& hs, std::span<const double> b_values,
                                        double slack = 0.0) {
  CountingResult res;
  std::optional<double> alpha;
  if (hs.hplus_values.size() >= 5) alpha = arithdeg_estimate(hs, 0.5, slack).lower_est;
  if (!alpha || *alpha <= 1.0) {
    res.warning = "arithmetic degree estimate <= 1: the ratio has no finite limit";
  } else {
    res.predicted_limit = 1.0 / std::log(*alpha);
  }
  for (double b : b_values) {
    if (!(b > 1)) throw ContractViolation("counting bound B must exceed 1");
    CountingRow row;
    row.B = b;
    row.count = static_cast<std::size_t>(
        std::count_if(hs.heights.begin(), hs.heights.end(), [b](double h) { return h <= b; }));
    row.ratio = static_cast<double>(row.count) / std::log(b);
    res.rows.push_back(row);
  }
  return res;
}

// ---------------------------------------------------------------------------
// Perturbed linear recursion

enum class LemmaVerdict { holds, fails, inapplicable };

inline const char* to_string(LemmaVerdict v) {
  switch (v) {
    case LemmaVerdict::holds: return "holds";
    case LemmaVerdict::fails: return "fails";
    case LemmaVerdict::inapplicable: return "inapplicable";
  }
  return "?";
}

struct LemmaReport {
  LemmaVerdict verdict = LemmaVerdict::holds;
  std::size_t first_bad = 0;  // index of the first failing step or bound
};

/// The step hypothesis h_{n+1} <= a h_n + c sqrt(h_n) is checked first;
/// then h_n <= a^n (h_0 + (2 sqrt2 c)^n sqrt(h_0)), compared in log space.
inline LemmaReport lemma_a1_check(double a, double c, std::span<const double> h,
                                  double rel_tol = 1e-12) {
  if (!(a >= 1) || !(c >= 1)) throw ContractViolation("need a >= 1 and c >= 1");
  if (h.empty()) throw ContractViolation("empty sequence");
  for (double v : h)
    if (!(v >= 0)) throw ContractViolation("heights must be nonnegative");
  LemmaReport rep;
  for (std::size_t n = 0; n + 1 < h.size(); ++n) {
    if (h[n + 1] > (a * h[n] + c * std::sqrt(h[n])) * (1 + rel_tol)) {
      rep.verdict = LemmaVerdict::inapplicable;
      rep.first_bad = n + 1;
      return rep;
    }
  }
  const double h0 = h[0];
  const double log_k = std::log(2.0 * std::sqrt(2.0) * c);
  for (std::size_t n = 0; n < h.size(); ++n) {
    if (h[n] == 0) continue;
    if (h0 == 0) {
      rep.verdict = LemmaVerdict::fails;
      rep.first_bad = n;
      return rep;
    }
    const double nn = static_cast<double>(n);
    // log(h0 + K^n sqrt h0) = logaddexp(log h0, n log K + log h0 / 2)
    const double x = std::log(h0), y = nn * log_k + 0.5 * std::log(h0);
    const double lse = std::max(x, y) + std::log1p(std::exp(-std::abs(x - y)));
    const double log_bound = nn * std::log(a) + lse;
    if (std::log(h[n]) > log_bound + rel_tol * std::max(1.0, std::abs(log_bound))) {
      rep.verdict = LemmaVerdict::fails;
      rep.first_bad = n;
      return rep;
    }
  }
  return rep;
}

}  // namespace arithdyn

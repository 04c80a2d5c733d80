#pragma once

// Rational self-maps of P^N over Q: evaluation with indeterminacy
// detection, gcd-normalized composition, degree sequences, orbits with
// exact heights, and morphism certification on P^1.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "heights.hpp"
#include "matrix_spectral.hpp"
#include "poly.hpp"

namespace arithdyn {

/// f = [F_0 : ... : F_N]. The constructor divides out the common factor of
/// the F_i (polynomial gcd and integer content) and makes the leading
/// coefficient of the first nonzero F_i positive, so equal maps have equal
/// representations.
class RationalMapPN {
 public:
  RationalMapPN(std::vector<MultiPoly> polys, std::string name = {},
                std::vector<std::string> vars = {})
      : polys_(std::move(polys)), name_(std::move(name)), vars_(std::move(vars)) {
    const std::size_t n = polys_.size();
    if (n < 2) throw ContractViolation("a self-map of P^N needs N+1 >= 2 polynomials");
    int d = -1;
    for (const auto& p : polys_) {
      if (p.nvars() != n) throw ContractViolation("polynomials must have N+1 variables");
      if (p.is_zero()) continue;
      if (d >= 0 && p.degree() != d) throw ContractViolation("polynomials of different degree");
      d = p.degree();
    }
    if (d < 0) throw ContractViolation("all polynomials are zero");
    if (vars_.empty()) vars_ = default_var_names(n);
    if (vars_.size() != n) throw ContractViolation("variable name count mismatch");

    MultiPoly g = poly_gcd(std::span<const MultiPoly>(polys_));
    if (g.degree() > 0) {
      for (auto& p : polys_)
        if (!p.is_zero()) p = *poly_divide_exact(p, g);
    }
    ExactInt c = 0;
    for (const auto& p : polys_)
      if (!p.is_zero()) c = gcd_int(c, poly_content(p));
    for (const auto& p : polys_)
      if (!p.is_zero()) {
        if (p.leading().coeff < 0) c = -c;
        break;
      }
    if (c != 1)
      for (auto& p : polys_) {
        auto terms = p.terms();
        for (auto& t : terms) mpz_divexact(t.coeff.get_mpz_t(), t.coeff.get_mpz_t(), c.get_mpz_t());
        p = MultiPoly::from_canonical(n, std::move(terms));
      }
    degree_ = 0;
    for (const auto& p : polys_)
      if (!p.is_zero()) degree_ = p.degree();
    if (degree_ < 1) throw ContractViolation("map is constant after removing the common factor");
  }

  std::size_t dim() const { return polys_.size() - 1; }
  int degree() const { return degree_; }
  const std::vector<MultiPoly>& polys() const { return polys_; }
  const std::string& name() const { return name_; }
  const std::vector<std::string>& vars() const { return vars_; }

  bool operator==(const RationalMapPN& o) const { return polys_ == o.polys_; }

  std::size_t term_count() const {
    std::size_t t = 0;
    for (const auto& p : polys_) t += p.size();
    return t;
  }

  std::size_t max_coeff_bits() const {
    std::size_t b = 0;
    for (const auto& p : polys_) b = std::max(b, p.max_coeff_bits());
    return b;
  }

  ExactInt max_abs_coeff() const {
    ExactInt m = 0;
    for (const auto& p : polys_) m = std::max(m, p.max_abs_coeff());
    return m;
  }

  /// [x_0^d : ... : x_N^d]; then h(f(P)) = d h(P) exactly.
  bool is_power_map() const {
    for (std::size_t i = 0; i < polys_.size(); ++i) {
      const auto& p = polys_[i];
      if (p.size() != 1 || p.leading().coeff != 1 ||
          p.leading().exp[i] != static_cast<std::uint32_t>(degree_))
        return false;
    }
    return true;
  }

  std::string to_string() const {
    std::string s = "[";
    for (std::size_t i = 0; i < polys_.size(); ++i) {
      if (i) s += " : ";
      s += arithdyn::to_string(polys_[i], vars_);
    }
    return s + "]";
  }

  static RationalMapPN identity(std::size_t dim) {
    std::vector<MultiPoly> ps;
    for (std::size_t i = 0; i <= dim; ++i) ps.push_back(MultiPoly::variable(dim + 1, i));
    return RationalMapPN(std::move(ps), "id");
  }

 private:
  std::vector<MultiPoly> polys_;
  std::string name_;
  std::vector<std::string> vars_;
  int degree_ = 0;
};

/// f(P), or nullopt if every coordinate vanishes (P in I_f).
inline std::optional<ProjPointQ> try_evaluate(const RationalMapPN& f, const ProjPointQ& p) {
  if (p.dim() != f.dim()) throw ContractViolation("point and map dimensions differ");
  std::vector<ExactInt> out;
  out.reserve(f.polys().size());
  bool any = false;
  for (const auto& poly : f.polys()) {
    out.push_back(poly_eval(poly, std::span<const ExactInt>(p.coords())));
    any = any || out.back() != 0;
  }
  if (!any) return std::nullopt;
  return ProjPointQ::from_integers(std::move(out));
}

inline ProjPointQ map_evaluate(const RationalMapPN& f, const ProjPointQ& p) {
  auto r = try_evaluate(f, p);
  if (!r) throw IndeterminatePoint(p.to_string());
  return *r;
}

/// g o f with the common factor divided out.
inline RationalMapPN compose_normalized(const RationalMapPN& g, const RationalMapPN& f) {
  if (g.dim() != f.dim()) throw ContractViolation("maps on different projective spaces");
  std::vector<MultiPoly> out;
  out.reserve(g.polys().size());
  for (const auto& p : g.polys()) out.push_back(poly_compose(p, f.polys()));
  return RationalMapPN(std::move(out), {}, f.vars());
}

struct ResourceCaps {
  std::size_t max_coeff_bits = 1u << 16;
  std::size_t max_terms = 1u << 18;
};

/// f, f^2, f^3, ... with f^{n+1} = f o f^n, computed once and cached.
/// Not shared between threads; each caller owns its tower.
class IterateTower {
 public:
  explicit IterateTower(RationalMapPN f, ResourceCaps caps = {}) : caps_(caps) {
    iterates_.push_back(std::move(f));
  }

  const RationalMapPN& base() const { return iterates_.front(); }
  std::size_t computed() const { return iterates_.size(); }

  /// f^n for n >= 1; throws ResourceCapExceeded if an iterate outgrows the caps.
  const RationalMapPN& iterate(std::size_t n) {
    if (n == 0) throw ContractViolation("iterate index starts at 1");
    while (iterates_.size() < n) {
      RationalMapPN next = compose_normalized(base(), iterates_.back());
      if (next.term_count() > caps_.max_terms || next.max_coeff_bits() > caps_.max_coeff_bits)
        throw ResourceCapExceeded("iterate " + std::to_string(iterates_.size() + 1) +
                                  " exceeds resource caps");
      iterates_.push_back(std::move(next));
    }
    return iterates_[n - 1];
  }

 private:
  ResourceCaps caps_;
  std::vector<RationalMapPN> iterates_;
};

struct DegreeSequence {
  std::string label;
  std::vector<ExactInt> degs;  // degs[n-1] = deg f^n
  bool truncated = false;
  std::string truncation_reason;

  std::size_t nmax() const { return degs.size(); }
  const ExactInt& deg(std::size_t n) const { return degs.at(n - 1); }
};

inline DegreeSequence degree_sequence(const RationalMapPN& f, std::size_t nmax,
                                      ResourceCaps caps = {}) {
  if (nmax < 1) throw ContractViolation("nmax must be at least 1");
  DegreeSequence seq;
  seq.label = f.name();
  IterateTower tower(f, caps);
  for (std::size_t n = 1; n <= nmax; ++n) {
    try {
      seq.degs.emplace_back(tower.iterate(n).degree());
    } catch (const ResourceCapExceeded& e) {
      seq.truncated = true;
      seq.truncation_reason = e.what();
      break;
    }
  }
  return seq;
}

struct DynDegreeEstimate {
  std::vector<double> upper_bounds;  // deg(f^n)^{1/n}, rounded up
  double certified_upper = 0.0;      // min of upper_bounds (Fekete)
  bool certified = false;            // submultiplicativity verified
  std::optional<double> ratio;       // deg f^n / deg f^{n-1}; heuristic only
};

/// On P^N, deg(f^{m+n}) <= deg(f^m) deg(f^n), so by Fekete every
/// deg(f^n)^{1/n} bounds delta_f from above.
inline DynDegreeEstimate dyndeg_estimate(const DegreeSequence& seq) {
  if (seq.degs.empty()) throw ContractViolation("empty degree sequence");
  DynDegreeEstimate est;
  for (std::size_t n = 1; n <= seq.nmax(); ++n)
    est.upper_bounds.push_back(detail::root_up(seq.deg(n), static_cast<unsigned>(n)));
  auto fk = fekete_limit(std::span<const ExactInt>(seq.degs));
  est.certified_upper = fk.inf_estimate;
  est.certified = fk.certified;
  if (seq.nmax() >= 2) est.ratio = ExactRat(seq.degs.back(), seq.degs[seq.nmax() - 2]).get_d();
  return est;
}

// ---------------------------------------------------------------------------
// Orbits

enum class OrbitEnd { reached_nmax, hit_indeterminacy, cycle_detected };

inline const char* to_string(OrbitEnd e) {
  switch (e) {
    case OrbitEnd::reached_nmax: return "reached_nmax";
    case OrbitEnd::hit_indeterminacy: return "hit_indeterminacy";
    case OrbitEnd::cycle_detected: return "cycle_detected";
  }
  return "?";
}

struct OrbitRecord {
  std::vector<ProjPointQ> points;  // P, f(P), ..., all distinct
  std::vector<HeightValue> heights;
  OrbitEnd terminated_by = OrbitEnd::reached_nmax;
  std::size_t step = 0;       // index of the point that could not be mapped
  std::size_t period = 0;     // cycle_detected only
  std::size_t preperiod = 0;  // cycle_detected only
  std::size_t nmax = 0;

  /// f^n(P) for any n when the orbit closed up; otherwise n < points.size().
  const ProjPointQ& point_at(std::size_t n) const {
    if (n < points.size()) return points[n];
    if (terminated_by != OrbitEnd::cycle_detected) throw std::out_of_range("orbit index");
    return points[preperiod + (n - preperiod) % period];
  }
  const HeightValue& height_at(std::size_t n) const {
    if (n < heights.size()) return heights[n];
    if (terminated_by != OrbitEnd::cycle_detected) throw std::out_of_range("orbit index");
    return heights[preperiod + (n - preperiod) % period];
  }
  /// Number of indices n <= nmax with known f^n(P).
  std::size_t known_length() const {
    return terminated_by == OrbitEnd::cycle_detected ? nmax + 1 : points.size();
  }
};

/// Iterates f from P. Stops on indeterminacy or at the first exact repeat
/// of a normalized point.
inline OrbitRecord orbit(const RationalMapPN& f, const ProjPointQ& p, std::size_t nmax) {
  OrbitRecord rec;
  rec.nmax = nmax;
  std::map<ProjPointQ, std::size_t> seen;
  rec.points.push_back(p);
  rec.heights.push_back(weil_height(p));
  seen.emplace(p, 0);
  for (std::size_t n = 1; n <= nmax; ++n) {
    auto next = try_evaluate(f, rec.points.back());
    if (!next) {
      rec.terminated_by = OrbitEnd::hit_indeterminacy;
      rec.step = n - 1;
      return rec;
    }
    auto it = seen.find(*next);
    if (it != seen.end()) {
      rec.terminated_by = OrbitEnd::cycle_detected;
      rec.preperiod = it->second;
      rec.period = n - it->second;
      rec.step = n;
      return rec;
    }
    seen.emplace(*next, n);
    rec.heights.push_back(weil_height(*next));
    rec.points.push_back(std::move(*next));
  }
  rec.step = nmax;
  return rec;
}

// ---------------------------------------------------------------------------
// P^1: resultants and morphism certificates

namespace detail {
/// Coefficients of a binary form of degree d, by descending power of x.
inline std::vector<ExactInt> binary_coeffs(const MultiPoly& f, int d) {
  std::vector<ExactInt> c(static_cast<std::size_t>(d) + 1);
  for (const auto& t : f.terms()) c[t.exp[1]] = t.coeff;
  return c;
}

inline void require_binary_pair(const MultiPoly& f0, const MultiPoly& f1) {
  if (f0.nvars() != 2 || f1.nvars() != 2) throw ContractViolation("binary forms expected");
  if (f0.is_zero() || f1.is_zero()) throw ContractViolation("degenerate (zero) form");
  if (f0.degree() != f1.degree() || f0.degree() < 1)
    throw ContractViolation("forms must share a degree d >= 1");
}

inline std::vector<std::vector<ExactInt>> sylvester_matrix(const MultiPoly& f0, const MultiPoly& f1) {
  const int d = f0.degree();
  const auto a = binary_coeffs(f0, d), b = binary_coeffs(f1, d);
  const std::size_t n = 2 * static_cast<std::size_t>(d);
  std::vector<std::vector<ExactInt>> s(n, std::vector<ExactInt>(n));
  for (std::size_t i = 0; i < static_cast<std::size_t>(d); ++i)
    for (std::size_t k = 0; k <= static_cast<std::size_t>(d); ++k) {
      s[i][i + k] = a[k];
      s[d + i][i + k] = b[k];
    }
  return s;
}
}  // namespace detail

/// det of the 2d x 2d Sylvester matrix of two binary forms of degree d.
inline ExactInt sylvester_resultant(const MultiPoly& f0, const MultiPoly& f1) {
  detail::require_binary_pair(f0, f1);
  return detail::bareiss_det(detail::sylvester_matrix(f0, f1));
}

inline bool is_morphism_p1(const RationalMapPN& f) {
  if (f.dim() != 1)
    throw UnsupportedDimension("morphism test is only implemented on P^1");
  if (f.polys()[0].is_zero() || f.polys()[1].is_zero()) return false;
  return sylvester_resultant(f.polys()[0], f.polys()[1]) != 0;
}

/// Explicit constants for a P^1 morphism f of degree d with
///   d h(Q) - c_low <= h(f(Q)) <= d h(Q) + c_up   for all Q in P^1(Q).
/// c_up = log((d+1) max|coeff|). c_low = log(2 d G) where G bounds the
/// coefficients of forms G_ij with G_0j F_0 + G_1j F_1 = Res x_j^{2d-1};
/// the gcd of F_0(x,y), F_1(x,y) divides Res, which cancels.
struct P1StepConstants {
  ExactInt resultant;
  ExactInt cofactor_max;
  double c_up = 0, c_low = 0;
  double c_step() const { return std::max(c_up, c_low); }
};

inline P1StepConstants p1_step_constants(const RationalMapPN& f) {
  if (!is_morphism_p1(f)) throw ContractViolation("map is not a morphism of P^1");
  const int d = f.degree();
  const auto& f0 = f.polys()[0];
  const auto& f1 = f.polys()[1];
  P1StepConstants k;
  k.resultant = sylvester_resultant(f0, f1);
  const auto s = detail::sylvester_matrix(f0, f1);
  const std::size_t n = s.size();
  // Unknowns: coefficients of G_0 then G_1 (degree d-1, descending x);
  // the coefficient map is the transpose of the Sylvester matrix.
  std::vector<std::vector<ExactRat>> m(n, std::vector<ExactRat>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m[i][j] = s[j][i];
  k.cofactor_max = 0;
  for (std::size_t target : {std::size_t{0}, n - 1}) {
    std::vector<ExactRat> rhs(n, ExactRat(0));
    rhs[target] = ExactRat(k.resultant);
    for (const auto& g : detail::solve_rational(m, rhs)) {
      if (g.get_den() != 1) throw std::logic_error("non-integral Bezout cofactor");
      k.cofactor_max = std::max(k.cofactor_max, abs_int(g.get_num()));
    }
  }
  k.c_up = std::log(static_cast<double>(d + 1)) + log_abs(f.max_abs_coeff());
  k.c_low = std::log(2.0 * d) + log_abs(k.cofactor_max);
  // round the logs outward a little
  k.c_up = std::nextafter(k.c_up * (1 + 1e-15), INFINITY);
  k.c_low = std::nextafter(k.c_low * (1 + 1e-15), INFINITY);
  return k;
}

}  // namespace arithdyn

#pragma once

// MultiPoly: sparse homogeneous polynomials over Z in a fixed number of
// variables, terms kept in descending graded-lex order.

#include <cctype>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "detail/gcd.hpp"
#include "detail/terms.hpp"
#include "exact.hpp"

namespace arithdyn {

class MultiPoly {
 public:
  /// The zero polynomial in `nvars` variables.
  explicit MultiPoly(std::size_t nvars = 1) : nvars_(nvars) {}

  /// Builds a canonical polynomial; throws ContractViolation unless every
  /// exponent vector has `nvars` entries and the same total degree.
  static MultiPoly from_terms(std::size_t nvars, std::vector<Term> terms) {
    for (const auto& t : terms)
      if (t.exp.size() != nvars) throw ContractViolation("exponent vector length mismatch");
    return from_canonical(nvars, detail::canonical(std::move(terms)));
  }

  static MultiPoly monomial(std::size_t nvars, ExactInt c, Exponent e) {
    if (e.size() != nvars) throw ContractViolation("exponent vector length mismatch");
    return from_canonical(nvars, detail::monomial(nvars, std::move(c), std::move(e)));
  }

  static MultiPoly constant(std::size_t nvars, ExactInt c) {
    return from_canonical(nvars, detail::constant(nvars, std::move(c)));
  }

  static MultiPoly variable(std::size_t nvars, std::size_t i) {
    Exponent e(nvars, 0);
    e.at(i) = 1;
    return monomial(nvars, 1, std::move(e));
  }

  std::size_t nvars() const { return nvars_; }
  /// Total degree; -1 marks the zero polynomial.
  int degree() const { return degree_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  const std::vector<Term>& terms() const { return terms_; }
  const Term& leading() const { return terms_.front(); }

  ExactInt max_abs_coeff() const {
    ExactInt m = 0;
    for (const auto& t : terms_) m = std::max(m, abs_int(t.coeff));
    return m;
  }

  std::size_t max_coeff_bits() const {
    std::size_t b = 0;
    for (const auto& t : terms_) b = std::max(b, bit_size(t.coeff));
    return b;
  }

  MultiPoly operator-() const {
    MultiPoly r = *this;
    for (auto& t : r.terms_) t.coeff = -t.coeff;
    return r;
  }

  bool operator==(const MultiPoly& o) const {
    return nvars_ == o.nvars_ && terms_ == o.terms_;
  }

  /// Internal: trusts `terms` to be canonical, still checks homogeneity.
  static MultiPoly from_canonical(std::size_t nvars, detail::TermList terms) {
    MultiPoly p(nvars);
    p.terms_ = std::move(terms);
    if (!p.terms_.empty()) {
      const auto d = total_degree(p.terms_.front().exp);
      for (const auto& t : p.terms_)
        if (total_degree(t.exp) != d) throw ContractViolation("polynomial is not homogeneous");
      p.degree_ = static_cast<int>(d);
    }
    return p;
  }

 private:
  std::size_t nvars_;
  int degree_ = -1;
  std::vector<Term> terms_;
};

namespace detail {
inline void require_same_nvars(const MultiPoly& p, const MultiPoly& q) {
  if (p.nvars() != q.nvars()) throw ContractViolation("number of variables differs");
}
}  // namespace detail

inline MultiPoly poly_add(const MultiPoly& p, const MultiPoly& q) {
  detail::require_same_nvars(p, q);
  if (!p.is_zero() && !q.is_zero() && p.degree() != q.degree())
    throw ContractViolation("adding polynomials of different degree");
  return MultiPoly::from_canonical(p.nvars(), detail::add(p.terms(), q.terms()));
}

inline MultiPoly poly_sub(const MultiPoly& p, const MultiPoly& q) { return poly_add(p, -q); }

inline MultiPoly poly_scale(const MultiPoly& p, const ExactInt& c) {
  return MultiPoly::from_canonical(p.nvars(), detail::scale(p.terms(), c));
}

inline MultiPoly poly_mul(const MultiPoly& p, const MultiPoly& q) {
  detail::require_same_nvars(p, q);
  return MultiPoly::from_canonical(p.nvars(), detail::mul(p.terms(), q.terms()));
}

inline MultiPoly poly_pow(const MultiPoly& p, unsigned e) {
  MultiPoly result = MultiPoly::constant(p.nvars(), 1), base = p;
  while (e) {
    if (e & 1u) result = poly_mul(result, base);
    e >>= 1u;
    if (e) base = poly_mul(base, base);
  }
  return result;
}

/// Exact quotient p / q, or nullopt when q does not divide p over Z.
inline std::optional<MultiPoly> poly_divide_exact(const MultiPoly& p, const MultiPoly& q) {
  detail::require_same_nvars(p, q);
  auto r = detail::divide_exact(p.terms(), q.terms());
  if (!r) return std::nullopt;
  return MultiPoly::from_canonical(p.nvars(), std::move(*r));
}

/// Positive gcd of the coefficients.
inline ExactInt poly_content(const MultiPoly& p) {
  if (p.is_zero()) throw ContractViolation("content of the zero polynomial");
  return detail::content(p.terms());
}

/// p divided by its content, sign chosen so the leading coefficient is
/// positive; hence p = ±content(p)·primitive_part(p).
inline MultiPoly poly_primitive_part(const MultiPoly& p) {
  if (p.is_zero()) throw ContractViolation("primitive part of the zero polynomial");
  return MultiPoly::from_canonical(p.nvars(), detail::primitive(p.terms()));
}

/// Primitive gcd over Z with positive leading coefficient.
inline MultiPoly poly_gcd(const MultiPoly& p, const MultiPoly& q) {
  detail::require_same_nvars(p, q);
  return MultiPoly::from_canonical(p.nvars(),
                                   detail::gcd_primitive(p.terms(), q.terms(), p.nvars()));
}

/// gcd of a family; zero members are skipped.
inline MultiPoly poly_gcd(std::span<const MultiPoly> ps) {
  if (ps.empty()) throw ContractViolation("gcd of an empty family");
  const std::size_t nv = ps.front().nvars();
  detail::TermList g;
  for (const auto& p : ps) {
    if (p.nvars() != nv) throw ContractViolation("number of variables differs");
    if (p.is_zero()) continue;
    g = g.empty() ? detail::primitive(p.terms()) : detail::gcd_primitive(g, p.terms(), nv);
    if (detail::is_constant(g)) break;
  }
  if (g.empty()) throw ContractViolation("gcd of zero polynomials");
  return MultiPoly::from_canonical(nv, std::move(g));
}

/// Substitutes subs[i] for variable i.
inline MultiPoly poly_compose(const MultiPoly& p, std::span<const MultiPoly> subs) {
  if (subs.size() != p.nvars()) throw ContractViolation("substitution length mismatch");
  const std::size_t nv = subs.front().nvars();
  int d = -1;
  for (const auto& s : subs) {
    if (s.nvars() != nv) throw ContractViolation("substitutions in different rings");
    if (s.is_zero()) continue;
    if (d >= 0 && s.degree() != d) throw ContractViolation("substitutions of mixed degree");
    d = s.degree();
  }
  if (p.is_zero()) return MultiPoly(nv);

  std::vector<std::uint32_t> maxexp(p.nvars(), 0);
  for (const auto& t : p.terms())
    for (std::size_t k = 0; k < p.nvars(); ++k) maxexp[k] = std::max(maxexp[k], t.exp[k]);
  std::vector<std::vector<detail::TermList>> powers(p.nvars());
  for (std::size_t k = 0; k < p.nvars(); ++k) {
    powers[k].push_back(detail::constant(nv, 1));
    for (std::uint32_t e = 1; e <= maxexp[k]; ++e)
      powers[k].push_back(detail::mul(powers[k].back(), subs[k].terms()));
  }
  detail::TermList acc;
  for (const auto& t : p.terms()) {
    detail::TermList prod = detail::constant(nv, t.coeff);
    for (std::size_t k = 0; k < p.nvars() && !prod.empty(); ++k)
      if (t.exp[k] > 0) prod = detail::mul(prod, powers[k][t.exp[k]]);
    acc = detail::add(acc, prod);
  }
  return MultiPoly::from_canonical(nv, std::move(acc));
}

template <class Num>
inline Num poly_eval_generic(const MultiPoly& p, std::span<const Num> point) {
  if (point.size() != p.nvars()) throw ContractViolation("point length mismatch");
  std::vector<std::vector<Num>> pw(p.nvars());
  for (const auto& t : p.terms())
    for (std::size_t k = 0; k < p.nvars(); ++k) {
      auto& v = pw[k];
      if (v.empty()) v.push_back(Num(1));
      while (v.size() <= t.exp[k]) v.push_back(v.back() * point[k]);
    }
  Num acc(0);
  for (const auto& t : p.terms()) {
    Num term(t.coeff);
    for (std::size_t k = 0; k < p.nvars(); ++k)
      if (t.exp[k]) term *= pw[k][t.exp[k]];
    acc += term;
  }
  return acc;
}

inline ExactRat poly_eval(const MultiPoly& p, std::span<const ExactRat> point) {
  ExactRat v = poly_eval_generic<ExactRat>(p, point);
  v.canonicalize();
  return v;
}

inline ExactInt poly_eval(const MultiPoly& p, std::span<const ExactInt> point) {
  return poly_eval_generic<ExactInt>(p, point);
}

// ---------------------------------------------------------------------------
// Text form: `c*x^e*y^f + ...`.

inline std::vector<std::string> default_var_names(std::size_t nvars) {
  std::vector<std::string> v;
  if (nvars <= 3) {
    static const char* xyz[] = {"x", "y", "z"};
    for (std::size_t i = 0; i < nvars; ++i) v.emplace_back(xyz[i]);
  } else {
    for (std::size_t i = 0; i < nvars; ++i) v.push_back("x" + std::to_string(i));
  }
  return v;
}

inline std::string to_string(const MultiPoly& p, const std::vector<std::string>& vars) {
  if (vars.size() != p.nvars()) throw ContractViolation("variable name count mismatch");
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& t : p.terms()) {
    ExactInt c = t.coeff;
    if (first) {
      if (c < 0) {
        os << "-";
        c = -c;
      }
    } else {
      os << (c < 0 ? " - " : " + ");
      if (c < 0) c = -c;
    }
    first = false;
    bool wrote = false;
    if (c != 1 || total_degree(t.exp) == 0) {
      os << c.get_str();
      wrote = true;
    }
    for (std::size_t k = 0; k < t.exp.size(); ++k) {
      if (t.exp[k] == 0) continue;
      if (wrote) os << "*";
      os << vars[k];
      if (t.exp[k] > 1) os << "^" << t.exp[k];
      wrote = true;
    }
  }
  return os.str();
}

inline std::string to_string(const MultiPoly& p) {
  return to_string(p, default_var_names(p.nvars()));
}

/// Parses the text form; variables must come from `vars`.
inline MultiPoly parse_poly(std::string_view text, const std::vector<std::string>& vars) {
  const std::string s = ascii_minus(text);
  const std::size_t nv = vars.size();
  std::size_t i = 0;
  auto skip = [&] {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  };
  auto read_uint = [&]() -> std::string {
    std::size_t j = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i == j) throw ParseError("expected a number at offset " + std::to_string(j));
    return s.substr(j, i - j);
  };
  detail::TermList terms;
  skip();
  bool first = true;
  while (i < s.size()) {
    int sign = 1;
    skip();
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
      sign = s[i] == '-' ? -1 : 1;
      ++i;
    } else if (!first) {
      throw ParseError("expected '+' or '-' at offset " + std::to_string(i));
    }
    first = false;
    Term t{ExactInt(sign), Exponent(nv, 0)};
    bool need_factor = true;
    while (need_factor) {
      skip();
      if (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
        t.coeff *= ExactInt(read_uint(), 10);
      } else {
        std::size_t j = i;
        while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_'))
          ++i;
        std::string name = s.substr(j, i - j);
        auto it = std::find(vars.begin(), vars.end(), name);
        if (name.empty() || it == vars.end())
          throw ParseError("unknown variable '" + name + "' at offset " + std::to_string(j));
        std::uint32_t e = 1;
        skip();
        if (i < s.size() && s[i] == '^') {
          ++i;
          skip();
          e = static_cast<std::uint32_t>(std::stoul(read_uint()));
        }
        t.exp[static_cast<std::size_t>(it - vars.begin())] += e;
      }
      skip();
      if (i < s.size() && s[i] == '*') {
        ++i;
      } else {
        need_factor = false;
      }
    }
    terms.push_back(std::move(t));
    skip();
  }
  if (first) throw ParseError("empty polynomial");
  return MultiPoly::from_terms(nv, std::move(terms));
}

}  // namespace arithdyn

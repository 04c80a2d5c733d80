#pragma once

// Sparse term lists over Z without any homogeneity requirement. MultiPoly
// wraps these; the gcd machinery works on them directly because contents
// and pseudo-remainders are not homogeneous in general.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <unordered_map>
#include <vector>

#include "../exact.hpp"

namespace arithdyn {

using Exponent = std::vector<std::uint32_t>;

struct Term {
  ExactInt coeff;
  Exponent exp;

  bool operator==(const Term& o) const { return coeff == o.coeff && exp == o.exp; }
};

inline std::uint64_t total_degree(const Exponent& e) {
  return std::accumulate(e.begin(), e.end(), std::uint64_t{0});
}

/// Graded lexicographic order, x0 > x1 > ... within a degree.
inline bool grlex_greater(const Exponent& a, const Exponent& b) {
  auto da = total_degree(a), db = total_degree(b);
  if (da != db) return da > db;
  return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

namespace detail {

using TermList = std::vector<Term>;

struct ExponentHash {
  std::size_t operator()(const Exponent& e) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (auto v : e) {
      h ^= v;
      h *= 1099511628211ull;
    }
    return h;
  }
};

/// Sorts, merges like terms and drops zero coefficients.
inline TermList canonical(TermList terms) {
  std::sort(terms.begin(), terms.end(),
            [](const Term& a, const Term& b) { return grlex_greater(a.exp, b.exp); });
  TermList out;
  out.reserve(terms.size());
  for (auto& t : terms) {
    if (!out.empty() && out.back().exp == t.exp)
      out.back().coeff += t.coeff;
    else
      out.push_back(std::move(t));
  }
  std::erase_if(out, [](const Term& t) { return t.coeff == 0; });
  return out;
}

inline TermList add(const TermList& a, const TermList& b, bool subtract = false) {
  TermList out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && grlex_greater(a[i].exp, b[j].exp))) {
      out.push_back(a[i++]);
    } else if (i == a.size() || grlex_greater(b[j].exp, a[i].exp)) {
      out.push_back(b[j++]);
      if (subtract) out.back().coeff = -out.back().coeff;
    } else {
      ExactInt c = subtract ? ExactInt(a[i].coeff - b[j].coeff) : ExactInt(a[i].coeff + b[j].coeff);
      if (c != 0) out.push_back(Term{std::move(c), a[i].exp});
      ++i;
      ++j;
    }
  }
  return out;
}

inline TermList scale(const TermList& a, const ExactInt& c) {
  if (c == 0) return {};
  TermList out = a;
  for (auto& t : out) t.coeff *= c;
  return out;
}

inline TermList mul_term(const TermList& a, const ExactInt& c, const Exponent& e) {
  if (c == 0) return {};
  TermList out = a;
  for (auto& t : out) {
    t.coeff *= c;
    for (std::size_t k = 0; k < e.size(); ++k) t.exp[k] += e[k];
  }
  return out;
}

inline TermList mul(const TermList& a, const TermList& b) {
  if (a.empty() || b.empty()) return {};
  if (a.size() == 1) return mul_term(b, a[0].coeff, a[0].exp);
  if (b.size() == 1) return mul_term(a, b[0].coeff, b[0].exp);
  const std::size_t nv = a[0].exp.size();
  std::unordered_map<Exponent, ExactInt, ExponentHash> acc;
  acc.reserve(a.size() * 4);
  Exponent e(nv);
  for (const auto& s : a) {
    for (const auto& t : b) {
      for (std::size_t k = 0; k < nv; ++k) e[k] = s.exp[k] + t.exp[k];
      auto [it, fresh] = acc.try_emplace(e);
      mpz_addmul(it->second.get_mpz_t(), s.coeff.get_mpz_t(), t.coeff.get_mpz_t());
    }
  }
  TermList out;
  out.reserve(acc.size());
  for (auto& [exp, c] : acc)
    if (c != 0) out.push_back(Term{std::move(c), exp});
  std::sort(out.begin(), out.end(),
            [](const Term& x, const Term& y) { return grlex_greater(x.exp, y.exp); });
  return out;
}

inline bool exp_divides(const Exponent& d, const Exponent& e) {
  for (std::size_t k = 0; k < d.size(); ++k)
    if (d[k] > e[k]) return false;
  return true;
}

/// Exact division a / b; nullopt when b does not divide a over Z. Uses
/// leading-term division in grlex; if b | a the leading terms always divide.
inline std::optional<TermList> divide_exact(const TermList& a, const TermList& b) {
  if (b.empty()) throw ContractViolation("division by the zero polynomial");
  if (a.empty()) return TermList{};
  if (b.size() == 1) {
    TermList q;
    q.reserve(a.size());
    for (const auto& t : a) {
      if (!exp_divides(b[0].exp, t.exp) ||
          !mpz_divisible_p(t.coeff.get_mpz_t(), b[0].coeff.get_mpz_t()))
        return std::nullopt;
      Term s{ExactInt(), t.exp};
      mpz_divexact(s.coeff.get_mpz_t(), t.coeff.get_mpz_t(), b[0].coeff.get_mpz_t());
      for (std::size_t k = 0; k < s.exp.size(); ++k) s.exp[k] -= b[0].exp[k];
      q.push_back(std::move(s));
    }
    return q;
  }
  const Term& lt = b.front();
  TermList rem = a;
  TermList quot;
  const std::size_t nv = lt.exp.size();
  while (!rem.empty()) {
    const Term& r = rem.front();
    if (!exp_divides(lt.exp, r.exp) ||
        !mpz_divisible_p(r.coeff.get_mpz_t(), lt.coeff.get_mpz_t()))
      return std::nullopt;
    Term t{ExactInt(), Exponent(nv)};
    mpz_divexact(t.coeff.get_mpz_t(), r.coeff.get_mpz_t(), lt.coeff.get_mpz_t());
    for (std::size_t k = 0; k < nv; ++k) t.exp[k] = r.exp[k] - lt.exp[k];
    rem = add(rem, mul_term(b, t.coeff, t.exp), /*subtract=*/true);
    quot.push_back(std::move(t));
  }
  return quot;
}

inline ExactInt content(const TermList& a) {
  ExactInt g = 0;
  for (const auto& t : a) {
    g = gcd_int(g, t.coeff);
    if (g == 1) break;
  }
  return g;
}

/// Componentwise minimum exponent over all terms.
inline Exponent min_exponent(const TermList& a, std::size_t nv) {
  Exponent m(nv, 0);
  if (a.empty()) return m;
  m = a.front().exp;
  for (const auto& t : a)
    for (std::size_t k = 0; k < nv; ++k) m[k] = std::min(m[k], t.exp[k]);
  return m;
}

inline TermList monomial(std::size_t nv, ExactInt c, Exponent e) {
  if (c == 0) return {};
  e.resize(nv, 0);
  return TermList{Term{std::move(c), std::move(e)}};
}

inline TermList constant(std::size_t nv, ExactInt c) { return monomial(nv, std::move(c), Exponent(nv, 0)); }

}  // namespace detail
}  // namespace arithdyn

#pragma once

// Shared generators and slow reference implementations for the tests.

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include <arithdyn/arithdyn.hpp>

namespace testsupport {

using namespace arithdyn;

inline std::mt19937_64& rng() {
  static std::mt19937_64 g(20240917);
  return g;
}

inline long uniform(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng()); }

/// Homogeneous polynomial of degree d in nv variables with up to `terms`
/// random monomials and coefficients in [-c, c].
inline MultiPoly random_poly(std::size_t nv, unsigned d, std::size_t terms, long c) {
  std::vector<Term> ts;
  for (std::size_t t = 0; t < terms; ++t) {
    Exponent e(nv, 0);
    unsigned left = d;
    for (std::size_t k = 0; k + 1 < nv; ++k) {
      auto x = static_cast<unsigned>(uniform(0, left));
      e[k] = x;
      left -= x;
    }
    e[nv - 1] = left;
    std::shuffle(e.begin(), e.end(), rng());
    ts.push_back({ExactInt(uniform(-c, c)), e});
  }
  return MultiPoly::from_terms(nv, std::move(ts));
}

inline MultiPoly random_nonzero_poly(std::size_t nv, unsigned d, std::size_t terms, long c) {
  for (;;) {
    auto p = random_poly(nv, d, terms, c);
    if (!p.is_zero()) return p;
  }
}

inline ExactRat random_rat(long c) {
  long den = uniform(1, c);
  return make_rat(ExactInt(uniform(-c, c)), ExactInt(den));
}

/// Determinant by the Leibniz permutation sum.
inline ExactInt leibniz_det(const std::vector<std::vector<ExactInt>>& m) {
  const std::size_t n = m.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  ExactInt total = 0;
  do {
    int sign = 1;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (perm[i] > perm[j]) sign = -sign;
    ExactInt prod = sign;
    for (std::size_t i = 0; i < n; ++i) prod *= m[i][perm[i]];
    total += prod;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

inline IntMat random_matrix(std::size_t r, long c) {
  std::vector<std::vector<ExactInt>> rows(r, std::vector<ExactInt>(r));
  for (auto& row : rows)
    for (auto& x : row) x = uniform(-c, c);
  return IntMat::from_rows(rows);
}

inline std::vector<std::vector<ExactInt>> rows_of(const IntMat& a) {
  std::vector<std::vector<ExactInt>> m(a.dim(), std::vector<ExactInt>(a.dim()));
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) m[i][j] = a(i, j);
  return m;
}

inline MultiPoly P(const std::string& text, const std::vector<std::string>& vars = {"x", "y"}) {
  return parse_poly(text, vars);
}

inline RationalMapPN map_of(std::vector<std::string> polys, std::vector<std::string> vars = {}) {
  if (vars.empty()) vars = default_var_names(polys.size());
  std::vector<MultiPoly> ps;
  for (const auto& s : polys) ps.push_back(parse_poly(s, vars));
  return RationalMapPN(std::move(ps), {}, vars);
}

}  // namespace testsupport

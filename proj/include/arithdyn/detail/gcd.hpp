#pragma once

// Multivariate gcd over Z.
//
// Pipeline: split off the monomial part, bound the degree of the remaining
// gcd from univariate images modulo word-size primes, and only do real work
// when the bound is positive and no input already is the gcd. Homogeneous
// inputs are dehomogenized first. The heuristic integer-evaluation gcd runs
// before the recursive primitive-PRS fallback. The final answer is always
// checked by exact trial division.

#include <array>
#include <random>

#include "terms.hpp"

namespace arithdyn::detail {

inline TermList normalize_sign(TermList a) {
  if (!a.empty() && a.front().coeff < 0)
    for (auto& t : a) t.coeff = -t.coeff;
  return a;
}

inline TermList primitive(const TermList& a) {
  if (a.empty()) return a;
  ExactInt c = content(a);
  if (a.front().coeff < 0) c = -c;
  if (c == 1) return a;
  TermList out = a;
  for (auto& t : out) mpz_divexact(t.coeff.get_mpz_t(), t.coeff.get_mpz_t(), c.get_mpz_t());
  return out;
}

inline std::uint64_t max_total_degree(const TermList& a) {
  std::uint64_t d = 0;
  for (const auto& t : a) d = std::max(d, total_degree(t.exp));
  return d;
}

inline bool is_constant(const TermList& a) {
  return a.size() == 1 && total_degree(a[0].exp) == 0;
}

// ---------------------------------------------------------------------------
// Arithmetic modulo a prime p < 2^31.

namespace modp {

using u64 = std::uint64_t;

inline u64 mulmod(u64 a, u64 b, u64 p) { return (a * b) % p; }

inline u64 powmod(u64 a, u64 e, u64 p) {
  u64 r = 1;
  a %= p;
  while (e) {
    if (e & 1) r = mulmod(r, a, p);
    a = mulmod(a, a, p);
    e >>= 1;
  }
  return r;
}

inline u64 inv(u64 a, u64 p) { return powmod(a, p - 2, p); }

using UPoly = std::vector<u64>;  // ascending coefficients

inline void trim(UPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline UPoly rem(UPoly a, const UPoly& b, u64 p) {
  const u64 binv = inv(b.back(), p);
  while (a.size() >= b.size()) {
    u64 f = mulmod(a.back(), binv, p);
    std::size_t shift = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i)
      a[shift + i] = (a[shift + i] + p - mulmod(f, b[i], p)) % p;
    trim(a);
  }
  return a;
}

/// Degree of gcd(a, b) in F_p[s]; both nonzero.
inline std::size_t gcd_degree(UPoly a, UPoly b, u64 p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    UPoly r = rem(std::move(a), b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a.size() - 1;
}

/// The univariate image t -> F(dir*t + base) mod p, via values at
/// t = 0..deg and Newton interpolation.
inline UPoly line_image(const TermList& f, std::size_t nv, const std::vector<u64>& dir,
                        const std::vector<u64>& base, u64 p) {
  const std::size_t d = static_cast<std::size_t>(max_total_degree(f));
  std::vector<u64> cm(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) cm[i] = mpz_fdiv_ui(f[i].coeff.get_mpz_t(), p);
  std::vector<std::uint32_t> maxexp(nv, 0);
  for (const auto& t : f)
    for (std::size_t k = 0; k < nv; ++k) maxexp[k] = std::max(maxexp[k], t.exp[k]);

  std::vector<u64> vals(d + 1);
  std::vector<std::vector<u64>> pw(nv);
  for (std::size_t j = 0; j <= d; ++j) {
    for (std::size_t k = 0; k < nv; ++k) {
      u64 x = (mulmod(dir[k], j % p, p) + base[k]) % p;
      pw[k].assign(maxexp[k] + 1, 1);
      for (std::uint32_t e = 1; e <= maxexp[k]; ++e) pw[k][e] = mulmod(pw[k][e - 1], x, p);
    }
    u64 acc = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      u64 v = cm[i];
      for (std::size_t k = 0; k < nv && v; ++k) v = mulmod(v, pw[k][f[i].exp[k]], p);
      acc = (acc + v) % p;
    }
    vals[j] = acc;
  }
  // Newton divided differences on nodes 0..d.
  std::vector<u64> c = vals;
  for (std::size_t k = 1; k <= d; ++k) {
    u64 kinv = inv(k, p);
    for (std::size_t i = d; i >= k; --i) {
      c[i] = mulmod((c[i] + p - c[i - 1]) % p, kinv, p);
      if (i == k) break;
    }
  }
  UPoly poly{c[d]};
  for (std::size_t ii = d; ii-- > 0;) {
    // poly = poly * (t - ii) + c[ii]
    UPoly next(poly.size() + 1, 0);
    for (std::size_t m = 0; m < poly.size(); ++m) {
      next[m + 1] = (next[m + 1] + poly[m]) % p;
      next[m] = (next[m] + p - mulmod(poly[m], ii % p, p)) % p;
    }
    next[0] = (next[0] + c[ii]) % p;
    poly = std::move(next);
  }
  trim(poly);
  return poly;
}

}  // namespace modp

/// Upper bound for the total degree of gcd(a, b), from images on random
/// lines modulo primes. An image only counts when it preserves both total
/// degrees, in which case it cannot under-estimate.
inline std::uint64_t gcd_degree_bound(const TermList& a, const TermList& b, std::size_t nv) {
  static constexpr std::array<std::uint64_t, 4> primes{2147483629ull, 2147483587ull,
                                                       2147483579ull, 2147483563ull};
  const std::uint64_t da = max_total_degree(a), db = max_total_degree(b);
  std::uint64_t bound = std::min(da, db);
  std::mt19937_64 rng(0x5eed0fa11ull ^ (a.size() * 1315423911ull) ^ b.size());
  int good = 0;
  for (int attempt = 0; attempt < 8 && good < 2 && bound > 0; ++attempt) {
    const std::uint64_t p = primes[attempt % primes.size()];
    std::uniform_int_distribution<std::uint64_t> dist(1, p - 1);
    std::vector<std::uint64_t> dir(nv), base(nv);
    for (std::size_t k = 0; k < nv; ++k) {
      dir[k] = dist(rng);
      base[k] = dist(rng);
    }
    auto ia = modp::line_image(a, nv, dir, base, p);
    auto ib = modp::line_image(b, nv, dir, base, p);
    if (ia.empty() || ib.empty() || ia.size() != da + 1 || ib.size() != db + 1) continue;
    bound = std::min<std::uint64_t>(bound, modp::gcd_degree(ia, ib, p));
    ++good;
  }
  return bound;
}

// ---------------------------------------------------------------------------
// Recursive primitive PRS, main variable `k`, coefficients in Z[x_0..x_{k-1}].

inline std::uint32_t deg_in(const TermList& a, std::size_t k) {
  std::uint32_t d = 0;
  for (const auto& t : a) d = std::max(d, t.exp[k]);
  return d;
}

inline TermList coeff_in(const TermList& a, std::size_t k, std::uint32_t j) {
  TermList out;
  for (const auto& t : a)
    if (t.exp[k] == j) {
      out.push_back(t);
      out.back().exp[k] = 0;
    }
  return canonical(std::move(out));
}

inline std::vector<TermList> coeffs_in(const TermList& a, std::size_t k) {
  std::vector<TermList> out(deg_in(a, k) + 1);
  for (const auto& t : a) {
    Term s = t;
    s.exp[k] = 0;
    out[t.exp[k]].push_back(std::move(s));
  }
  for (auto& c : out) c = canonical(std::move(c));
  return out;
}

inline bool is_unit(const TermList& a) {
  return is_constant(a) && (a[0].coeff == 1 || a[0].coeff == -1);
}

inline TermList gcd_full(const TermList& a, const TermList& b, int k);

inline TermList content_in(const TermList& a, std::size_t k) {
  TermList g;
  for (const auto& c : coeffs_in(a, k)) {
    if (c.empty()) continue;
    g = gcd_full(g, c, static_cast<int>(k) - 1);
    if (is_unit(g)) break;
  }
  return normalize_sign(g);
}

inline TermList primitive_in(const TermList& a, std::size_t k) {
  TermList c = content_in(a, k);
  if (is_unit(c)) return normalize_sign(a);
  return normalize_sign(*divide_exact(a, c));
}

inline TermList pseudo_remainder(TermList r, const TermList& b, std::size_t k) {
  const std::uint32_t n = deg_in(b, k);
  const TermList lcb = coeff_in(b, k, n);
  const std::size_t nv = b.front().exp.size();
  while (!r.empty() && deg_in(r, k) >= n) {
    const std::uint32_t m = deg_in(r, k);
    TermList lcr = coeff_in(r, k, m);
    Exponent shift(nv, 0);
    shift[k] = m - n;
    r = add(mul(lcb, r), mul(mul_term(lcr, 1, shift), b), /*subtract=*/true);
  }
  return r;
}

/// Full gcd (integer content included), positive leading coefficient.
inline TermList gcd_full(const TermList& a, const TermList& b, int k) {
  if (a.empty()) return normalize_sign(b);
  if (b.empty()) return normalize_sign(a);
  const std::size_t nv = a.front().exp.size();
  if (a.size() == 1 && b.size() == 1) {
    Exponent e(nv);
    for (std::size_t i = 0; i < nv; ++i) e[i] = std::min(a[0].exp[i], b[0].exp[i]);
    return monomial(nv, gcd_int(a[0].coeff, b[0].coeff), e);
  }
  if (k < 0) return constant(nv, gcd_int(content(a), content(b)));
  const auto kk = static_cast<std::size_t>(k);
  const std::uint32_t da = deg_in(a, kk), db = deg_in(b, kk);
  if (da == 0 && db == 0) return gcd_full(a, b, k - 1);
  TermList ca = da == 0 ? normalize_sign(a) : content_in(a, kk);
  TermList cb = db == 0 ? normalize_sign(b) : content_in(b, kk);
  TermList c = gcd_full(ca, cb, k - 1);
  if (da == 0 || db == 0) return c;
  TermList pa = is_unit(ca) ? a : *divide_exact(a, ca);
  TermList pb = is_unit(cb) ? b : *divide_exact(b, cb);
  if (deg_in(pa, kk) < deg_in(pb, kk)) std::swap(pa, pb);
  TermList g;
  while (true) {
    TermList r = pseudo_remainder(pa, pb, kk);
    if (r.empty()) {
      g = normalize_sign(pb);
      break;
    }
    if (deg_in(r, kk) == 0) {
      g = constant(nv, 1);
      break;
    }
    pa = std::move(pb);
    pb = primitive_in(r, kk);
  }
  return normalize_sign(mul(c, g));
}

// ---------------------------------------------------------------------------
// Heuristic gcd: evaluate one variable at a large integer xi, recurse, and
// read the candidate back off the symmetric base-xi digits. With
// xi > 2 min(|a|_inf, |b|_inf) + 2 a primitive candidate that divides both
// inputs is the primitive gcd.

inline ExactInt max_norm(const TermList& a) {
  ExactInt m = 0;
  for (const auto& t : a)
    if (abs(t.coeff) > m) m = abs(t.coeff);
  return m;
}

inline TermList eval_var(const TermList& a, std::size_t k, const ExactInt& xi) {
  std::vector<ExactInt> pw{1};
  TermList out;
  out.reserve(a.size());
  for (const auto& t : a) {
    while (pw.size() <= t.exp[k]) pw.push_back(pw.back() * xi);
    Term s = t;
    s.coeff *= pw[t.exp[k]];
    s.exp[k] = 0;
    out.push_back(std::move(s));
  }
  return canonical(std::move(out));
}

inline TermList interpolate_var(const TermList& h, std::size_t k, const ExactInt& xi) {
  const ExactInt half = xi / 2;
  TermList out;
  for (const auto& t : h) {
    ExactInt c = t.coeff, d;
    for (std::uint32_t i = 0; c != 0; ++i) {
      mpz_fdiv_r(d.get_mpz_t(), c.get_mpz_t(), xi.get_mpz_t());
      if (d > half) d -= xi;
      if (d != 0) {
        Term s{d, t.exp};
        s.exp[k] = i;
        out.push_back(std::move(s));
      }
      c -= d;
      mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), xi.get_mpz_t());
    }
  }
  return canonical(std::move(out));
}

/// Full gcd (content included) of nonzero a, b in variables 0..k, or
/// nullopt when every evaluation point is unlucky.
inline std::optional<TermList> gcd_heuristic(const TermList& a, const TermList& b, int k) {
  const std::size_t nv = a.front().exp.size();
  if (k < 0) return constant(nv, gcd_int(content(a), content(b)));
  const ExactInt ca = content(a), cb = content(b), cg = gcd_int(ca, cb);
  const TermList pa = primitive(a), pb = primitive(b);
  const auto kk = static_cast<std::size_t>(k);
  if (deg_in(pa, kk) == 0 && deg_in(pb, kk) == 0) {
    auto g = gcd_heuristic(pa, pb, k - 1);
    if (!g) return std::nullopt;
    return normalize_sign(scale(*g, cg));
  }
  ExactInt xi = 2 * std::min(max_norm(pa), max_norm(pb)) + 29;
  for (int attempt = 0; attempt < 6; ++attempt) {
    const TermList ea = eval_var(pa, kk, xi), eb = eval_var(pb, kk, xi);
    if (!ea.empty() && !eb.empty()) {
      if (auto h = gcd_heuristic(ea, eb, k - 1)) {
        TermList g = primitive(interpolate_var(*h, kk, xi));
        if (!g.empty() && divide_exact(pa, g) && divide_exact(pb, g)) return normalize_sign(scale(g, cg));
      }
    }
    ExactInt r;
    mpz_sqrt(r.get_mpz_t(), xi.get_mpz_t());
    mpz_sqrt(r.get_mpz_t(), r.get_mpz_t());
    xi = xi * r * 73794 / 27011 + 1;
  }
  return std::nullopt;
}

inline bool is_homogeneous(const TermList& a) {
  for (const auto& t : a)
    if (total_degree(t.exp) != total_degree(a.front().exp)) return false;
  return true;
}

/// Sets the last variable to 1; the inverse is homogenize.
inline TermList dehomogenize(const TermList& a) {
  TermList out = a;
  for (auto& t : out) t.exp.back() = 0;
  return canonical(std::move(out));
}

inline TermList homogenize(TermList a) {
  const std::uint64_t d = max_total_degree(a);
  for (auto& t : a) t.exp.back() = static_cast<std::uint32_t>(d - total_degree(t.exp));
  return canonical(std::move(a));
}

/// Primitive gcd of a, b, neither divisible by a variable.
inline TermList gcd_core(const TermList& a, const TermList& b, std::size_t nv) {
  if (nv >= 2 && is_homogeneous(a) && is_homogeneous(b))
    return primitive(homogenize(gcd_core(dehomogenize(a), dehomogenize(b), 0)));
  if (auto g = gcd_heuristic(a, b, static_cast<int>(a.front().exp.size()) - 1)) return primitive(*g);
  return primitive(gcd_full(a, b, static_cast<int>(a.front().exp.size()) - 1));
}

/// Primitive gcd with positive leading coefficient; not both zero.
inline TermList gcd_primitive(const TermList& a, const TermList& b, std::size_t nv) {
  if (a.empty() && b.empty()) throw ContractViolation("gcd of two zero polynomials");
  if (a.empty()) return primitive(b);
  if (b.empty()) return primitive(a);

  const Exponent ma = min_exponent(a, nv), mb = min_exponent(b, nv);
  Exponent m(nv);
  for (std::size_t i = 0; i < nv; ++i) m[i] = std::min(ma[i], mb[i]);
  TermList ra = *divide_exact(a, monomial(nv, 1, ma));
  TermList rb = *divide_exact(b, monomial(nv, 1, mb));

  TermList core;
  if (is_constant(ra) || is_constant(rb)) {
    core = constant(nv, 1);
  } else {
    const std::uint64_t bound = gcd_degree_bound(ra, rb, nv);
    if (bound == 0) {
      core = constant(nv, 1);
    } else if (bound == max_total_degree(ra) && divide_exact(rb, ra)) {
      core = primitive(ra);
    } else if (bound == max_total_degree(rb) && divide_exact(ra, rb)) {
      core = primitive(rb);
    } else {
      core = gcd_core(ra, rb, nv);
    }
  }
  TermList g = normalize_sign(mul_term(core, 1, m));
  if (!divide_exact(a, g) || !divide_exact(b, g))
    throw std::logic_error("gcd verification by trial division failed");
  return g;
}

}  // namespace arithdyn::detail

#pragma once

// Exact integer / rational arithmetic on top of GMP, plus the error types
// shared by every module.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace arithdyn {

using ExactInt = mpz_class;
using ExactRat = mpq_class;

// ---------------------------------------------------------------------------
// Errors

struct ContractViolation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotAPoint : std::invalid_argument {
  NotAPoint() : std::invalid_argument("all coordinates are zero") {}
};
struct NotOnTorus : std::invalid_argument {
  NotOnTorus() : std::invalid_argument("torus point has a zero coordinate") {}
};
struct IndeterminatePoint : std::domain_error {
  explicit IndeterminatePoint(const std::string& where)
      : std::domain_error("point lies in the indeterminacy locus: " + where) {}
};
struct UnsupportedDimension : std::domain_error {
  using std::domain_error::domain_error;
};
struct ConeNotPreserved : std::domain_error {
  ConeNotPreserved()
      : std::domain_error("matrix has a negative entry; orthant is not preserved") {}
};
struct ResourceCapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Helpers

inline ExactRat make_rat(ExactInt num, ExactInt den = 1) {
  if (den == 0) throw ContractViolation("zero denominator");
  ExactRat q(std::move(num), std::move(den));
  q.canonicalize();
  return q;
}

inline ExactInt abs_int(const ExactInt& x) { return x < 0 ? ExactInt(-x) : x; }

inline ExactInt gcd_int(const ExactInt& a, const ExactInt& b) {
  ExactInt g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

inline ExactInt lcm_int(const ExactInt& a, const ExactInt& b) {
  ExactInt l;
  mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return l;
}

inline ExactInt pow_int(const ExactInt& base, unsigned long e) {
  ExactInt r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

inline std::size_t bit_size(const ExactInt& x) {
  return x == 0 ? 0 : mpz_sizeinbase(x.get_mpz_t(), 2);
}

/// Natural log of |x| for x != 0, accurate for arbitrarily large x.
inline double log_abs(const ExactInt& x) {
  if (x == 0) throw ContractViolation("log of zero");
  long exp2 = 0;
  double mant = mpz_get_d_2exp(&exp2, x.get_mpz_t());
  return std::log(std::fabs(mant)) + static_cast<double>(exp2) * std::log(2.0);
}

/// Rounds an ExactInt to the nearest double (may overflow to inf).
inline double to_double(const ExactInt& x) { return x.get_d(); }

inline double to_double(const ExactRat& q) { return q.get_d(); }

/// Fixed 9-significant-digit rendering used by every report.
inline std::string format_real(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\n' ||
                        s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\n' ||
                        s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

/// Replaces the typographic minus U+2212 by ASCII '-'.
inline std::string ascii_minus(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i + 2 < s.size() && static_cast<unsigned char>(s[i]) == 0xE2 &&
        static_cast<unsigned char>(s[i + 1]) == 0x88 &&
        static_cast<unsigned char>(s[i + 2]) == 0x92) {
      out.push_back('-');
      i += 2;
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

inline ExactInt parse_int(std::string_view text) {
  std::string s = ascii_minus(trim(text));
  if (!s.empty() && s.front() == '+') s.erase(0, 1);
  if (s.empty() || s == "-") throw ParseError("empty integer");
  for (std::size_t i = (s.front() == '-') ? 1 : 0; i < s.size(); ++i)
    if (s[i] < '0' || s[i] > '9') throw ParseError("bad integer: '" + s + "'");
  return ExactInt(s, 10);
}

/// Accepts `a`, `-a`, `a/b`.
inline ExactRat parse_rational(std::string_view text) {
  std::string s = ascii_minus(trim(text));
  auto slash = s.find('/');
  if (slash == std::string::npos) return ExactRat(parse_int(s));
  ExactInt num = parse_int(std::string_view(s).substr(0, slash));
  ExactInt den = parse_int(std::string_view(s).substr(slash + 1));
  if (den == 0) throw ParseError("zero denominator in '" + s + "'");
  return make_rat(num, den);
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.emplace_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

/// Comma-separated rationals, e.g. `2,1` or `1/2,3,-4`.
inline std::vector<ExactRat> parse_rational_list(std::string_view s) {
  std::vector<ExactRat> out;
  for (const auto& piece : split(s, ',')) out.push_back(parse_rational(piece));
  return out;
}

inline std::string to_string(const ExactRat& q) { return q.get_str(10); }
inline std::string to_string(const ExactInt& z) { return z.get_str(10); }

// ---------------------------------------------------------------------------
// Integer factorization (trial division + Pollard-Brent). Inputs are point
// coordinates, so the sizes involved are modest.

namespace detail {

inline ExactInt pollard_brent(const ExactInt& n, unsigned long seed) {
  if (mpz_even_p(n.get_mpz_t())) return 2;
  ExactInt y = seed % n, c = (seed * 7 + 1) % n, m = 128;
  if (c == 0) c = 1;
  ExactInt g = 1, r = 1, q = 1, x, ys;
  auto f = [&](const ExactInt& v) {
    ExactInt t = v * v + c;
    mpz_mod(t.get_mpz_t(), t.get_mpz_t(), n.get_mpz_t());
    return t;
  };
  while (g == 1) {
    x = y;
    for (ExactInt i = 0; i < r; ++i) y = f(y);
    ExactInt k = 0;
    while (k < r && g == 1) {
      ys = y;
      for (ExactInt i = 0; i < m && i < r - k; ++i) {
        y = f(y);
        q = (q * abs_int(x - y)) % n;
      }
      g = gcd_int(q, n);
      k += m;
    }
    r *= 2;
  }
  if (g == n) {
    do {
      ys = f(ys);
      g = gcd_int(abs_int(x - ys), n);
    } while (g == 1);
  }
  return g;
}

inline void factor_into(ExactInt n, std::vector<ExactInt>& out, unsigned long seed = 2) {
  if (n == 1) return;
  if (mpz_probab_prime_p(n.get_mpz_t(), 30) > 0) {
    out.push_back(n);
    return;
  }
  ExactInt d = n;
  while (d == n) {
    d = pollard_brent(n, seed++);
  }
  factor_into(d, out, seed);
  factor_into(n / d, out, seed);
}

}  // namespace detail

/// Prime factorization of |n| (n != 0) as ascending (prime, multiplicity).
inline std::vector<std::pair<ExactInt, unsigned>> factor_integer(const ExactInt& n) {
  if (n == 0) throw ContractViolation("cannot factor zero");
  ExactInt m = abs_int(n);
  std::vector<ExactInt> primes;
  for (unsigned long p = 2; p < 10000 && m > 1; ++p) {
    if (ExactInt(p) * p > m) break;
    while (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
      primes.emplace_back(p);
      m /= p;
    }
  }
  if (m > 1) detail::factor_into(m, primes);
  std::sort(primes.begin(), primes.end());
  std::vector<std::pair<ExactInt, unsigned>> out;
  for (const auto& p : primes) {
    if (!out.empty() && out.back().first == p)
      ++out.back().second;
    else
      out.emplace_back(p, 1u);
  }
  return out;
}

}  // namespace arithdyn

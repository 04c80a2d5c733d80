#pragma once

// Exact integer matrices: sup-norm growth of powers, certified spectral
// radii, Perron eigenvectors of orthant-preserving matrices, and the
// submultiplicativity / Fekete machinery used for dynamical degrees.
//
// The spectral radius is bracketed by an exact Schur-Cohn test on the
// integer characteristic polynomial: "all roots lie in |z| < R" is decided
// in rational arithmetic, and bisection on R gives [lower, upper] with
// some root of modulus >= lower and every root of modulus < upper.

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "exact.hpp"

namespace arithdyn {

class IntMat {
 public:
  IntMat() = default;
  explicit IntMat(std::size_t r) : r_(r), a_(r * r) {}

  static IntMat identity(std::size_t r) {
    IntMat m(r);
    for (std::size_t i = 0; i < r; ++i) m(i, i) = 1;
    return m;
  }

  static IntMat from_rows(const std::vector<std::vector<ExactInt>>& rows) {
    IntMat m(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows.size()) throw ContractViolation("matrix is not square");
      for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  /// Rows separated by `;`, entries by `,`, e.g. `2,1;1,1`.
  static IntMat parse(std::string_view text) {
    std::vector<std::vector<ExactInt>> rows;
    for (const auto& row : split(text, ';')) {
      rows.emplace_back();
      for (const auto& e : split(row, ',')) rows.back().push_back(parse_int(e));
    }
    for (const auto& r : rows)
      if (r.size() != rows.size()) throw ParseError("matrix is not square: '" + std::string(text) + "'");
    return from_rows(rows);
  }

  std::size_t dim() const { return r_; }
  ExactInt& operator()(std::size_t i, std::size_t j) { return a_[i * r_ + j]; }
  const ExactInt& operator()(std::size_t i, std::size_t j) const { return a_[i * r_ + j]; }

  bool operator==(const IntMat& o) const { return r_ == o.r_ && a_ == o.a_; }

  bool nonnegative() const {
    return std::all_of(a_.begin(), a_.end(), [](const ExactInt& x) { return x >= 0; });
  }

  std::string to_string() const {
    std::string s;
    for (std::size_t i = 0; i < r_; ++i) {
      if (i) s += ";";
      for (std::size_t j = 0; j < r_; ++j) {
        if (j) s += ",";
        s += (*this)(i, j).get_str();
      }
    }
    return s;
  }

 private:
  std::size_t r_ = 0;
  std::vector<ExactInt> a_;
};

inline IntMat operator*(const IntMat& a, const IntMat& b) {
  if (a.dim() != b.dim()) throw ContractViolation("matrix dimension mismatch");
  const std::size_t r = a.dim();
  IntMat c(r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t k = 0; k < r; ++k) {
      if (a(i, k) == 0) continue;
      for (std::size_t j = 0; j < r; ++j)
        mpz_addmul(c(i, j).get_mpz_t(), a(i, k).get_mpz_t(), b(k, j).get_mpz_t());
    }
  return c;
}

inline std::vector<ExactInt> operator*(const IntMat& a, std::span<const ExactInt> v) {
  if (a.dim() != v.size()) throw ContractViolation("matrix/vector dimension mismatch");
  std::vector<ExactInt> out(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j)
      mpz_addmul(out[i].get_mpz_t(), a(i, j).get_mpz_t(), v[j].get_mpz_t());
  return out;
}

inline IntMat matrix_power(const IntMat& a, unsigned n) {
  IntMat result = IntMat::identity(a.dim()), base = a;
  while (n) {
    if (n & 1u) result = result * base;
    n >>= 1u;
    if (n) base = base * base;
  }
  return result;
}

namespace detail {

/// Fraction-free Bareiss determinant.
inline ExactInt bareiss_det(std::vector<std::vector<ExactInt>> m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  ExactInt prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t piv = k + 1;
      while (piv < n && m[piv][k] == 0) ++piv;
      if (piv == n) return 0;
      std::swap(m[k], m[piv]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        ExactInt t = m[i][j] * m[k][k] - m[i][k] * m[k][j];
        mpz_divexact(m[i][j].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

/// Solves m x = rhs over Q; m must be nonsingular.
inline std::vector<ExactRat> solve_rational(std::vector<std::vector<ExactRat>> m,
                                            std::vector<ExactRat> rhs) {
  const std::size_t n = m.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    while (piv < n && m[piv][k] == 0) ++piv;
    if (piv == n) throw ContractViolation("singular linear system");
    std::swap(m[k], m[piv]);
    std::swap(rhs[k], rhs[piv]);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k || m[i][k] == 0) continue;
      ExactRat f = m[i][k] / m[k][k];
      for (std::size_t j = k; j < n; ++j) m[i][j] -= f * m[k][j];
      rhs[i] -= f * rhs[k];
    }
  }
  for (std::size_t i = 0; i < n; ++i) rhs[i] /= m[i][i];
  return rhs;
}

}  // namespace detail

inline ExactInt determinant(const IntMat& a) {
  std::vector<std::vector<ExactInt>> rows(a.dim(), std::vector<ExactInt>(a.dim()));
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) rows[i][j] = a(i, j);
  return detail::bareiss_det(std::move(rows));
}

/// ||A|| = max |a_ij|.
inline ExactInt supnorm(const IntMat& a) {
  ExactInt m = 0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) m = std::max(m, abs_int(a(i, j)));
  return m;
}

/// ||A^n|| for n = 1..nmax (index 0 holds n = 1).
inline std::vector<ExactInt> power_norms(const IntMat& a, unsigned nmax,
                                         std::size_t max_bits = 1u << 20) {
  if (nmax < 1) throw ContractViolation("nmax must be at least 1");
  std::vector<ExactInt> out;
  out.reserve(nmax);
  IntMat p = a;
  for (unsigned n = 1; n <= nmax; ++n) {
    if (n > 1) p = p * a;
    out.push_back(supnorm(p));
    if (bit_size(out.back()) > max_bits)
      throw ResourceCapExceeded("power_norms: entry size cap exceeded at n = " + std::to_string(n));
  }
  return out;
}

/// Characteristic polynomial det(zI - A), ascending coefficients, monic.
/// Faddeev-LeVerrier; every division is exact over Z.
inline std::vector<ExactInt> characteristic_polynomial(const IntMat& a) {
  const std::size_t r = a.dim();
  std::vector<ExactInt> c(r + 1);
  c[r] = 1;
  IntMat m(r);  // M_0 = 0
  for (std::size_t k = 1; k <= r; ++k) {
    IntMat next = a * m;
    for (std::size_t i = 0; i < r; ++i) next(i, i) += c[r - k + 1];
    m = std::move(next);
    IntMat am = a * m;
    ExactInt tr = 0;
    for (std::size_t i = 0; i < r; ++i) tr += am(i, i);
    ExactInt q;
    mpz_divexact_ui(q.get_mpz_t(), tr.get_mpz_t(), k);
    c[r - k] = -q;
  }
  return c;
}

namespace detail {

/// True iff every root of the integer polynomial (ascending coefficients,
/// nonzero leading) lies strictly inside the unit disk. Schur-Cohn
/// reduction: with |a_n| > |a_0|, (a_n p - a_0 p*) / z has the same
/// property and one degree less.
inline bool schur_stable(std::vector<ExactInt> a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
  while (a.size() > 1) {
    const std::size_t n = a.size() - 1;
    if (mpz_cmpabs(a[n].get_mpz_t(), a[0].get_mpz_t()) <= 0) return false;
    std::vector<ExactInt> b(n);
    for (std::size_t k = 1; k <= n; ++k) b[k - 1] = a[n] * a[k] - a[0] * a[n - k];
    ExactInt g = 0;
    for (const auto& x : b) g = gcd_int(g, x);
    if (g > 1)
      for (auto& x : b) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
    a = std::move(b);
  }
  return true;
}

/// Coefficients of den^n · p(num/den · z).
inline std::vector<ExactInt> scale_argument(const std::vector<ExactInt>& p, const ExactRat& r) {
  const std::size_t n = p.size() - 1;
  std::vector<ExactInt> out(p.size());
  for (std::size_t k = 0; k <= n; ++k)
    out[k] = p[k] * pow_int(r.get_num(), k) * pow_int(r.get_den(), n - k);
  return out;
}

inline bool all_roots_within(const std::vector<ExactInt>& p, const ExactRat& radius) {
  return schur_stable(scale_argument(p, radius));
}

inline ExactInt eval_int_poly(const std::vector<ExactInt>& p, const ExactInt& x) {
  ExactInt acc = 0;
  for (std::size_t k = p.size(); k-- > 0;) acc = acc * x + p[k];
  return acc;
}

inline double rat_down(const ExactRat& q) {
  double d = q.get_d();
  if (ExactRat(d) > q) d = std::nextafter(d, -std::numeric_limits<double>::infinity());
  return d;
}

inline double rat_up(const ExactRat& q) {
  double d = q.get_d();
  if (ExactRat(d) < q) d = std::nextafter(d, std::numeric_limits<double>::infinity());
  return d;
}

}  // namespace detail

enum class SpectralMethod { char_poly_root, norm_limit };

struct SpectralEstimate {
  double value = 0.0;
  SpectralMethod method = SpectralMethod::char_poly_root;
  double lower = 0.0;  // certified: some eigenvalue has modulus >= lower
  double upper = 0.0;  // certified: every eigenvalue has modulus <= upper
  double tolerance = 1e-9;

  double width() const { return upper - lower; }
  bool contains(double x) const { return lower <= x && x <= upper; }
};

inline const char* to_string(SpectralMethod m) {
  return m == SpectralMethod::char_poly_root ? "char_poly_root" : "norm_limit";
}

/// rho(A) bracketed to width <= tolerance.
inline SpectralEstimate spectral_radius(const IntMat& a, double tolerance = 1e-9) {
  if (a.dim() == 0) throw ContractViolation("empty matrix");
  const auto p = characteristic_polynomial(a);
  // Cauchy bound: every root satisfies |z| < 1 + max |c_k|.
  ExactInt cmax = 0;
  for (std::size_t k = 0; k + 1 < p.size(); ++k) cmax = std::max(cmax, abs_int(p[k]));
  ExactRat lo = 0, hi = ExactRat(cmax + 1);
  const ExactRat tol(tolerance);
  while (hi - lo > tol) {
    ExactRat mid = (lo + hi) / 2;
    if (detail::all_roots_within(p, mid))
      hi = mid;
    else
      lo = mid;
  }
  SpectralEstimate est;
  est.tolerance = tolerance;
  est.lower = detail::rat_down(lo);
  est.upper = detail::rat_up(hi);
  est.value = ExactRat((lo + hi) / 2).get_d();
  // An integer root +-k inside the bracket pins the value exactly.
  const ExactInt k = hi.get_num() / hi.get_den();
  if (ExactRat(k) >= lo && ExactRat(k) < hi &&
      (detail::eval_int_poly(p, k) == 0 || detail::eval_int_poly(p, ExactInt(-k)) == 0)) {
    est.value = k.get_d();
    est.lower = est.value;
  }
  return est;
}

/// Independent route: rho(A) <= (r ||A^n||)^{1/n} for every n; the value is
/// ||A^nmax||^{1/nmax}. No certified lower bound is available this way.
inline SpectralEstimate spectral_radius_from_norms(const IntMat& a, unsigned nmax) {
  auto norms = power_norms(a, nmax);
  SpectralEstimate est;
  est.method = SpectralMethod::norm_limit;
  est.upper = std::numeric_limits<double>::infinity();
  const double r = static_cast<double>(a.dim());
  for (unsigned n = 1; n <= nmax; ++n) {
    const auto& x = norms[n - 1];
    if (x == 0) {
      est.upper = 0;
      break;
    }
    double bound = std::exp((std::log(r) + log_abs(x)) / n);
    est.upper = std::min(est.upper, std::nextafter(bound * (1 + 1e-14), INFINITY));
  }
  est.value = norms.back() == 0 ? 0.0 : std::exp(log_abs(norms.back()) / nmax);
  est.lower = 0.0;
  return est;
}

/// Nonnegative eigenvector (sum 1) for rho(A) of an orthant-preserving A.
struct ConeEigenvector {
  std::vector<double> vector;
  double eigenvalue = 0.0;
  double residual = 0.0;  // ||A v - rho v||_inf / ||v||_inf
  unsigned iterations = 0;
};

/// Power iteration on I + A (same eigenvectors, and 1 + rho strictly
/// dominates every other eigenvalue modulus) from the all-ones vector with
/// exact integer iterates. If exact iteration stalls (non-trivial Jordan
/// structure at rho) it continues with normalized repeated squaring.
inline ConeEigenvector birkhoff_cone_eigvec(const IntMat& a, double tolerance = 1e-9,
                                            unsigned max_exact_iterations = 2000) {
  if (!a.nonnegative()) throw ConeNotPreserved();
  const std::size_t r = a.dim();
  const double rho = spectral_radius(a).value;
  IntMat shifted = a;
  for (std::size_t i = 0; i < r; ++i) shifted(i, i) += 1;

  auto residual_of = [&](const std::vector<double>& v) {
    double vmax = 0, res = 0;
    for (std::size_t i = 0; i < r; ++i) {
      double av = 0;
      for (std::size_t j = 0; j < r; ++j) av += a(i, j).get_d() * v[j];
      res = std::max(res, std::fabs(av - rho * v[i]));
      vmax = std::max(vmax, std::fabs(v[i]));
    }
    return vmax == 0 ? INFINITY : res / vmax;
  };
  auto normalized = [&](auto&& get) {
    std::vector<double> v(r);
    double s = 0;
    for (std::size_t i = 0; i < r; ++i) s += (v[i] = get(i));
    for (auto& x : v) x /= s;
    return v;
  };

  ConeEigenvector out;
  std::vector<ExactInt> w(r, ExactInt(1));
  std::vector<double> v;
  for (unsigned it = 0; it <= max_exact_iterations; ++it) {
    ExactInt total = 0;
    for (const auto& x : w) total += x;
    v = normalized([&](std::size_t i) { return ExactRat(w[i], total).get_d(); });
    out.iterations = it;
    if (residual_of(v) <= tolerance) break;
    if (it == max_exact_iterations) {
      // Normalized squaring of (I + A) in floating point.
      std::vector<std::vector<long double>> m(r, std::vector<long double>(r));
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) m[i][j] = shifted(i, j).get_d();
      for (int sq = 0; sq < 200 && residual_of(v) > tolerance; ++sq) {
        std::vector<std::vector<long double>> m2(r, std::vector<long double>(r, 0));
        long double mx = 0;
        for (std::size_t i = 0; i < r; ++i)
          for (std::size_t k = 0; k < r; ++k)
            for (std::size_t j = 0; j < r; ++j) m2[i][j] += m[i][k] * m[k][j];
        for (auto& row : m2)
          for (auto x : row) mx = std::max(mx, x);
        for (auto& row : m2)
          for (auto& x : row) x /= mx;
        m = std::move(m2);
        v = normalized([&](std::size_t i) {
          long double s = 0;
          for (std::size_t j = 0; j < r; ++j) s += m[i][j];
          return static_cast<double>(s);
        });
        out.iterations += 1;
      }
      break;
    }
    w = shifted * std::span<const ExactInt>(w);
  }
  out.vector = v;
  double num = 0, den = 0;
  for (std::size_t i = 0; i < r; ++i) {
    double av = 0;
    for (std::size_t j = 0; j < r; ++j) av += a(i, j).get_d() * v[j];
    num += av;
    den += v[i];
  }
  out.eigenvalue = num / den;
  out.residual = residual_of(v);
  return out;
}

// ---------------------------------------------------------------------------
// Submultiplicativity and Fekete limits. Sequences are indexed from 1:
// seq[0] is the n = 1 term.

/// seq[m+n] <= C seq[m] seq[n] for all m + n in range, exactly.
inline bool submult_check(std::span<const ExactInt> seq, const ExactRat& c) {
  for (std::size_t m = 1; m <= seq.size(); ++m)
    for (std::size_t n = 1; m + n <= seq.size(); ++n)
      if (ExactRat(seq[m + n - 1]) > c * seq[m - 1] * seq[n - 1]) return false;
  return true;
}

/// Floating version with a relative rounding allowance.
inline bool submult_check(std::span<const double> seq, double c, double rel_tol = 1e-12) {
  for (std::size_t m = 1; m <= seq.size(); ++m)
    for (std::size_t n = 1; m + n <= seq.size(); ++n) {
      double rhs = c * seq[m - 1] * seq[n - 1];
      if (seq[m + n - 1] > rhs * (1 + rel_tol)) return false;
    }
  return true;
}

struct FeketeEstimate {
  double inf_estimate = 0.0;  // min_n seq[n]^{1/n}
  bool certified = false;     // an upper bound for the limit
  std::size_t argmin = 0;     // n attaining the min
};

namespace detail {
/// x^{1/n} rounded upward; exact when x is a perfect n-th power.
inline double root_up(const ExactInt& x, unsigned n) {
  if (x <= 0) throw ContractViolation("root of a non-positive term");
  ExactInt k;
  if (mpz_root(k.get_mpz_t(), x.get_mpz_t(), n) != 0) return k.get_d();
  double r = std::exp(log_abs(x) / n);
  return std::nextafter(r * (1 + 4e-16), INFINITY);
}
}  // namespace detail

/// Fekete: for a sequence submultiplicative with C = 1 the limit of
/// seq[n]^{1/n} equals the infimum, so every term is an upper bound.
inline FeketeEstimate fekete_limit(std::span<const ExactInt> seq) {
  if (seq.empty()) throw ContractViolation("empty sequence");
  FeketeEstimate out;
  out.inf_estimate = INFINITY;
  for (std::size_t n = 1; n <= seq.size(); ++n) {
    double r = detail::root_up(seq[n - 1], static_cast<unsigned>(n));
    if (r < out.inf_estimate) {
      out.inf_estimate = r;
      out.argmin = n;
    }
  }
  out.certified = submult_check(seq, ExactRat(1));
  return out;
}

inline FeketeEstimate fekete_limit(std::span<const double> seq, bool submultiplicative) {
  if (seq.empty()) throw ContractViolation("empty sequence");
  FeketeEstimate out;
  out.inf_estimate = INFINITY;
  for (std::size_t n = 1; n <= seq.size(); ++n) {
    if (!(seq[n - 1] > 0)) throw ContractViolation("sequence must be positive");
    double r = std::pow(seq[n - 1], 1.0 / static_cast<double>(n));
    if (r < out.inf_estimate) {
      out.inf_estimate = r;
      out.argmin = n;
    }
  }
  out.certified = submultiplicative && submult_check(seq, 1.0);
  return out;
}


/// Two-sided growth bound for ||A^n|| (max-entry norm), dimension r:
///   rho^n / r  <=  ||A^n||  <=  sum_{k<r} C(n,k) rho^{n-k} ||A||_F^k.
/// The left side holds because the row-sum norm dominates rho(A^n); the
/// right side comes from a Schur form A = U (D + T) U*, where every
/// product with r factors T vanishes and ||T||_2 <= ||A||_F.
struct NormSandwich {
  std::vector<long double> lower, upper;  // index n-1
  std::vector<ExactInt> norms;
  bool holds = true;
  unsigned first_bad = 0;
};

inline NormSandwich norm_sandwich(const IntMat& a, unsigned nmax, double tolerance = 1e-9) {
  const auto sr = spectral_radius(a, tolerance);
  const std::size_t r = a.dim();
  long double frob2 = 0;
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) frob2 += static_cast<long double>(a(i, j).get_d()) * a(i, j).get_d();
  const long double frob = std::sqrt(frob2);
  NormSandwich out;
  out.norms = power_norms(a, nmax);
  const long double slack = 1e-12L;
  for (unsigned n = 1; n <= nmax; ++n) {
    const long double lo = std::pow(static_cast<long double>(sr.lower), n) / r;
    long double hi = 0, binom = 1;
    for (std::size_t k = 0; k < r && k <= n; ++k) {
      hi += binom * std::pow(static_cast<long double>(sr.upper), static_cast<long double>(n - k)) *
            std::pow(frob, static_cast<long double>(k));
      binom = binom * (n - k) / (k + 1);
    }
    out.lower.push_back(lo);
    out.upper.push_back(hi);
    const long double x = out.norms[n - 1].get_d();
    if (out.holds && (x < lo * (1 - slack) || x > hi * (1 + slack))) {
      out.holds = false;
      out.first_bad = n;
    }
  }
  return out;
}

}  // namespace arithdyn

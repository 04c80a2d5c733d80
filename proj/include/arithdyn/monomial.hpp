#pragma once

// Monomial self-maps of the torus G_m^N, x_i -> prod_j x_j^{a_ij}.
//
// Points are stored as prime-exponent matrices, so iterating is the
// integer matrix product E <- A E and the heights are read off the
// exponents. The values themselves (whose digit counts grow like rho(A)^n)
// are never built unless asked for.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "height_sequence.hpp"
#include "heights.hpp"
#include "matrix_spectral.hpp"
#include "projmaps.hpp"

namespace arithdyn {

class MonomialMap {
 public:
  explicit MonomialMap(IntMat a, std::string name = {}) : a_(std::move(a)), name_(std::move(name)) {
    if (a_.dim() == 0) throw ContractViolation("empty exponent matrix");
    if (determinant(a_) == 0) throw ContractViolation("monomial map is not dominant (det A = 0)");
  }
  static MonomialMap parse(std::string_view text, std::string name = {}) {
    return MonomialMap(IntMat::parse(text), std::move(name));
  }

  std::size_t dim() const { return a_.dim(); }
  const IntMat& matrix() const { return a_; }
  const std::string& name() const { return name_; }

 private:
  IntMat a_;
  std::string name_;
};

/// x_i = sign_i * prod_p p^{E(i,p)}.
struct FactoredTorusPoint {
  std::vector<ExactInt> primes;             // ascending, each column used
  std::vector<std::vector<ExactInt>> exps;  // N rows, one column per prime
  std::vector<int> signs;

  std::size_t dim() const { return signs.size(); }

  /// The rational coordinates; sizes grow quickly along an orbit.
  std::vector<ExactRat> reconstruct() const {
    std::vector<ExactRat> out;
    for (std::size_t i = 0; i < dim(); ++i) {
      ExactInt num = 1, den = 1;
      for (std::size_t k = 0; k < primes.size(); ++k) {
        const auto& e = exps[i][k];
        if (e == 0) continue;
        if (!e.fits_ulong_p() && !ExactInt(-e).fits_ulong_p())
          throw ResourceCapExceeded("exponent too large to reconstruct");
        if (e > 0)
          num *= pow_int(primes[k], e.get_ui());
        else
          den *= pow_int(primes[k], ExactInt(-e).get_ui());
      }
      out.push_back(make_rat(signs[i] * num, den));
    }
    return out;
  }

  std::string to_string() const {
    std::string s;
    for (std::size_t i = 0; i < dim(); ++i) {
      if (i) s += ",";
      s += signs[i] < 0 ? "-" : "";
      bool any = false;
      for (std::size_t k = 0; k < primes.size(); ++k) {
        if (exps[i][k] == 0) continue;
        if (any) s += "*";
        s += primes[k].get_str() + "^" + exps[i][k].get_str();
        any = true;
      }
      if (!any) s += "1";
    }
    return s;
  }
};

inline FactoredTorusPoint factor_point(std::span<const ExactRat> coords) {
  if (coords.empty()) throw ContractViolation("torus point with no coordinates");
  std::vector<std::map<ExactInt, ExactInt>> rows(coords.size());
  std::map<ExactInt, bool> all_primes;
  FactoredTorusPoint pt;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (coords[i] == 0) throw NotOnTorus();
    pt.signs.push_back(coords[i] < 0 ? -1 : 1);
    for (auto [p, m] : factor_integer(coords[i].get_num())) {
      rows[i][p] += m;
      all_primes[p] = true;
    }
    for (auto [p, m] : factor_integer(coords[i].get_den())) {
      rows[i][p] -= m;
      all_primes[p] = true;
    }
  }
  for (const auto& [p, used] : all_primes) pt.primes.push_back(p);
  pt.exps.assign(coords.size(), std::vector<ExactInt>(pt.primes.size()));
  for (std::size_t i = 0; i < coords.size(); ++i)
    for (std::size_t k = 0; k < pt.primes.size(); ++k) {
      auto it = rows[i].find(pt.primes[k]);
      if (it != rows[i].end()) pt.exps[i][k] = it->second;
    }
  return pt;
}

inline FactoredTorusPoint monomial_step(const MonomialMap& f, const FactoredTorusPoint& pt) {
  const auto& a = f.matrix();
  if (a.dim() != pt.dim()) throw ContractViolation("map and point dimensions differ");
  FactoredTorusPoint out;
  out.primes = pt.primes;
  out.exps.assign(pt.dim(), std::vector<ExactInt>(pt.primes.size()));
  out.signs.assign(pt.dim(), 1);
  for (std::size_t i = 0; i < pt.dim(); ++i) {
    for (std::size_t j = 0; j < pt.dim(); ++j) {
      if (a(i, j) == 0) continue;
      for (std::size_t k = 0; k < pt.primes.size(); ++k)
        mpz_addmul(out.exps[i][k].get_mpz_t(), a(i, j).get_mpz_t(), pt.exps[j][k].get_mpz_t());
      if (pt.signs[j] < 0 && mpz_odd_p(a(i, j).get_mpz_t())) out.signs[i] = -out.signs[i];
    }
  }
  return out;
}

/// Weil height of [1 : x_1 : ... : x_N]:
///   sum_p log p * max(0, max_i -E_ip) + max(0, max_i sum_p E_ip log p).
inline double torus_height(const FactoredTorusPoint& pt) {
  long double denominators = 0, top = 0;
  for (std::size_t k = 0; k < pt.primes.size(); ++k) {
    ExactInt worst = 0;
    for (std::size_t i = 0; i < pt.dim(); ++i) worst = std::max(worst, ExactInt(-pt.exps[i][k]));
    if (worst > 0) denominators += static_cast<long double>(worst.get_d()) * log_abs(pt.primes[k]);
  }
  for (std::size_t i = 0; i < pt.dim(); ++i) {
    long double s = 0;
    for (std::size_t k = 0; k < pt.primes.size(); ++k)
      if (pt.exps[i][k] != 0)
        s += static_cast<long double>(pt.exps[i][k].get_d()) * log_abs(pt.primes[k]);
    top = std::max(top, s);
  }
  return static_cast<double>(denominators + top);
}

/// max |coordinate| of [1 : x_1 : ... : x_N] in coprime integer form,
/// assembled prime by prime: x_0 carries p^{d_p} with
/// d_p = max(0, max_i -E_ip) and x_i carries p^{E_ip + d_p}.
inline ExactInt torus_height_exact_arg(const FactoredTorusPoint& pt) {
  std::vector<ExactInt> coords(pt.dim() + 1, ExactInt(1));
  for (std::size_t k = 0; k < pt.primes.size(); ++k) {
    ExactInt d = 0;
    for (std::size_t i = 0; i < pt.dim(); ++i) d = std::max(d, ExactInt(-pt.exps[i][k]));
    auto raise = [&](ExactInt& c, const ExactInt& e) {
      if (e == 0) return;
      if (!e.fits_ulong_p()) throw ResourceCapExceeded("exponent too large to assemble");
      c *= pow_int(pt.primes[k], e.get_ui());
    };
    raise(coords[0], d);
    for (std::size_t i = 0; i < pt.dim(); ++i) raise(coords[i + 1], ExactInt(pt.exps[i][k] + d));
  }
  return *std::max_element(coords.begin(), coords.end());
}

/// Heights h(f^n P), n = 0..nmax, under the embedding [1 : x_1 : ... : x_N],
/// computed through the exponents only.
inline HeightSequence monomial_arithdeg(const MonomialMap& f, FactoredTorusPoint pt,
                                        std::size_t nmax) {
  std::string label = f.name() + " @ " + pt.to_string();
  std::vector<double> h;
  h.reserve(nmax + 1);
  h.push_back(torus_height(pt));
  for (std::size_t n = 1; n <= nmax; ++n) {
    pt = monomial_step(f, pt);
    h.push_back(torus_height(pt));
  }
  return HeightSequence::from_heights(std::move(h), std::move(label));
}

struct TorusCycle {
  std::size_t preperiod = 0;
  std::size_t period = 0;
};

/// First exact repeat of f^n(P) for n <= nmax, compared in exponent space.
inline std::optional<TorusCycle> monomial_find_cycle(const MonomialMap& f, FactoredTorusPoint pt,
                                                     std::size_t nmax) {
  std::map<std::string, std::size_t> seen;
  seen.emplace(pt.to_string(), 0);
  for (std::size_t n = 1; n <= nmax; ++n) {
    pt = monomial_step(f, pt);
    auto [it, fresh] = seen.emplace(pt.to_string(), n);
    if (!fresh) return TorusCycle{it->second, n - it->second};
  }
  return std::nullopt;
}

/// delta of a monomial map = rho(A), certified bracket included.
inline SpectralEstimate mon_dyndeg(const MonomialMap& f, double tolerance = 1e-9) {
  return spectral_radius(f.matrix(), tolerance);
}

/// The same map as a rational self-map of P^N: coordinate i (i >= 1) is the
/// Laurent monomial x^{a_i} x_0^{-|a_i|}, all cleared to a common
/// nonnegative exponent.
inline RationalMapPN monomial_to_rational_map(const MonomialMap& f) {
  const std::size_t n = f.dim();
  const auto& a = f.matrix();
  std::vector<std::vector<long>> e(n + 1, std::vector<long>(n + 1, 0));
  for (std::size_t i = 1; i <= n; ++i) {
    long row = 0;
    for (std::size_t j = 1; j <= n; ++j) {
      if (!a(i - 1, j - 1).fits_slong_p()) throw ResourceCapExceeded("matrix entry too large");
      e[i][j] = a(i - 1, j - 1).get_si();
      row += e[i][j];
    }
    e[i][0] = -row;
  }
  std::vector<long> shift(n + 1, 0);
  for (std::size_t k = 0; k <= n; ++k)
    for (std::size_t i = 0; i <= n; ++i) shift[k] = std::max(shift[k], -e[i][k]);
  std::vector<MultiPoly> polys;
  for (std::size_t i = 0; i <= n; ++i) {
    Exponent ex(n + 1);
    for (std::size_t k = 0; k <= n; ++k) ex[k] = static_cast<std::uint32_t>(e[i][k] + shift[k]);
    polys.push_back(MultiPoly::monomial(n + 1, 1, ex));
  }
  return RationalMapPN(std::move(polys), f.name());
}

}  // namespace arithdyn

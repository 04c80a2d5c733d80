#pragma once

// Points of P^N(Q) in coprime integer normal form and their Weil heights.
// Over Q with coprime integer coordinates only the archimedean place
// contributes, so h(P) = log max |x_i|.

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "exact.hpp"

namespace arithdyn {

/// Coprime integer coordinates, first nonzero coordinate positive.
class ProjPointQ {
 public:
  /// Clears denominators, divides by the coordinate gcd and fixes the sign.
  static ProjPointQ normalize(std::span<const ExactRat> raw) {
    ExactInt den = 1;
    for (const auto& q : raw) den = lcm_int(den, q.get_den());
    std::vector<ExactInt> ints;
    ints.reserve(raw.size());
    for (const auto& q : raw) ints.push_back(q.get_num() * (den / q.get_den()));
    return from_integers(std::move(ints));
  }

  static ProjPointQ from_integers(std::vector<ExactInt> coords) {
    if (coords.empty()) throw ContractViolation("point with no coordinates");
    ExactInt g = 0;
    for (const auto& c : coords) g = gcd_int(g, c);
    if (g == 0) throw NotAPoint();
    for (const auto& c : coords)
      if (c != 0) {
        if (c < 0) g = -g;
        break;
      }
    if (g != 1)
      for (auto& c : coords) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), g.get_mpz_t());
    ProjPointQ p;
    p.coords_ = std::move(coords);
    return p;
  }

  static ProjPointQ parse(std::string_view text) {
    auto raw = parse_rational_list(text);
    return normalize(raw);
  }

  std::size_t dim() const { return coords_.size() - 1; }
  const std::vector<ExactInt>& coords() const { return coords_; }
  const ExactInt& operator[](std::size_t i) const { return coords_[i]; }

  std::vector<ExactRat> as_rationals() const {
    return std::vector<ExactRat>(coords_.begin(), coords_.end());
  }

  bool operator==(const ProjPointQ& o) const { return coords_ == o.coords_; }
  bool operator<(const ProjPointQ& o) const {
    if (coords_.size() != o.coords_.size()) return coords_.size() < o.coords_.size();
    for (std::size_t i = 0; i < coords_.size(); ++i)
      if (coords_[i] != o.coords_[i]) return coords_[i] < o.coords_[i];
    return false;
  }

  /// `[2 : 3]`
  std::string to_string() const {
    std::string s = "[";
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      if (i) s += " : ";
      s += coords_[i].get_str();
    }
    return s + "]";
  }

  /// `2,3`, the form accepted by parse().
  std::string to_csv_string() const {
    std::string s;
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      if (i) s += ",";
      s += coords_[i].get_str();
    }
    return s;
  }

 private:
  ProjPointQ() = default;
  std::vector<ExactInt> coords_;
};

/// A height as the log of an exactly known integer.
struct HeightValue {
  double value = 0.0;
  ExactInt exact_arg = 1;
};

inline HeightValue weil_height(const ProjPointQ& p) {
  ExactInt m = 0;
  for (const auto& c : p.coords()) {
    if (mpz_cmpabs(c.get_mpz_t(), m.get_mpz_t()) > 0) m = abs_int(c);
  }
  return HeightValue{log_abs(m), m};
}

/// h+ = max(h, 1).
inline double hplus(const ProjPointQ& p) { return std::max(weil_height(p).value, 1.0); }

/// Height monotonicity under appending coordinates:
/// h([a_0..a_n, b_0..b_m]) >= h([a_0..a_n]). Always true; used as an oracle.
inline bool height_subvector_check(std::span<const ExactRat> full, std::size_t prefix_len) {
  if (prefix_len == 0 || prefix_len > full.size())
    throw ContractViolation("prefix length out of range");
  auto prefix = full.first(prefix_len);
  bool any = std::any_of(prefix.begin(), prefix.end(), [](const ExactRat& q) { return q != 0; });
  if (!any) throw NotAPoint();
  // log is monotone, so comparing the exact integer arguments suffices.
  return weil_height(ProjPointQ::normalize(full)).exact_arg >=
         weil_height(ProjPointQ::normalize(prefix)).exact_arg;
}

}  // namespace arithdyn

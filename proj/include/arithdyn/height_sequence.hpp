#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "exact.hpp"

namespace arithdyn {

/// h(f^n P) and h+(f^n P) = max(h, 1) for n = 0..nmax.
struct HeightSequence {
  std::string source;
  std::vector<double> heights;
  std::vector<double> hplus_values;

  static HeightSequence from_heights(std::vector<double> h, std::string source = {}) {
    HeightSequence s;
    s.source = std::move(source);
    s.hplus_values.reserve(h.size());
    for (double v : h) {
      if (!(v >= 0)) throw ContractViolation("heights must be nonnegative");
      s.hplus_values.push_back(std::max(v, 1.0));
    }
    s.heights = std::move(h);
    return s;
  }

  std::size_t nmax() const { return heights.empty() ? 0 : heights.size() - 1; }
};

}  // namespace arithdyn

// Orbit of [x^2 + y^2 : xy] from [2 : 1], its arithmetic degree and its
// canonical height with the certified error radius.
#include <cstdio>

#include <arithdyn/arithdyn.hpp>

using namespace arithdyn;

int main() {
  const std::vector<std::string> vars = {"x", "y"};
  RationalMapPN f({parse_poly("x^2 + y^2", vars), parse_poly("x*y", vars)}, "sum_of_squares", vars);
  const auto p = ProjPointQ::parse("2,1");

  auto orb = orbit(f, p, 17);
  for (std::size_t n = 0; n <= 5; ++n)
    std::printf("h(f^%zu P) = %s\n", n, format_real(orb.heights[n].value).c_str());

  auto est = arithdeg_estimate(height_sequence(orb), 0.5, height_growth_slack(f));
  std::printf("alpha in [%s, %s]\n", format_real(est.lower_est).c_str(), format_real(est.upper_est).c_str());

  auto k = p1_step_constants(f);
  auto ch = canonical_height(orb, 2.0, CanhtMode::certified_p1, k.c_step(), 16);
  std::printf("canonical height %s +- %s (%s)\n", format_real(ch.value).c_str(),
              format_real(ch.error_radius).c_str(), to_string(ch.mode));
}

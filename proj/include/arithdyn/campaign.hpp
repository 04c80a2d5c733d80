#pragma once

// Runs the estimator checks over a corpus of map specs, one row per
// (map, point). Jobs run on a worker pool; rows keep corpus order.

#include <atomic>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "cache.hpp"
#include "degrees.hpp"
#include "io.hpp"
#include "monomial.hpp"

namespace arithdyn {

struct CampaignOptions {
  double epsilon = 0.1;
  double tail_fraction = 0.5;
  double inequality_tol = 1e-6;
  unsigned threads = 0;  // 0: hardware concurrency
  const FileCache* cache = nullptr;
  ResourceCaps caps{};
};

struct CampaignRow {
  std::string map;
  std::string point;
  std::size_t nmax = 0;
  std::optional<ArithDegreeEstimate> alpha;
  double delta_upper = 0.0;
  bool delta_certified = false;
  bool consistent = true;
  std::optional<CanonicalHeightResult> canht;
  std::optional<GrowthFit> growth;
  std::optional<CanhtLawReport> laws;
  PreperiodicVerdict preperiodic;
  bool preperiodic_expected = false;
  std::string status = "ok";
  bool violation = false;
};

namespace detail {

struct MapContext {
  double delta_upper = 0.0;
  bool delta_certified = false;
  std::string error;
};

inline MapContext map_context(const MapSpec& s, const CampaignOptions& opt) {
  MapContext c;
  try {
    switch (s.kind) {
      case MapKind::rational: {
        auto seq = cached_degree_sequence(*s.rational, std::max<std::size_t>(1, s.degree_n), opt.cache, opt.caps);
        auto est = dyndeg_estimate(seq);
        c.delta_upper = est.certified_upper;
        c.delta_certified = est.certified;
        break;
      }
      case MapKind::monomial: {
        auto sr = mon_dyndeg(*s.monomial);
        c.delta_upper = sr.upper;
        c.delta_certified = true;
        break;
      }
      case MapKind::heights_fixture:
        c.delta_upper = s.delta_upper;
        c.delta_certified = true;
        break;
    }
  } catch (const std::exception& e) {
    c.error = e.what();
  }
  return c;
}

inline bool listed(const std::vector<std::string>& v, const std::string& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

inline void finish_row(CampaignRow& r, const HeightSequence& hs, const CampaignOptions& opt, double slack) {
  if (hs.hplus_values.size() >= 5) {
    r.alpha = arithdeg_estimate(hs, opt.tail_fraction, slack);
    r.consistent = fundamental_inequality_check(*r.alpha, r.delta_upper, opt.inequality_tol).consistent;
  }
  if (hs.hplus_values.size() >= 2) r.growth = growth_fit(hs, r.delta_upper, opt.epsilon);
}

inline void rational_row(CampaignRow& r, const MapSpec& s, const std::string& pt, const CampaignOptions& opt) {
  const auto& f = *s.rational;
  const auto p = ProjPointQ::parse(pt);
  if (p.dim() != f.dim()) throw ContractViolation("point dimension does not match the map");
  const std::size_t n = s.orbit_n;
  auto orb = cached_orbit(f, p, n + 1, opt.cache);
  const std::size_t known = std::min(orb.known_length(), n + 1);
  std::vector<double> h;
  for (std::size_t k = 0; k < known; ++k) h.push_back(orb.height_at(k).value);
  r.nmax = known - 1;
  auto hs = HeightSequence::from_heights(std::move(h), s.name + " @ " + pt);
  finish_row(r, hs, opt, height_growth_slack(f));
  if (orb.terminated_by == OrbitEnd::hit_indeterminacy) {
    r.status = "indeterminate";
    r.preperiodic = preperiodic_detect(orb);
    return;
  }
  const bool power = f.is_power_map();
  const bool p1 = !power && f.dim() == 1 && is_morphism_p1(f);
  double beta = 0;
  CanhtMode mode = CanhtMode::heuristic;
  std::optional<double> c_step;
  if (power || p1) {
    beta = f.degree();
    mode = certified_mode_for(f, beta);
    c_step = certified_step_constant(f, mode);
  } else if (r.delta_upper > 1 + 1e-9) {
    beta = r.delta_upper;
  }
  if (beta > 1) {
    auto at_p = canonical_height(orb, beta, mode, c_step, n, 0, r.delta_upper, opt.epsilon);
    auto at_fp = canonical_height(orb, beta, mode, c_step, n, 1, r.delta_upper, opt.epsilon);
    r.laws = canht_functional_checks(orb.heights[0].value, at_p, at_fp, r.alpha);
    r.canht = std::move(at_p);
  }
  r.preperiodic = preperiodic_detect(orb, r.canht);
}

inline void monomial_row(CampaignRow& r, const MapSpec& s, const std::string& pt, const CampaignOptions& opt) {
  const auto& f = *s.monomial;
  const auto coords = parse_rational_list(pt);
  if (coords.size() != f.dim()) throw ContractViolation("point dimension does not match the map");
  const auto fp = factor_point(coords);
  const std::size_t n = s.orbit_n;
  auto hs = monomial_arithdeg(f, fp, n);
  r.nmax = n;
  finish_row(r, hs, opt, 0.0);
  if (auto cyc = monomial_find_cycle(f, fp, n)) {
    r.preperiodic = {PreperiodicKind::preperiodic, cyc->period, cyc->preperiod};
    return;
  }
  if (r.delta_upper > 1 + 1e-9) {
    const double beta = r.delta_upper;
    auto at_p = canonical_height_from_heights(std::span<const double>(hs.heights).first(n), beta,
                                              detail::observed_step_error(hs.heights, beta),
                                              CanhtMode::heuristic);
    auto at_fp = canonical_height_from_heights(std::span<const double>(hs.heights).subspan(1), beta,
                                               at_p.c_step, CanhtMode::heuristic);
    at_p.gamma = (r.delta_upper + opt.epsilon) / (beta * beta);
    r.laws = canht_functional_checks(hs.heights[0], at_p, at_fp, r.alpha);
    r.canht = std::move(at_p);
  }
}

inline CampaignRow run_job(const MapSpec& s, const MapContext& ctx, const std::string& pt,
                           const CampaignOptions& opt) {
  CampaignRow r;
  r.map = s.name;
  r.point = pt;
  r.delta_upper = ctx.delta_upper;
  r.delta_certified = ctx.delta_certified;
  r.preperiodic_expected = listed(s.known_preperiodic, pt);
  if (!ctx.error.empty()) {
    r.status = "error: " + ctx.error;
    r.violation = true;
    return r;
  }
  try {
    switch (s.kind) {
      case MapKind::rational: rational_row(r, s, pt, opt); break;
      case MapKind::monomial: monomial_row(r, s, pt, opt); break;
      case MapKind::heights_fixture: {
        auto hs = HeightSequence::from_heights(s.heights, s.name);
        r.nmax = hs.nmax();
        finish_row(r, hs, opt, 0.0);
        break;
      }
    }
  } catch (const ResourceCapExceeded& e) {
    r.status = std::string("resource_cap: ") + e.what();
    return r;
  } catch (const std::exception& e) {
    r.status = std::string("error: ") + e.what();
    r.violation = true;
    return r;
  }
  const bool laws_failed = r.laws && r.laws->certified && !r.laws->all_ok();
  const bool growth_failed = r.growth && !r.growth->conforming();
  bool prep_mismatch = false;
  if (s.kind != MapKind::heights_fixture) {
    const bool found = r.preperiodic.kind == PreperiodicKind::preperiodic;
    prep_mismatch = found != r.preperiodic_expected;
  }
  r.violation = !r.consistent || laws_failed || growth_failed || prep_mismatch;
  if (r.violation && r.status == "ok") r.status = "violation";
  return r;
}

template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) fn(i);
  };
  if (threads <= 1) {
    worker();
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

}  // namespace detail

inline std::vector<CampaignRow> run_campaign(const std::vector<MapSpec>& corpus, const CampaignOptions& opt = {}) {
  std::vector<detail::MapContext> ctx(corpus.size());
  detail::parallel_for(corpus.size(), opt.threads,
                       [&](std::size_t i) { ctx[i] = detail::map_context(corpus[i], opt); });
  std::vector<std::pair<std::size_t, std::size_t>> jobs;
  for (std::size_t i = 0; i < corpus.size(); ++i)
    for (std::size_t k = 0; k < corpus[i].points.size(); ++k) jobs.emplace_back(i, k);
  std::vector<CampaignRow> rows(jobs.size());
  detail::parallel_for(jobs.size(), opt.threads, [&](std::size_t j) {
    const auto [i, k] = jobs[j];
    rows[j] = detail::run_job(corpus[i], ctx[i], corpus[i].points[k], opt);
  });
  return rows;
}

inline std::size_t count_violations(const std::vector<CampaignRow>& rows) {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.violation; }));
}

inline const std::vector<std::string>& campaign_columns() {
  static const std::vector<std::string> cols = {
      "map",         "point",       "nmax",       "alpha_lower", "alpha_upper",
      "delta_upper_cert", "consistent", "canht_value", "canht_error", "mode",
      "growth_cfit", "growth_ok",   "canht_laws", "preperiodic", "status"};
  return cols;
}

inline std::vector<std::string> campaign_fields(const CampaignRow& r) {
  auto opt_real = [](const std::optional<double>& v) { return v ? format_real(*v) : std::string("n/a"); };
  std::string laws = "n/a";
  if (r.laws) laws = r.laws->certified ? (r.laws->all_ok() ? "pass" : "fail") : "uncertified";
  std::string prep = to_string(r.preperiodic.kind);
  if (r.preperiodic.kind == PreperiodicKind::preperiodic)
    prep += "(" + std::to_string(r.preperiodic.period) + "," + std::to_string(r.preperiodic.preperiod) + ")";
  return {r.map,
          r.point,
          std::to_string(r.nmax),
          r.alpha ? format_real(r.alpha->lower_est) : "n/a",
          r.alpha ? format_real(r.alpha->upper_est) : "n/a",
          format_real(r.delta_upper) + (r.delta_certified ? "" : " (uncertified)"),
          format_bool(r.consistent),
          r.canht ? format_real(r.canht->value) : "n/a",
          r.canht ? format_real(r.canht->error_radius) : "n/a",
          r.canht ? to_string(r.canht->mode) : "none",
          r.growth ? opt_real(r.growth->C_fit) : "n/a",
          r.growth ? format_bool(r.growth->conforming()) : "n/a",
          laws,
          prep,
          r.status};
}

inline std::string campaign_csv(const std::vector<CampaignRow>& rows) {
  std::string out = "# heights on the natural-log scale; mode tags certify canht_value\n";
  out += csv_line(campaign_columns());
  for (const auto& r : rows) out += csv_line(campaign_fields(r));
  return out;
}

inline std::string campaign_json(const std::vector<CampaignRow>& rows) {
  ordered_json arr = ordered_json::array();
  const auto& cols = campaign_columns();
  for (const auto& r : rows) {
    ordered_json j;
    auto f = campaign_fields(r);
    for (std::size_t i = 0; i < cols.size(); ++i) j[cols[i]] = f[i];
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

}  // namespace arithdyn

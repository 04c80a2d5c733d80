#pragma once

// Command bodies for the arithdyn tool. Each writes its report to `out`,
// notes to `err`, and returns the process exit code.
//
// Exit codes: 0 ok, 1 violation or inconsistency found, 2 usage or parse
// error, 3 resource cap exceeded. An orbit stopping at the indeterminacy
// locus is data, not an error: it exits 0 with a termination note.

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "campaign.hpp"

namespace arithdyn::cli {

enum ExitCode : int { kOk = 0, kViolation = 1, kUsage = 2, kResourceCap = 3 };

enum class OutFormat { csv, json };

struct CommonOptions {
  bool use_cache = false;
  OutFormat format = OutFormat::csv;
};

/// Runs body and maps toolkit errors onto exit codes.
template <class Fn>
int guarded(std::ostream& err, Fn&& body) {
  try {
    return body();
  } catch (const ResourceCapExceeded& e) {
    err << "resource cap: " << e.what() << "\n";
    return kResourceCap;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const IndeterminatePoint& e) {
    err << "indeterminate: " << e.what() << "\n";
    return kViolation;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << "\n";
    return kUsage;
  } catch (const std::domain_error& e) {
    err << "unsupported: " << e.what() << "\n";
    return kUsage;
  }
}

namespace detail {

inline std::optional<FileCache> make_cache(const CommonOptions& o) {
  if (!o.use_cache) return std::nullopt;
  return FileCache{};
}

inline const RationalMapPN& require_rational(const MapSpec& s) {
  if (s.kind != MapKind::rational) throw ContractViolation("this command needs a rational map spec");
  return *s.rational;
}

inline std::vector<double> parse_real_list(std::string_view text) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) {
    auto t = std::string(trim(part));
    char* end = nullptr;
    double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size()) throw ParseError("bad number '" + t + "'");
    out.push_back(v);
  }
  return out;
}

/// Heights of f^n(P), n = 0..nmax, for either map kind, plus the slack
/// used by the arithmetic-degree estimator.
struct HeightsWithSlack {
  HeightSequence hs;
  double slack = 0.0;
  std::optional<OrbitRecord> orbit;
};

inline HeightsWithSlack heights_for(const MapSpec& s, const std::string& point, std::size_t n,
                                    const FileCache* cache) {
  HeightsWithSlack r;
  if (s.kind == MapKind::monomial) {
    auto pt = factor_point(parse_rational_list(point));
    r.hs = monomial_arithdeg(*s.monomial, std::move(pt), n);
    return r;
  }
  const auto& f = require_rational(s);
  auto p = ProjPointQ::parse(point);
  if (p.dim() != f.dim()) throw ContractViolation("point dimension does not match the map");
  r.orbit = cached_orbit(f, p, n, cache);
  r.hs = height_sequence(*r.orbit, s.name + " @ " + point);
  r.slack = height_growth_slack(f);
  return r;
}

}  // namespace detail

inline int cmd_orbit(const std::string& map_file, const std::string& point, std::size_t n,
                     const CommonOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto spec = load_map_spec(map_file);
    const auto& f = detail::require_rational(spec);
    auto p = ProjPointQ::parse(point);
    if (p.dim() != f.dim()) throw ContractViolation("point dimension does not match the map");
    auto cache = detail::make_cache(o);
    auto orb = cached_orbit(f, p, n, cache ? &*cache : nullptr);
    std::string note;
    if (orb.terminated_by == OrbitEnd::hit_indeterminacy)
      note = "hit_indeterminacy at step " + std::to_string(orb.step);
    else if (orb.terminated_by == OrbitEnd::cycle_detected)
      note = "cycle_detected period " + std::to_string(orb.period) + " preperiod " +
             std::to_string(orb.preperiod);
    if (o.format == OutFormat::json) {
      ordered_json j;
      j["map"] = spec.name;
      j["point"] = p.to_csv_string();
      j["nmax"] = n;
      j["terminated_by"] = to_string(orb.terminated_by);
      j["step"] = orb.step;
      ordered_json rows = ordered_json::array();
      for (std::size_t k = 0; k < orb.points.size(); ++k)
        rows.push_back({{"n", k},
                        {"point", orb.points[k].to_csv_string()},
                        {"height_exact_arg", orb.heights[k].exact_arg.get_str()},
                        {"height", format_real(orb.heights[k].value)},
                        {"cert", "exact"}});
      j["rows"] = rows;
      out << j.dump(2) << "\n";
    } else {
      out << "# height = log(height_exact_arg), natural log\n";
      out << csv_line({"n", "point", "height_exact_arg", "height", "cert"});
      for (std::size_t k = 0; k < orb.points.size(); ++k)
        out << csv_line({std::to_string(k), orb.points[k].to_csv_string(), orb.heights[k].exact_arg.get_str(),
                         format_real(orb.heights[k].value), "exact"});
      if (!note.empty()) out << "# terminated: " << note << "\n";
    }
    return int(kOk);
  });
}

inline int cmd_dyndeg(const std::string& map_file, std::size_t n, const CommonOptions& o,
                      std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto spec = load_map_spec(map_file);
    if (spec.kind == MapKind::monomial) {
      auto sr = mon_dyndeg(*spec.monomial);
      out << csv_line({"quantity", "value", "cert"});
      out << csv_line({"delta", format_real(sr.value),
                       "certified_bracket[" + format_real(sr.lower) + "," + format_real(sr.upper) + "]"});
      return int(kOk);
    }
    const auto& f = detail::require_rational(spec);
    auto cache = detail::make_cache(o);
    auto seq = cached_degree_sequence(f, n, cache ? &*cache : nullptr);
    auto est = dyndeg_estimate(seq);
    out << csv_line({"n", "deg", "upper_bound", "cert"});
    for (std::size_t k = 1; k <= seq.nmax(); ++k)
      out << csv_line({std::to_string(k), seq.deg(k).get_str(), format_real(est.upper_bounds[k - 1]),
                       "exact_degree"});
    out << csv_line({"delta_upper", "", format_real(est.certified_upper),
                     est.certified ? "certified(fekete)" : "uncertified(submultiplicativity failed)"});
    if (est.ratio) out << csv_line({"delta_ratio", "", format_real(*est.ratio), "heuristic"});
    if (seq.truncated) out << "# truncated: " << seq.truncation_reason << "\n";
    return int(seq.truncated ? kResourceCap : kOk);
  });
}

inline int cmd_arithdeg(const std::string& map_file, const std::string& point, std::size_t n,
                        double tail_fraction, const CommonOptions& o, std::ostream& out,
                        std::ostream& err) {
  return guarded(err, [&] {
    auto spec = load_map_spec(map_file);
    auto cache = detail::make_cache(o);
    auto h = detail::heights_for(spec, point, n, cache ? &*cache : nullptr);
    auto est = arithdeg_estimate(h.hs, tail_fraction, h.slack);
    out << csv_line({"quantity", "value", "cert"});
    out << csv_line({"alpha_lower", format_real(est.lower_est), "estimate"});
    out << csv_line({"alpha_upper", format_real(est.upper_est), "estimate"});
    out << csv_line({"spread", format_real(est.spread), est.converged ? "converged" : "not_converged"});
    out << csv_line({"tail_start", std::to_string(est.tail_start), "index"});
    out << csv_line({"naive_root", format_real(est.naive_root), "diagnostic"});
    out << csv_line({"slack", format_real(est.slack), "exact_bound"});
    if (h.orbit && h.orbit->terminated_by == OrbitEnd::hit_indeterminacy)
      out << "# terminated: hit_indeterminacy at step " << h.orbit->step << "\n";
    return int(kOk);
  });
}

inline int cmd_canht(const std::string& map_file, const std::string& point, const std::string& beta_text,
                     bool certified, std::size_t n, const CommonOptions& o, std::ostream& out,
                     std::ostream& err) {
  return guarded(err, [&] {
    auto spec = load_map_spec(map_file);
    const auto& f = detail::require_rational(spec);
    const double beta = parse_rational(beta_text).get_d();
    auto p = ProjPointQ::parse(point);
    if (p.dim() != f.dim()) throw ContractViolation("point dimension does not match the map");
    const CanhtMode mode = certified ? certified_mode_for(f, beta) : CanhtMode::heuristic;
    auto cache = detail::make_cache(o);
    auto orb = cached_orbit(f, p, n + 1, cache ? &*cache : nullptr);
    auto c = certified_step_constant(f, mode);
    auto res = canonical_height(orb, beta, mode, c, n);
    const std::string tag = to_string(mode);
    out << csv_line({"quantity", "value", "cert"});
    out << csv_line({"canht", format_real(res.value), tag});
    out << csv_line({"error_radius", format_real(res.error_radius), tag});
    out << csv_line({"c_step", format_real(res.c_step), res.certified() ? "certified" : "observed"});
    out << csv_line({"n_used", std::to_string(res.n_used), "index"});
    if (res.gamma) out << csv_line({"gamma", format_real(*res.gamma), "diagnostic"});
    auto verdict = preperiodic_detect(orb, res);
    out << csv_line({"orbit", to_string(verdict.kind), res.preperiodic ? "exact_cycle" : tag});
    return int(kOk);
  });
}

inline int cmd_count(const std::string& map_file, const std::string& point, const std::string& b_list,
                     std::size_t n, const CommonOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto spec = load_map_spec(map_file);
    auto cache = detail::make_cache(o);
    auto h = detail::heights_for(spec, point, n, cache ? &*cache : nullptr);
    auto bs = detail::parse_real_list(b_list);
    auto res = counting_function(h.hs, bs, h.slack);
    out << "# B bounds the log height: count = #{n <= " << h.hs.nmax() << " : h(f^n P) <= B}\n";
    out << csv_line({"B", "count", "ratio", "cert"});
    for (const auto& r : res.rows)
      out << csv_line({format_real(r.B), std::to_string(r.count), format_real(r.ratio), "exact_count"});
    if (res.warning) {
      out << "# warning: " << *res.warning << "\n";
    } else {
      out << csv_line({"limit", "", format_real(res.predicted_limit), "estimate(1/log alpha)"});
    }
    return int(kOk);
  });
}

inline int cmd_spectral(const std::string& matrix, double tolerance, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto a = IntMat::parse(matrix);
    auto sr = spectral_radius(a, tolerance);
    out << csv_line({"quantity", "value", "cert"});
    out << csv_line({"rho", format_real(sr.value),
                     "certified_bracket[" + format_real(sr.lower) + "," + format_real(sr.upper) + "]"});
    out << csv_line({"width", format_real(sr.width()), "certified"});
    if (a.nonnegative()) {
      auto ev = birkhoff_cone_eigvec(a);
      std::string v;
      for (std::size_t i = 0; i < ev.vector.size(); ++i) v += (i ? ";" : "") + format_real(ev.vector[i]);
      out << csv_line({"cone_eigenvector", v, "residual=" + format_real(ev.residual)});
    }
    return int(kOk);
  });
}

inline void write_or_print(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ParseError("cannot write " + path);
  f << text;
}

inline int cmd_campaign(const std::string& corpus_dir, const std::string& csv_file, const std::string& json_file,
                        unsigned threads, const CommonOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto corpus = load_corpus(corpus_dir);
    if (corpus.empty()) err << "warning: no map specs in " << corpus_dir << "\n";
    auto cache = detail::make_cache(o);
    CampaignOptions opt;
    opt.threads = threads;
    opt.cache = cache ? &*cache : nullptr;
    auto rows = run_campaign(corpus, opt);
    write_or_print(csv_file, campaign_csv(rows), out);
    if (!json_file.empty()) write_or_print(json_file, campaign_json(rows), out);
    const auto bad = count_violations(rows);
    err << rows.size() << " rows, " << bad << " violations\n";
    return int(bad ? kViolation : kOk);
  });
}

}  // namespace arithdyn::cli

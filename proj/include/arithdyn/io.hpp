#pragma once

// Map-spec files, orbit and degree-sequence serialization, CSV output.
//
// A canonical map-spec file is exactly serialize_map_spec(parse_map_spec(text)):
// fixed key order, two-space indent, polynomials in normalized text form,
// trailing newline.

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "degrees.hpp"
#include "monomial.hpp"
#include "projmaps.hpp"

namespace arithdyn {

inline constexpr const char* kToolkitVersion = "arithdyn 1.0.0";
inline constexpr int kMapSpecFormat = 1;

using ordered_json = nlohmann::ordered_json;

enum class MapKind { rational, monomial, heights_fixture };

inline const char* to_string(MapKind k) {
  switch (k) {
    case MapKind::rational: return "rational";
    case MapKind::monomial: return "monomial";
    case MapKind::heights_fixture: return "heights_fixture";
  }
  return "?";
}

struct MapSpec {
  int format_version = kMapSpecFormat;
  MapKind kind = MapKind::rational;
  std::string name;
  std::optional<RationalMapPN> rational;
  std::optional<MonomialMap> monomial;
  std::vector<std::string> points;
  std::vector<std::string> known_preperiodic;  // subset of points
  std::size_t orbit_n = 16;
  std::size_t degree_n = 6;
  // heights_fixture only
  double delta_upper = 1.0;
  std::vector<double> heights;
  std::string path;  // where it was loaded from; not serialized

  const std::string& label() const { return name; }
};

namespace detail {
template <class T>
T json_get(const ordered_json& j, const char* key) {
  if (!j.contains(key)) throw ParseError(std::string("missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad value for '") + key + "': " + e.what());
  }
}

template <class T>
T json_get_or(const ordered_json& j, const char* key, T fallback) {
  return j.contains(key) ? json_get<T>(j, key) : fallback;
}

/// A polynomial as text, or as a term list [{"c": "<int>", "e": [..]}, ...]
/// with decimal-string coefficients.
inline MultiPoly poly_from_json(const ordered_json& p, const std::vector<std::string>& vars) {
  if (p.is_string()) return parse_poly(p.get<std::string>(), vars);
  if (!p.is_array()) throw ParseError("a polynomial must be a string or a term list");
  std::vector<Term> terms;
  for (const auto& t : p) {
    if (!t.is_object() || !t.contains("c") || !t.contains("e")) throw ParseError("term needs 'c' and 'e'");
    const auto& c = t["c"];
    ExactInt coeff = c.is_string() ? parse_int(c.get<std::string>())
                     : c.is_number_integer() ? ExactInt(c.get<long>())
                                             : throw ParseError("term coefficient must be an integer");
    auto e = json_get<std::vector<std::uint32_t>>(t, "e");
    if (e.size() != vars.size()) throw ParseError("exponent vector length mismatch");
    terms.push_back({std::move(coeff), std::move(e)});
  }
  if (terms.empty()) return MultiPoly(vars.size());
  try {
    return MultiPoly::from_terms(vars.size(), std::move(terms));
  } catch (const ContractViolation& e) {
    throw ParseError(std::string("invalid polynomial: ") + e.what());
  }
}
}  // namespace detail

inline MapSpec parse_map_spec(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("map spec must be a JSON object");
  MapSpec s;
  s.format_version = detail::json_get_or<int>(j, "format_version", kMapSpecFormat);
  if (s.format_version != kMapSpecFormat)
    throw ParseError("unsupported format_version " + std::to_string(s.format_version));
  const auto kind = detail::json_get<std::string>(j, "kind");
  s.name = detail::json_get_or<std::string>(j, "name", "");
  s.points = detail::json_get_or<std::vector<std::string>>(j, "points", {});
  s.known_preperiodic = detail::json_get_or<std::vector<std::string>>(j, "known_preperiodic", {});
  s.orbit_n = detail::json_get_or<std::size_t>(j, "orbit_n", s.orbit_n);
  s.degree_n = detail::json_get_or<std::size_t>(j, "degree_n", s.degree_n);
  if (kind == "rational") {
    s.kind = MapKind::rational;
    if (!j.contains("polys") || !j["polys"].is_array()) throw ParseError("missing array 'polys'");
    const auto& polys = j["polys"];
    auto vars = detail::json_get_or<std::vector<std::string>>(j, "vars", default_var_names(polys.size()));
    if (vars.size() != polys.size()) throw ParseError("need one variable name per polynomial");
    if (j.contains("dim") && detail::json_get<std::size_t>(j, "dim") + 1 != polys.size())
      throw ParseError("'dim' does not match the number of polynomials");
    std::vector<MultiPoly> ps;
    for (const auto& p : polys) ps.push_back(detail::poly_from_json(p, vars));
    try {
      s.rational.emplace(std::move(ps), s.name, vars);
    } catch (const ContractViolation& e) {
      throw ParseError(std::string("invalid map: ") + e.what());
    }
  } else if (kind == "monomial") {
    s.kind = MapKind::monomial;
    try {
      s.monomial.emplace(IntMat::parse(detail::json_get<std::string>(j, "matrix")), s.name);
    } catch (const ContractViolation& e) {
      throw ParseError(std::string("invalid monomial map: ") + e.what());
    }
  } else if (kind == "heights_fixture") {
    s.kind = MapKind::heights_fixture;
    s.delta_upper = detail::json_get<double>(j, "delta_upper");
    s.heights = detail::json_get<std::vector<double>>(j, "heights");
    if (s.points.empty()) s.points.push_back("synthetic");
  } else {
    throw ParseError("unknown map kind '" + kind + "'");
  }
  return s;
}

inline std::string serialize_map_spec(const MapSpec& s) {
  ordered_json j;
  j["format_version"] = s.format_version;
  j["kind"] = to_string(s.kind);
  j["name"] = s.name;
  switch (s.kind) {
    case MapKind::rational: {
      const auto& f = *s.rational;
      j["vars"] = f.vars();
      std::vector<std::string> polys;
      for (const auto& p : f.polys()) polys.push_back(to_string(p, f.vars()));
      j["polys"] = polys;
      break;
    }
    case MapKind::monomial: {
      const auto& a = s.monomial->matrix();
      std::string m;
      for (std::size_t i = 0; i < a.dim(); ++i) {
        if (i) m += ";";
        for (std::size_t k = 0; k < a.dim(); ++k) {
          if (k) m += ",";
          m += a(i, k).get_str();
        }
      }
      j["matrix"] = m;
      break;
    }
    case MapKind::heights_fixture:
      j["delta_upper"] = s.delta_upper;
      j["heights"] = s.heights;
      break;
  }
  j["points"] = s.points;
  if (!s.known_preperiodic.empty()) j["known_preperiodic"] = s.known_preperiodic;
  if (s.kind != MapKind::heights_fixture) j["orbit_n"] = s.orbit_n;
  if (s.kind == MapKind::rational) j["degree_n"] = s.degree_n;
  return j.dump(2) + "\n";
}

inline std::string read_text_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ParseError("cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline MapSpec load_map_spec(const std::filesystem::path& p) {
  MapSpec s = parse_map_spec(read_text_file(p));
  s.path = p.string();
  if (s.name.empty()) s.name = p.stem().string();
  return s;
}

/// Every *.json file in dir, sorted by file name.
inline std::vector<MapSpec> load_corpus(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw ParseError("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<MapSpec> out;
  for (const auto& f : files) out.push_back(load_map_spec(f));
  return out;
}

// ---------------------------------------------------------------------------
// Orbit and degree-sequence payloads

inline ordered_json orbit_to_json(const OrbitRecord& o) {
  ordered_json j;
  j["nmax"] = o.nmax;
  j["terminated_by"] = to_string(o.terminated_by);
  j["step"] = o.step;
  j["period"] = o.period;
  j["preperiod"] = o.preperiod;
  std::vector<std::string> pts;
  for (const auto& p : o.points) pts.push_back(p.to_csv_string());
  j["points"] = pts;
  return j;
}

inline OrbitRecord orbit_from_json(const ordered_json& j) {
  OrbitRecord o;
  o.nmax = detail::json_get<std::size_t>(j, "nmax");
  const auto end = detail::json_get<std::string>(j, "terminated_by");
  if (end == "reached_nmax") o.terminated_by = OrbitEnd::reached_nmax;
  else if (end == "hit_indeterminacy") o.terminated_by = OrbitEnd::hit_indeterminacy;
  else if (end == "cycle_detected") o.terminated_by = OrbitEnd::cycle_detected;
  else throw ParseError("unknown orbit end '" + end + "'");
  o.step = detail::json_get<std::size_t>(j, "step");
  o.period = detail::json_get<std::size_t>(j, "period");
  o.preperiod = detail::json_get<std::size_t>(j, "preperiod");
  for (const auto& s : detail::json_get<std::vector<std::string>>(j, "points")) {
    o.points.push_back(ProjPointQ::parse(s));
    o.heights.push_back(weil_height(o.points.back()));
  }
  return o;
}

inline ordered_json degrees_to_json(const DegreeSequence& d) {
  ordered_json j;
  j["label"] = d.label;
  std::vector<std::string> degs;
  for (const auto& x : d.degs) degs.push_back(x.get_str());
  j["degs"] = degs;
  j["truncated"] = d.truncated;
  j["truncation_reason"] = d.truncation_reason;
  return j;
}

inline DegreeSequence degrees_from_json(const ordered_json& j) {
  DegreeSequence d;
  d.label = detail::json_get<std::string>(j, "label");
  for (const auto& s : detail::json_get<std::vector<std::string>>(j, "degs")) d.degs.push_back(parse_int(s));
  d.truncated = detail::json_get<bool>(j, "truncated");
  d.truncation_reason = detail::json_get<std::string>(j, "truncation_reason");
  return d;
}

// ---------------------------------------------------------------------------
// CSV

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string csv_line(const std::vector<std::string>& fields) {
  std::string s;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) s += ",";
    s += csv_field(fields[i]);
  }
  return s + "\n";
}

inline std::string format_bool(bool b) { return b ? "true" : "false"; }

}  // namespace arithdyn

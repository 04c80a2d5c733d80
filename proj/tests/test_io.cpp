#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include <arithdyn/cli.hpp>

#include "support.hpp"

using namespace arithdyn;
namespace fs = std::filesystem;

namespace {

const fs::path kCorpus = ARITHDYN_CORPUS_DIR;
const fs::path kFixtures = ARITHDYN_FIXTURE_DIR;

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("arithdyn_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& text) {
  auto p = dir / name;
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

struct Run {
  int code;
  std::string out, err;
};

template <class Fn>
Run capture(Fn&& fn) {
  std::ostringstream out, err;
  int code = fn(out, err);
  return {code, out.str(), err.str()};
}

TEST(MapSpec, CorpusFilesAreCanonical) {
  auto corpus = load_corpus(kCorpus);
  ASSERT_GE(corpus.size(), 12u);
  for (const auto& s : corpus) {
    EXPECT_EQ(serialize_map_spec(s), read_text_file(s.path)) << s.path;
    EXPECT_EQ(serialize_map_spec(parse_map_spec(serialize_map_spec(s))), serialize_map_spec(s));
    EXPECT_GE(s.points.size(), 3u) << s.name;
    for (const auto& p : s.known_preperiodic)
      EXPECT_NE(std::find(s.points.begin(), s.points.end(), p), s.points.end()) << s.name << " " << p;
  }
  for (const auto* f : {"growth_violation.json", "corrupted/corrupted_heights.json"}) {
    auto s = load_map_spec(kFixtures / f);
    EXPECT_EQ(serialize_map_spec(s), read_text_file(kFixtures / f)) << f;
  }
}

TEST(MapSpec, CorpusCoversTheRequiredFamilies) {
  auto corpus = load_corpus(kCorpus);
  int power = 0, p1 = 0, monomial = 0, automorphism = 0;
  bool cremona = false, henon = false;
  for (const auto& s : corpus) {
    if (s.kind == MapKind::monomial) {
      ++monomial;
      auto det = determinant(s.monomial->matrix());
      if ((det == 1 || det == -1) && mon_dyndeg(*s.monomial).lower > 1) ++automorphism;
      continue;
    }
    const auto& f = *s.rational;
    if (f.is_power_map()) ++power;
    else if (f.dim() == 1 && is_morphism_p1(f)) ++p1;
    cremona = cremona || s.name == "cremona";
    henon = henon || s.name == "henon";
  }
  EXPECT_GE(power, 1);
  EXPECT_GE(p1, 5);
  EXPECT_EQ(monomial, 4);
  EXPECT_GE(automorphism, 1);
  EXPECT_TRUE(cremona);
  EXPECT_TRUE(henon);
}

TEST(MapSpec, TermListFormMatchesTextForm) {
  auto a = parse_map_spec(R"({"kind":"rational","name":"s","dim":1,"vars":["x","y"],
    "polys":[[{"c":"1","e":[2,0]},{"c":"1","e":[0,2]}],[{"c":"1","e":[1,1]}]],"points":["2,1"]})");
  auto b = parse_map_spec(R"({"kind":"rational","name":"s","vars":["x","y"],
    "polys":["x^2 + y^2","x*y"],"points":["2,1"]})");
  EXPECT_EQ(*a.rational, *b.rational);
  EXPECT_EQ(serialize_map_spec(a), serialize_map_spec(b));
  auto big = parse_map_spec(R"({"kind":"rational","polys":[[{"c":"123456789012345678901234567890","e":[1,0]}],
    [{"c":"-1","e":[0,1]}]]})");
  EXPECT_EQ(big.rational->polys()[0].leading().coeff, ExactInt("123456789012345678901234567890"));
}

TEST(MapSpec, Errors) {
  EXPECT_THROW(parse_map_spec("{not json"), ParseError);
  EXPECT_THROW(parse_map_spec("[1,2]"), ParseError);
  EXPECT_THROW(parse_map_spec(R"({"kind":"elliptic"})"), ParseError);
  EXPECT_THROW(parse_map_spec(R"({"format_version":9,"kind":"rational","polys":["x","y"]})"), ParseError);
  EXPECT_THROW(parse_map_spec(R"({"kind":"rational"})"), ParseError);
  EXPECT_THROW(parse_map_spec(R"({"kind":"rational","dim":2,"polys":["x","y"]})"), ParseError);
  EXPECT_THROW(parse_map_spec(R"({"kind":"rational","polys":["x^2","y"]})"), ParseError);
  EXPECT_THROW(parse_map_spec(R"({"kind":"rational","polys":[[{"c":1.5,"e":[1,0]}],["y"]]})"), ParseError);
  EXPECT_THROW(parse_map_spec(R"({"kind":"rational","polys":[[{"c":"1","e":[1]}],"y"]})"), ParseError);
  EXPECT_THROW(parse_map_spec(R"({"kind":"monomial","matrix":"1,2;2,4"})"), ParseError);
  EXPECT_THROW(parse_map_spec(R"({"kind":"heights_fixture","heights":[1,2]})"), ParseError);
  EXPECT_THROW(load_map_spec("/nonexistent/map.json"), ParseError);
  EXPECT_THROW(load_corpus("/nonexistent"), ParseError);
}

TEST(MapSpec, NameDefaultsToFileStem) {
  TempDir t("stem");
  auto p = write_file(t.path, "my_map.json", R"({"kind":"rational","polys":["x^2","y^2"],"points":["2,1"]})");
  EXPECT_EQ(load_map_spec(p).name, "my_map");
}

TEST(Serialization, OrbitRoundTrip) {
  auto f = testsupport::map_of({"x^2 - 2*y^2", "y^2"});
  for (const char* p : {"3,1", "0,1", "1,3"}) {
    auto o = orbit(f, ProjPointQ::parse(p), 8);
    auto back = orbit_from_json(orbit_to_json(o));
    EXPECT_EQ(back.points, o.points);
    EXPECT_EQ(back.terminated_by, o.terminated_by);
    EXPECT_EQ(back.period, o.period);
    EXPECT_EQ(back.preperiod, o.preperiod);
    ASSERT_EQ(back.heights.size(), o.heights.size());
    for (std::size_t k = 0; k < o.heights.size(); ++k) EXPECT_EQ(back.heights[k].exact_arg, o.heights[k].exact_arg);
  }
  auto cr = testsupport::map_of({"y*z", "x*z", "x*y"}, {"x", "y", "z"});
  auto o = orbit(cr, ProjPointQ::parse("1,0,0"), 3);
  EXPECT_EQ(orbit_from_json(orbit_to_json(o)).terminated_by, OrbitEnd::hit_indeterminacy);
  auto bad = orbit_to_json(o);
  bad["terminated_by"] = "exploded";
  EXPECT_THROW(orbit_from_json(bad), ParseError);
}

TEST(Serialization, DegreesRoundTrip) {
  auto d = degree_sequence(testsupport::map_of({"y*z", "-x*z + y^2 - z^2", "z^2"}, {"x", "y", "z"}), 5);
  auto back = degrees_from_json(degrees_to_json(d));
  EXPECT_EQ(back.degs, d.degs);
  EXPECT_EQ(back.truncated, d.truncated);
}

TEST(Csv, Quoting) {
  EXPECT_EQ(csv_field("2,1"), "\"2,1\"");
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a\"b"), "\"a\"\"b\"");
  EXPECT_EQ(csv_line({"a", "b,c"}), "a,\"b,c\"\n");
}

TEST(Cache, KeyDependsOnEverything) {
  auto k = FileCache::key("map", "orbit", "2,1;5");
  EXPECT_EQ(k.size(), 64u);
  EXPECT_EQ(k, FileCache::key("map", "orbit", "2,1;5"));
  EXPECT_NE(k, FileCache::key("map2", "orbit", "2,1;5"));
  EXPECT_NE(k, FileCache::key("map", "dyndeg", "2,1;5"));
  EXPECT_NE(k, FileCache::key("map", "orbit", "2,1;6"));
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Cache, TransparentAndAtomic) {
  TempDir t("cache");
  FileCache cache(t.path);
  auto f = testsupport::map_of({"x^2 + y^2", "x*y"});
  auto p = ProjPointQ::parse("2,1");
  auto plain = orbit(f, p, 10);
  auto first = cached_orbit(f, p, 10, &cache);
  auto second = cached_orbit(f, p, 10, &cache);
  EXPECT_EQ(first.points, plain.points);
  EXPECT_EQ(second.points, plain.points);
  std::size_t entries = 0;
  for (const auto& e : fs::directory_iterator(t.path)) {
    EXPECT_EQ(e.path().extension(), ".json") << "leftover temporary " << e.path();
    ++entries;
  }
  EXPECT_EQ(entries, 1u);
  auto seq = cached_degree_sequence(f, 5, &cache);
  EXPECT_EQ(cached_degree_sequence(f, 5, &cache).degs, seq.degs);
  EXPECT_EQ(seq.degs, degree_sequence(f, 5).degs);
}

TEST(Cache, CorruptOrStaleEntriesAreIgnored) {
  TempDir t("stale");
  FileCache cache(t.path);
  const auto key = FileCache::key("m", "op", "p");
  write_file(t.path, key + ".json", "{truncated");
  EXPECT_FALSE(cache.get(key));
  write_file(t.path, key + ".json", R"({"version":"arithdyn 0.0.1","payload":{}})");
  EXPECT_FALSE(cache.get(key));
  cache.put(key, ordered_json{{"x", 1}});
  ASSERT_TRUE(cache.get(key));
  EXPECT_EQ((*cache.get(key))["x"], 1);
}

std::vector<MapSpec> small_corpus() {
  std::vector<MapSpec> out;
  for (const char* f : {"power2_p1.json", "cremona.json", "monomial_cat.json", "p1_chebyshev.json"})
    out.push_back(load_map_spec(kCorpus / f));
  return out;
}

TEST(Campaign, DeterministicAcrossThreadCountsAndCache) {
  auto corpus = small_corpus();
  CampaignOptions one;
  one.threads = 1;
  const auto ref = campaign_csv(run_campaign(corpus, one));
  CampaignOptions many;
  many.threads = 4;
  EXPECT_EQ(campaign_csv(run_campaign(corpus, many)), ref);
  TempDir t("campaign");
  FileCache cache(t.path);
  many.cache = &cache;
  EXPECT_EQ(campaign_csv(run_campaign(corpus, many)), ref);
  EXPECT_EQ(campaign_csv(run_campaign(corpus, many)), ref);
}

TEST(Campaign, RowsAndColumns) {
  auto rows = run_campaign(small_corpus());
  EXPECT_EQ(count_violations(rows), 0u);
  std::size_t expected = 0;
  for (const auto& s : small_corpus()) expected += s.points.size();
  EXPECT_EQ(rows.size(), expected);
  const auto csv = campaign_csv(rows);
  EXPECT_NE(csv.find("map,point,nmax,alpha_lower,alpha_upper,delta_upper_cert,consistent,canht_value,canht_error,mode"),
            std::string::npos);
  bool saw_indeterminate = false;
  for (const auto& r : rows) {
    EXPECT_EQ(campaign_fields(r).size(), campaign_columns().size());
    if (r.map == "cremona" && r.point == "1,0,0") {
      saw_indeterminate = true;
      EXPECT_EQ(r.status, "indeterminate");
      EXPECT_FALSE(r.violation);
    }
    if (r.map == "power2_p1" && r.point == "2,1") {
      ASSERT_TRUE(r.canht);
      EXPECT_EQ(r.canht->mode, CanhtMode::certified_power);
      EXPECT_NEAR(r.canht->value, std::log(2.0), 1e-12);
    }
  }
  EXPECT_TRUE(saw_indeterminate);
  auto json = ordered_json::parse(campaign_json(rows));
  ASSERT_EQ(json.size(), rows.size());
  EXPECT_EQ(json[0].begin().key(), "map");
}

TEST(Campaign, FixturesAreFlagged) {
  auto bad = run_campaign(load_corpus(kFixtures / "corrupted"));
  EXPECT_EQ(count_violations(bad), 1u);
  for (const auto& r : bad)
    if (r.map == "corrupted_heights") {
      EXPECT_FALSE(r.consistent);
    }

  auto growth = run_campaign({load_map_spec(kFixtures / "growth_violation.json")});
  ASSERT_EQ(growth.size(), 1u);
  ASSERT_TRUE(growth[0].growth);
  EXPECT_FALSE(growth[0].growth->conforming());
  EXPECT_TRUE(growth[0].violation);
}

TEST(Campaign, EmptyCorpus) {
  TempDir t("empty");
  EXPECT_TRUE(run_campaign(load_corpus(t.path)).empty());
  auto r = capture([&](auto& o, auto& e) { return cli::cmd_campaign(t.path.string(), "-", "", 1, {}, o, e); });
  EXPECT_EQ(r.code, cli::kOk);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
}

TEST(Campaign, MismatchedPreperiodicAnnotationIsAViolation) {
  auto s = load_map_spec(kCorpus / "power2_p1.json");
  s.known_preperiodic.clear();
  auto rows = run_campaign({s});
  EXPECT_GE(count_violations(rows), 1u);
}

std::string corpus_file(const char* name) { return (kCorpus / name).string(); }

TEST(Commands, Orbit) {
  auto r = capture([](auto& o, auto& e) { return cli::cmd_orbit(corpus_file("power2_p1.json"), "2,1", 3, {}, o, e); });
  EXPECT_EQ(r.code, cli::kOk);
  EXPECT_NE(r.out.find("n,point,height_exact_arg,height,cert"), std::string::npos);
  EXPECT_NE(r.out.find("3,\"256,1\",256,"), std::string::npos) << r.out;

  auto c = capture([](auto& o, auto& e) { return cli::cmd_orbit(corpus_file("cremona.json"), "1,0,0", 5, {}, o, e); });
  EXPECT_EQ(c.code, cli::kOk);
  EXPECT_NE(c.out.find("# terminated: hit_indeterminacy at step 0"), std::string::npos);

  cli::CommonOptions js;
  js.format = cli::OutFormat::json;
  auto j = capture([&](auto& o, auto& e) { return cli::cmd_orbit(corpus_file("power2_p1.json"), "2,1", 2, js, o, e); });
  auto parsed = ordered_json::parse(j.out);
  EXPECT_EQ(parsed["rows"].size(), 3u);
  EXPECT_EQ(parsed["rows"][2]["height_exact_arg"], "16");

  auto bad = capture([](auto& o, auto& e) { return cli::cmd_orbit(corpus_file("power2_p1.json"), "0,0", 2, {}, o, e); });
  EXPECT_EQ(bad.code, cli::kUsage);
  auto dim = capture([](auto& o, auto& e) { return cli::cmd_orbit(corpus_file("power2_p1.json"), "1,2,3", 2, {}, o, e); });
  EXPECT_EQ(dim.code, cli::kUsage);
  auto mono = capture([](auto& o, auto& e) { return cli::cmd_orbit(corpus_file("monomial_cat.json"), "2,3", 2, {}, o, e); });
  EXPECT_EQ(mono.code, cli::kUsage);
}

TEST(Commands, DyndegAndSpectral) {
  auto c = capture([](auto& o, auto& e) { return cli::cmd_dyndeg(corpus_file("cremona.json"), 8, {}, o, e); });
  EXPECT_EQ(c.code, cli::kOk);
  EXPECT_NE(c.out.find("delta_upper,,1,certified(fekete)"), std::string::npos) << c.out;
  auto m = capture([](auto& o, auto& e) { return cli::cmd_dyndeg(corpus_file("monomial_cat.json"), 8, {}, o, e); });
  EXPECT_NE(m.out.find("2.61803399"), std::string::npos) << m.out;
  auto s = capture([](auto& o, auto& e) { return cli::cmd_spectral("2,1;1,1", 1e-9, o, e); });
  EXPECT_EQ(s.code, cli::kOk);
  EXPECT_NE(s.out.find("rho,2.61803399"), std::string::npos) << s.out;
  EXPECT_NE(s.out.find("cone_eigenvector"), std::string::npos);
  auto bad = capture([](auto& o, auto& e) { return cli::cmd_spectral("2,1;1", 1e-9, o, e); });
  EXPECT_EQ(bad.code, cli::kUsage);
}

TEST(Commands, ArithdegCanhtCount) {
  auto a = capture([](auto& o, auto& e) { return cli::cmd_arithdeg(corpus_file("monomial_cat.json"), "2,3", 40, 0.5, {}, o, e); });
  EXPECT_EQ(a.code, cli::kOk);
  EXPECT_NE(a.out.find("alpha_lower,2.618"), std::string::npos) << a.out;

  auto h = capture([](auto& o, auto& e) {
    return cli::cmd_canht(corpus_file("power2_p1.json"), "2,1", "2", true, 12, {}, o, e);
  });
  EXPECT_EQ(h.code, cli::kOk);
  EXPECT_NE(h.out.find("canht,0.693147181,certified_power"), std::string::npos) << h.out;
  EXPECT_NE(h.out.find("error_radius,0,certified_power"), std::string::npos) << h.out;

  auto nc = capture([](auto& o, auto& e) { return cli::cmd_canht(corpus_file("henon.json"), "2,1,1", "2", true, 8, {}, o, e); });
  EXPECT_EQ(nc.code, cli::kUsage);
  auto ind = capture([](auto& o, auto& e) { return cli::cmd_canht(corpus_file("cremona.json"), "1,0,0", "2", false, 5, {}, o, e); });
  EXPECT_EQ(ind.code, cli::kViolation);
  auto beta = capture([](auto& o, auto& e) { return cli::cmd_canht(corpus_file("power2_p1.json"), "2,1", "1", false, 5, {}, o, e); });
  EXPECT_EQ(beta.code, cli::kUsage);

  auto n = capture([](auto& o, auto& e) { return cli::cmd_count(corpus_file("power2_p1.json"), "2,1", "2,10,100", 12, {}, o, e); });
  EXPECT_EQ(n.code, cli::kOk);
  EXPECT_NE(n.out.find("B,count,ratio,cert"), std::string::npos);
  auto nb = capture([](auto& o, auto& e) { return cli::cmd_count(corpus_file("power2_p1.json"), "2,1", "2,x", 12, {}, o, e); });
  EXPECT_EQ(nb.code, cli::kUsage);
}

TEST(Commands, ExitCodeMapping) {
  std::ostringstream err;
  EXPECT_EQ(cli::guarded(err, []() -> int { throw ResourceCapExceeded("x"); }), cli::kResourceCap);
  EXPECT_EQ(cli::guarded(err, []() -> int { throw ParseError("x"); }), cli::kUsage);
  EXPECT_EQ(cli::guarded(err, []() -> int { throw NotAPoint(); }), cli::kUsage);
  EXPECT_EQ(cli::guarded(err, []() -> int { throw NotOnTorus(); }), cli::kUsage);
  EXPECT_EQ(cli::guarded(err, []() -> int { throw UnsupportedDimension("x"); }), cli::kUsage);
  EXPECT_EQ(cli::guarded(err, []() -> int { throw IndeterminatePoint("x"); }), cli::kViolation);
}

TEST(Commands, CacheTransparency) {
  TempDir t("cmdcache");
  ::setenv("ARITHDYN_CACHE_DIR", t.path.c_str(), 1);
  cli::CommonOptions cached;
  cached.use_cache = true;
  for (int pass = 0; pass < 2; ++pass) {
    auto a = capture([](auto& o, auto& e) { return cli::cmd_orbit(corpus_file("henon.json"), "2,1,1", 8, {}, o, e); });
    auto b = capture([&](auto& o, auto& e) { return cli::cmd_orbit(corpus_file("henon.json"), "2,1,1", 8, cached, o, e); });
    EXPECT_EQ(a.out, b.out);
    auto c = capture([](auto& o, auto& e) { return cli::cmd_dyndeg(corpus_file("henon.json"), 5, {}, o, e); });
    auto d = capture([&](auto& o, auto& e) { return cli::cmd_dyndeg(corpus_file("henon.json"), 5, cached, o, e); });
    EXPECT_EQ(c.out, d.out);
  }
  EXPECT_FALSE(fs::is_empty(t.path));
}

}  // namespace

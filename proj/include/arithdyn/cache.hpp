#pragma once

// Content-addressed result cache: cache/<sha256>.json.
// Entries are written to a unique temporary file and renamed into place,
// so readers see either nothing or a complete entry.

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <thread>

#include <openssl/evp.h>

#include "io.hpp"

namespace arithdyn {

inline std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

/// ARITHDYN_CACHE_DIR if set, else ./cache.
inline std::filesystem::path default_cache_dir() {
  if (const char* env = std::getenv("ARITHDYN_CACHE_DIR"); env && *env) return env;
  return "cache";
}

class FileCache {
 public:
  explicit FileCache(std::filesystem::path dir = default_cache_dir()) : dir_(std::move(dir)) {}

  const std::filesystem::path& dir() const { return dir_; }

  /// Key over the canonical map text, the operation and its parameters.
  static std::string key(const std::string& map_text, const std::string& op, const std::string& params) {
    return sha256_hex(std::string(kToolkitVersion) + "\n" + op + "\n" + params + "\n" + map_text);
  }

  std::optional<ordered_json> get(const std::string& key) const {
    const auto path = dir_ / (key + ".json");
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    try {
      ordered_json j = ordered_json::parse(in);
      if (j.value("version", "") != kToolkitVersion) return std::nullopt;
      return j.at("payload");
    } catch (const nlohmann::json::exception&) {
      return std::nullopt;
    }
  }

  void put(const std::string& key, const ordered_json& payload) const {
    std::filesystem::create_directories(dir_);
    ordered_json j;
    j["version"] = kToolkitVersion;
    j["key"] = key;
    j["payload"] = payload;
    static std::atomic<unsigned long> counter{0};
    const auto tmp = dir_ / (key + ".tmp." + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())) +
                             "." + std::to_string(counter++));
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("cannot write cache entry " + tmp.string());
      out << j.dump() << "\n";
    }
    std::filesystem::rename(tmp, dir_ / (key + ".json"));
  }

 private:
  std::filesystem::path dir_;
};

inline std::string canonical_map_text(const RationalMapPN& f) {
  MapSpec s;
  s.kind = MapKind::rational;
  s.rational = f;
  return serialize_map_spec(s);
}

/// orbit() through the cache when one is given.
inline OrbitRecord cached_orbit(const RationalMapPN& f, const ProjPointQ& p, std::size_t nmax,
                                const FileCache* cache) {
  if (!cache) return orbit(f, p, nmax);
  const auto k = FileCache::key(canonical_map_text(f), "orbit", p.to_csv_string() + ";" + std::to_string(nmax));
  if (auto hit = cache->get(k)) return orbit_from_json(*hit);
  auto rec = orbit(f, p, nmax);
  cache->put(k, orbit_to_json(rec));
  return rec;
}

inline DegreeSequence cached_degree_sequence(const RationalMapPN& f, std::size_t nmax,
                                             const FileCache* cache, ResourceCaps caps = {}) {
  if (!cache) return degree_sequence(f, nmax, caps);
  const auto k = FileCache::key(canonical_map_text(f), "dyndeg",
                                std::to_string(nmax) + ";" + std::to_string(caps.max_coeff_bits) + ";" +
                                    std::to_string(caps.max_terms));
  if (auto hit = cache->get(k)) {
    auto d = degrees_from_json(*hit);
    d.label = f.name();
    return d;
  }
  auto d = degree_sequence(f, nmax, caps);
  cache->put(k, degrees_to_json(d));
  return d;
}

}  // namespace arithdyn

#include <iostream>

#include <CLI11.hpp>

#include <arithdyn/cli.hpp>

namespace cli = arithdyn::cli;

int main(int argc, char** argv) {
  CLI::App app{"Exact heights, dynamical and arithmetic degrees, canonical heights"};
  app.set_config("--config", "", "read options from a TOML/INI file");
  app.require_subcommand(1);

  cli::CommonOptions common;
  std::string format = "csv";
  app.add_flag("--cache", common.use_cache, "reuse results from the cache directory (ARITHDYN_CACHE_DIR)");

  std::string map_file, point, beta = "2", b_list, matrix, corpus_dir, report = "-", json_report;
  std::size_t n = 10;
  double tail = 0.5, tol = 1e-9;
  bool certified = false;
  unsigned threads = 0;

  auto* orbit = app.add_subcommand("orbit", "orbit points with exact heights");
  orbit->add_option("--map", map_file)->required()->check(CLI::ExistingFile);
  orbit->add_option("--point", point)->required();
  orbit->add_option("--n", n)->required();
  orbit->add_option("--out", format, "table format")->check(CLI::IsMember({"csv", "json"}));

  auto* dyndeg = app.add_subcommand("dyndeg", "degree sequence and certified dynamical degree bound");
  dyndeg->add_option("--map", map_file)->required()->check(CLI::ExistingFile);
  dyndeg->add_option("--n", n, "number of iterates")->capture_default_str();

  auto* arithdeg = app.add_subcommand("arithdeg", "arithmetic degree estimate");
  arithdeg->add_option("--map", map_file)->required()->check(CLI::ExistingFile);
  arithdeg->add_option("--point", point)->required();
  arithdeg->add_option("--n", n)->required();
  arithdeg->add_option("--tail", tail, "tail window fraction")->capture_default_str();

  auto* canht = app.add_subcommand("canht", "canonical height with error radius");
  canht->add_option("--map", map_file)->required()->check(CLI::ExistingFile);
  canht->add_option("--point", point)->required();
  canht->add_option("--beta", beta, "eigenvalue, rational")->capture_default_str();
  canht->add_option("--n", n, "truncation index")->capture_default_str();
  canht->add_flag("--certified", certified, "require a certified error radius");

  auto* count = app.add_subcommand("count", "orbit counting function");
  count->add_option("--map", map_file)->required()->check(CLI::ExistingFile);
  count->add_option("--point", point)->required();
  count->add_option("--B", b_list, "comma-separated bounds on the log height")->required();
  count->add_option("--n", n, "orbit length")->capture_default_str();

  auto* spectral = app.add_subcommand("spectral", "certified spectral radius of an integer matrix");
  spectral->add_option("--matrix", matrix, "rows separated by ';', e.g. 2,1;1,1")->required();
  spectral->add_option("--tol", tol)->capture_default_str();

  auto* campaign = app.add_subcommand("campaign", "run all checks over a corpus directory");
  campaign->add_option("--corpus", corpus_dir)->required()->check(CLI::ExistingDirectory);
  campaign->add_option("--out", report, "CSV report file ('-' for stdout)")->capture_default_str();
  campaign->add_option("--json", json_report, "also write the JSON mirror here");
  campaign->add_option("--threads", threads, "worker threads, 0 = all cores")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : cli::kUsage;
  }
  common.format = format == "json" ? cli::OutFormat::json : cli::OutFormat::csv;

  auto& out = std::cout;
  auto& err = std::cerr;
  if (*orbit) return cli::cmd_orbit(map_file, point, n, common, out, err);
  if (*dyndeg) return cli::cmd_dyndeg(map_file, n, common, out, err);
  if (*arithdeg) return cli::cmd_arithdeg(map_file, point, n, tail, common, out, err);
  if (*canht) return cli::cmd_canht(map_file, point, beta, certified, n, common, out, err);
  if (*count) return cli::cmd_count(map_file, point, b_list, n, common, out, err);
  if (*spectral) return cli::cmd_spectral(matrix, tol, out, err);
  if (*campaign) return cli::cmd_campaign(corpus_dir, report, json_report, threads, common, out, err);
  return cli::kUsage;
}

// simulate: run a DSR / DSR+S experiment matrix and write CSV results.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "manet/config.hpp"
#include "manet/runner.hpp"

namespace {

enum Exit { kOk = 0, kConservation = 1, kConfig = 2, kOutput = 3 };

// Remaining `--key value` / `--key=value` arguments become config overrides.
void apply_overrides(manet::ScenarioConfig& cfg, const std::vector<std::string>& extras) {
  for (std::size_t i = 0; i < extras.size(); ++i) {
    std::string arg = extras[i];
    if (arg.rfind("--", 0) != 0) throw manet::ConfigError(arg, fmt::format("unexpected argument '{}'", arg));
    arg.erase(0, 2);
    std::string value;
    if (auto eq = arg.find('='); eq != std::string::npos) {
      value = arg.substr(eq + 1);
      arg.resize(eq);
    } else {
      if (i + 1 >= extras.size()) throw manet::ConfigError(arg, fmt::format("missing value for '--{}'", arg));
      value = extras[++i];
    }
    for (char& c : arg)
      if (c == '-') c = '_';
    manet::apply_setting(cfg, arg, value);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulate DSR and DSR+S over random waypoint scenarios"};
  app.allow_extras();

  std::string config_path;
  std::string protocol;
  bool no_ring_zero = false;
  std::string seeds;
  std::string pause_times;
  std::string out_dir = "results";
  bool event_log = false;
  bool quiet = false;

  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--protocol", protocol, "dsr, dsr+s or both");
  app.add_flag("--no-ring-zero", no_ring_zero, "flood every discovery");
  app.add_option("--seeds", seeds, "comma-separated seed list");
  app.add_option("--pause-times", pause_times, "comma-separated pause times in seconds");
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--event-log", event_log, "write per-run event logs under OUT/logs");
  app.add_flag("-q,--quiet", quiet, "no progress output");
  app.footer("Any other setting can be overridden with --key value, e.g. --n_nodes 50.");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  manet::ScenarioConfig cfg;
  try {
    if (!config_path.empty()) cfg = manet::load_config(config_path);
    apply_overrides(cfg, app.remaining());
    if (!protocol.empty()) manet::apply_setting(cfg, "protocol", protocol);
    if (!seeds.empty()) manet::apply_setting(cfg, "seeds", seeds);
    if (!pause_times.empty()) manet::apply_setting(cfg, "pause_times", pause_times);
    if (no_ring_zero) cfg.ring_zero = false;
    if (event_log) cfg.event_log = true;
    manet::validate(cfg);
  } catch (const manet::ConfigError& e) {
    fmt::print(stderr, "config error [{}]: {}\n", e.key(), e.what());
    return kConfig;
  }

  const std::filesystem::path out{out_dir};
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec || !std::filesystem::is_directory(out)) {
    fmt::print(stderr, "output error: cannot create '{}'\n", out_dir);
    return kOutput;
  }

  const auto keys = manet::plan_matrix(cfg);
  std::vector<manet::RunResult> results;
  try {
    results = manet::run_matrix(cfg, keys, cfg.event_log ? out / "logs" : std::filesystem::path{},
                                [quiet](const manet::RunResult& r, std::size_t done, std::size_t total) {
                                  if (quiet) return;
                                  fmt::print(stderr, "[{}/{}] {} pause={} seed={} delivered={}/{}{}\n", done, total,
                                             r.key.label(), r.key.pause, r.key.seed, r.ledger.delivered,
                                             r.ledger.sent, r.conserved ? "" : " NOT CONSERVED");
                                });
    manet::emit(cfg, results, out);
  } catch (const manet::OutputError& e) {
    fmt::print(stderr, "output error: {}\n", e.what());
    return kOutput;
  }

  bool all_conserved = true;
  for (const auto& r : results) all_conserved = all_conserved && r.conserved;
  if (!all_conserved) {
    fmt::print(stderr, "packet conservation failed in at least one run\n");
    return kConservation;
  }
  return kOk;
}

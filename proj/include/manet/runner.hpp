#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "manet/config.hpp"
#include "manet/metrics.hpp"
#include "manet/mobility.hpp"
#include "manet/workload.hpp"

namespace manet {

struct RunKey {
  Protocol protocol = Protocol::kDsr;
  bool ring_zero = true;
  double pause = 0.0;
  std::uint64_t seed = 1;

  std::string label() const { return protocol_label(protocol, ring_zero); }
};

struct RunResult {
  RunKey key;
  MetricsLedger ledger;
  std::uint64_t trace_digest = 0;
  std::uint64_t flow_digest = 0;
  bool conserved = true;
};

/// Scenario inputs depend on (seed, pause) only, so both protocols see the
/// same trace and traffic.
std::uint64_t scenario_seed(std::uint64_t seed, double pause);
WaypointTrace scenario_trace(const ScenarioConfig& cfg, double pause, std::uint64_t seed);
std::vector<Flow> scenario_flows(const ScenarioConfig& cfg, double pause, std::uint64_t seed);

/// FNV-1a over a string; used to fingerprint traces and flow lists.
std::uint64_t digest(std::string_view text);

RunResult run_single(const ScenarioConfig& cfg, const RunKey& key, EventLog::Sink sink = {});

/// Every (protocol, pause, seed) combination of the configuration.
std::vector<RunKey> plan_matrix(const ScenarioConfig& cfg);

using ProgressFn = std::function<void(const RunResult&, std::size_t done, std::size_t total)>;

/// Runs `keys` on up to `threads` workers (0: hardware concurrency).
/// Results come back in the order of `keys`. When `log_dir` is non-empty each
/// run writes its event log there.
std::vector<RunResult> run_matrix(const ScenarioConfig& cfg, const std::vector<RunKey>& keys,
                                  const std::filesystem::path& log_dir = {}, ProgressFn progress = {});

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Writes metrics.csv, drops.csv, composition.csv, cache_hit.csv, runs.csv
/// and config.txt into `dir`. Throws OutputError when `dir` is unusable.
void emit(const ScenarioConfig& cfg, const std::vector<RunResult>& results, const std::filesystem::path& dir);

/// Event log file name for one run.
std::string log_file_name(const RunKey& key);

}  // namespace manet

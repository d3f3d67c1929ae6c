#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "manet/dsr.hpp"
#include "manet/netlink.hpp"

namespace manet {

enum class Protocol { kDsr, kDsrS };

/// CSV label: "dsr", "dsr+s", with a "-norz" suffix when Ring Zero is off.
std::string protocol_label(Protocol p, bool ring_zero);

/// Experiment description. Defaults reproduce the reference scenario:
/// 100 nodes in 1342 m x 1342 m, 40 CBR sources at 2 packets/s of 64 bytes,
/// 20 m/s maximum speed, 500 s runs, six pause times and five seeds.
struct ScenarioConfig {
  std::size_t n_nodes = 100;
  double width = 1342.0;
  double height = 1342.0;
  double duration = 500.0;
  std::vector<double> pause_times = {0, 100, 200, 300, 400, 500};
  double max_speed = 20.0;
  double min_speed = 0.1;
  std::size_t n_sources = 40;
  double rate = 2.0;
  std::size_t payload = 64;
  double flow_stagger = 10.0;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::vector<Protocol> protocols = {Protocol::kDsr, Protocol::kDsrS};
  bool ring_zero = true;
  std::size_t threads = 0;  // 0: one per hardware thread
  bool event_log = false;

  NetConfig net;
  DsrConfig dsr;  // ring_zero / suppression are set per run from the fields above
};

/// Invalid configuration; `key()` names the offending setting.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what) : std::runtime_error(what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Sets one `key = value`. Unknown keys and unparsable values throw ConfigError.
void apply_setting(ScenarioConfig& cfg, std::string_view key, std::string_view value);

/// Flat `key = value` text; `#` starts a comment. An empty text yields defaults.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Throws ConfigError on the first invalid value.
void validate(const ScenarioConfig& cfg);

/// Every setting as `key = value`, one per line, in a fixed order.
std::string render_config(const ScenarioConfig& cfg);

const std::vector<std::string>& config_keys();

}  // namespace manet

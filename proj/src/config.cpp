#include "manet/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace manet {

std::string protocol_label(Protocol p, bool ring_zero) {
  std::string s = p == Protocol::kDsr ? "dsr" : "dsr+s";
  if (!ring_zero) s += "-norz";
  return s;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    const auto pos = s.find(sep);
    out.push_back(trim(s.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return out;
}

[[noreturn]] void bad(std::string_view key, std::string_view value, std::string_view expected) {
  throw ConfigError(std::string(key), fmt::format("invalid value '{}' for key '{}': expected {}", value, key, expected));
}

double to_double(std::string_view key, std::string_view v) {
  v = trim(v);
  double out = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size() || v.empty()) bad(key, v, "a number");
  return out;
}

std::uint64_t to_uint(std::string_view key, std::string_view v) {
  v = trim(v);
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size() || v.empty()) bad(key, v, "a non-negative integer");
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  v = trim(v);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad(key, v, "true or false");
}

SimTime to_seconds(std::string_view key, std::string_view v) { return SimTime::from_seconds(to_double(key, v)); }

std::string fmt_num(double v) { return fmt::format("{}", v); }
std::string fmt_time(SimTime t) { return fmt::format("{}", t.seconds()); }

struct Setting {
  const char* key;
  std::function<void(ScenarioConfig&, std::string_view key, std::string_view value)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

#define NUM_SETTING(name, field)                                                                     \
  Setting {                                                                                          \
    name, [](ScenarioConfig& c, std::string_view k, std::string_view v) { c.field = to_double(k, v); }, \
        [](const ScenarioConfig& c) { return fmt_num(c.field); }                                      \
  }
#define UINT_SETTING(name, field, type)                                                                          \
  Setting {                                                                                                      \
    name, [](ScenarioConfig& c, std::string_view k, std::string_view v) { c.field = static_cast<type>(to_uint(k, v)); }, \
        [](const ScenarioConfig& c) { return std::to_string(c.field); }                                           \
  }
#define TIME_SETTING(name, field)                                                                       \
  Setting {                                                                                             \
    name, [](ScenarioConfig& c, std::string_view k, std::string_view v) { c.field = to_seconds(k, v); }, \
        [](const ScenarioConfig& c) { return fmt_time(c.field); }                                        \
  }
#define BOOL_SETTING(name, field)                                                                    \
  Setting {                                                                                          \
    name, [](ScenarioConfig& c, std::string_view k, std::string_view v) { c.field = to_bool(k, v); }, \
        [](const ScenarioConfig& c) { return std::string(c.field ? "true" : "false"); }               \
  }

const std::vector<Setting>& settings() {
  static const std::vector<Setting> table = {
      UINT_SETTING("n_nodes", n_nodes, std::size_t),
      NUM_SETTING("width", width),
      NUM_SETTING("height", height),
      Setting{"space",
              [](ScenarioConfig& c, std::string_view k, std::string_view v) {
                const auto parts = split(v, 'x');
                if (parts.size() != 2) bad(k, v, "WIDTHxHEIGHT");
                c.width = to_double(k, parts[0]);
                c.height = to_double(k, parts[1]);
              },
              [](const ScenarioConfig& c) { return fmt::format("{}x{}", c.width, c.height); }},
      NUM_SETTING("duration", duration),
      Setting{"pause_times",
              [](ScenarioConfig& c, std::string_view k, std::string_view v) {
                c.pause_times.clear();
                for (auto part : split(v, ',')) c.pause_times.push_back(to_double(k, part));
              },
              [](const ScenarioConfig& c) { return fmt::format("{}", fmt::join(c.pause_times, ",")); }},
      NUM_SETTING("max_speed", max_speed),
      NUM_SETTING("min_speed", min_speed),
      UINT_SETTING("n_sources", n_sources, std::size_t),
      NUM_SETTING("rate", rate),
      UINT_SETTING("payload", payload, std::size_t),
      NUM_SETTING("flow_stagger", flow_stagger),
      Setting{"seeds",
              [](ScenarioConfig& c, std::string_view k, std::string_view v) {
                c.seeds.clear();
                if (trim(v).empty()) return;
                for (auto part : split(v, ',')) c.seeds.push_back(to_uint(k, part));
              },
              [](const ScenarioConfig& c) { return fmt::format("{}", fmt::join(c.seeds, ",")); }},
      Setting{"protocol",
              [](ScenarioConfig& c, std::string_view k, std::string_view v) {
                v = trim(v);
                if (v == "dsr")
                  c.protocols = {Protocol::kDsr};
                else if (v == "dsr+s")
                  c.protocols = {Protocol::kDsrS};
                else if (v == "both")
                  c.protocols = {Protocol::kDsr, Protocol::kDsrS};
                else
                  bad(k, v, "dsr, dsr+s or both");
              },
              [](const ScenarioConfig& c) {
                if (c.protocols.size() == 2) return std::string("both");
                return std::string(c.protocols.front() == Protocol::kDsr ? "dsr" : "dsr+s");
              }},
      BOOL_SETTING("ring_zero", ring_zero),
      Setting{"h_r_mode",
              [](ScenarioConfig& c, std::string_view k, std::string_view v) {
                v = trim(v);
                if (v == "full")
                  c.dsr.reply_length_mode = ReplyLengthMode::kFull;
                else if (v == "suffix-only")
                  c.dsr.reply_length_mode = ReplyLengthMode::kSuffixOnly;
                else
                  bad(k, v, "full or suffix-only");
              },
              [](const ScenarioConfig& c) {
                return std::string(c.dsr.reply_length_mode == ReplyLengthMode::kFull ? "full" : "suffix-only");
              }},
      UINT_SETTING("threads", threads, std::size_t),
      BOOL_SETTING("event_log", event_log),
      // medium
      NUM_SETTING("radio_range", net.radio_range),
      NUM_SETTING("bandwidth", net.bandwidth_bps),
      TIME_SETTING("prop_delay", net.prop_delay),
      UINT_SETTING("max_mac_retries", net.max_mac_retries, int),
      UINT_SETTING("ifq_capacity", net.ifq_capacity, std::size_t),
      TIME_SETTING("backoff_max", net.backoff_max),
      TIME_SETTING("backoff_slot", net.backoff_slot),
      TIME_SETTING("ack_window", net.ack_window),
      // routing
      TIME_SETTING("ring_zero_timeout", dsr.ring_zero_timeout),
      TIME_SETTING("reply_delay_unit", dsr.reply_delay_unit),
      TIME_SETTING("rreq_jitter", dsr.rreq_jitter),
      TIME_SETTING("send_buffer_timeout", dsr.send_buffer_timeout),
      UINT_SETTING("send_buffer_capacity", dsr.send_buffer_capacity, std::size_t),
      UINT_SETTING("max_discovery_retries", dsr.max_discovery_retries, int),
      TIME_SETTING("discovery_backoff_initial", dsr.discovery_backoff_initial),
      TIME_SETTING("discovery_backoff_max", dsr.discovery_backoff_max),
      UINT_SETTING("data_ttl", dsr.data_ttl, std::uint32_t),
      UINT_SETTING("flood_hop_limit", dsr.flood_hop_limit, std::uint32_t),
      TIME_SETTING("grat_holdoff", dsr.grat_holdoff),
      UINT_SETTING("max_salvage", dsr.max_salvage, std::uint32_t),
      BOOL_SETTING("cache_off_route", dsr.cache_off_route),
      TIME_SETTING("record_ttl", dsr.record_ttl),
  };
  return table;
}

#undef NUM_SETTING
#undef UINT_SETTING
#undef TIME_SETTING
#undef BOOL_SETTING

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& s : settings()) k.emplace_back(s.key);
    return k;
  }();
  return keys;
}

void apply_setting(ScenarioConfig& cfg, std::string_view key, std::string_view value) {
  key = trim(key);
  const auto& table = settings();
  auto it = std::find_if(table.begin(), table.end(), [&](const Setting& s) { return key == s.key; });
  if (it == table.end()) throw ConfigError(std::string(key), fmt::format("unknown key '{}'", key));
  it->set(cfg, key, value);
}

ScenarioConfig parse_config(std::string_view text) {
  ScenarioConfig cfg;
  std::size_t line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    auto line = raw.substr(0, raw.find('#'));
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(std::string(line), fmt::format("line {}: expected 'key = value'", line_no));
    apply_setting(cfg, line.substr(0, eq), trim(line.substr(eq + 1)));
  }
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", fmt::format("cannot read config file '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const ScenarioConfig& c) {
  auto require = [](bool ok, const char* key, const std::string& msg) {
    if (!ok) throw ConfigError(key, fmt::format("invalid value for key '{}': {}", key, msg));
  };
  require(c.n_nodes >= 2, "n_nodes", "need at least two nodes");
  require(c.width > 0 && c.height > 0, "space", "width and height must be positive");
  require(c.duration > 0, "duration", "must be positive");
  require(!c.pause_times.empty(), "pause_times", "must not be empty");
  for (double p : c.pause_times) require(p >= 0 && p <= c.duration, "pause_times", "each must lie in [0, duration]");
  require(c.max_speed > 0, "max_speed", "must be positive");
  require(c.min_speed > 0 && c.min_speed <= c.max_speed, "min_speed", "must lie in (0, max_speed]");
  require(c.n_sources >= 1 && c.n_sources <= c.n_nodes, "n_sources", "must lie in [1, n_nodes]");
  require(c.rate > 0, "rate", "must be positive");
  require(c.payload > 0, "payload", "must be positive");
  require(c.flow_stagger >= 0, "flow_stagger", "must be non-negative");
  require(!c.seeds.empty(), "seeds", "must not be empty");
  require(!c.protocols.empty(), "protocol", "must name at least one protocol");
  require(c.net.radio_range > 0, "radio_range", "must be positive");
  require(c.net.bandwidth_bps > 0, "bandwidth", "must be positive");
  require(c.net.prop_delay >= SimTime{}, "prop_delay", "must be non-negative");
  require(c.net.max_mac_retries >= 1, "max_mac_retries", "must be at least 1");
  require(c.net.ifq_capacity >= 1, "ifq_capacity", "must be at least 1");
  require(c.net.backoff_slot > SimTime{}, "backoff_slot", "must be positive");
  require(c.net.backoff_max >= c.net.backoff_slot, "backoff_max", "must hold at least one slot");
  require(c.net.ack_window > SimTime{}, "ack_window", "must be positive");
  require(c.dsr.ring_zero_timeout > SimTime{}, "ring_zero_timeout", "must be positive");
  require(c.dsr.reply_delay_unit > SimTime{}, "reply_delay_unit", "must be positive");
  require(c.dsr.rreq_jitter >= SimTime{}, "rreq_jitter", "must be non-negative");
  require(c.dsr.send_buffer_timeout > SimTime{}, "send_buffer_timeout", "must be positive");
  require(c.dsr.send_buffer_capacity >= 1, "send_buffer_capacity", "must be at least 1");
  require(c.dsr.discovery_backoff_initial > SimTime{}, "discovery_backoff_initial", "must be positive");
  require(c.dsr.discovery_backoff_max >= c.dsr.discovery_backoff_initial, "discovery_backoff_max",
          "must be >= discovery_backoff_initial");
  require(c.dsr.data_ttl >= 1, "data_ttl", "must be at least 1");
  require(c.dsr.flood_hop_limit >= 1, "flood_hop_limit", "must be at least 1");
  require(c.dsr.record_ttl > SimTime{}, "record_ttl", "must be positive");
}

std::string render_config(const ScenarioConfig& cfg) {
  std::string out;
  for (const auto& s : settings()) out += fmt::format("{} = {}\n", s.key, s.get(cfg));
  return out;
}

}  // namespace manet

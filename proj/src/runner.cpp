#include "manet/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <fmt/os.h>

#include "manet/simulation.hpp"

namespace manet {

std::uint64_t scenario_seed(std::uint64_t seed, double pause) {
  return derive_seed(seed, "scenario", static_cast<std::uint64_t>(std::llround(pause * 1000.0)));
}

WaypointTrace scenario_trace(const ScenarioConfig& cfg, double pause, std::uint64_t seed) {
  MobilityParams mp;
  mp.width = cfg.width;
  mp.height = cfg.height;
  mp.n_nodes = cfg.n_nodes;
  mp.max_speed = cfg.max_speed;
  mp.min_speed = cfg.min_speed;
  mp.pause_time = pause;
  mp.duration = cfg.duration;
  return generate_trace(mp, scenario_seed(seed, pause));
}

std::vector<Flow> scenario_flows(const ScenarioConfig& cfg, double pause, std::uint64_t seed) {
  WorkloadParams wp;
  wp.n_sources = cfg.n_sources;
  wp.n_nodes = cfg.n_nodes;
  wp.rate = cfg.rate;
  wp.payload = cfg.payload;
  wp.duration = cfg.duration;
  wp.stagger = cfg.flow_stagger;
  return build_flows(wp, scenario_seed(seed, pause));
}

std::uint64_t digest(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RunResult run_single(const ScenarioConfig& cfg, const RunKey& key, EventLog::Sink sink) {
  WaypointTrace trace = scenario_trace(cfg, key.pause, key.seed);
  std::vector<Flow> flows = scenario_flows(cfg, key.pause, key.seed);

  RunResult result;
  result.key = key;
  {
    std::ostringstream t;
    trace.write_tsv(t);
    result.trace_digest = digest(t.str());
    std::ostringstream f;
    write_flows_tsv(f, flows);
    result.flow_digest = digest(f.str());
  }

  DsrConfig dsr = cfg.dsr;
  dsr.ring_zero = key.ring_zero;
  dsr.suppression = key.protocol == Protocol::kDsrS;
  const std::uint64_t run_seed = derive_seed(key.seed, "run", static_cast<std::uint64_t>(std::llround(key.pause * 1000.0)));
  Simulation sim(std::move(trace), std::move(flows), cfg.net, dsr, run_seed, std::move(sink));
  result.ledger = sim.run();
  result.conserved = result.ledger.conserved();
  return result;
}

std::vector<RunKey> plan_matrix(const ScenarioConfig& cfg) {
  std::vector<RunKey> keys;
  for (Protocol p : cfg.protocols)
    for (double pause : cfg.pause_times)
      for (std::uint64_t seed : cfg.seeds) keys.push_back({p, cfg.ring_zero, pause, seed});
  return keys;
}

std::string log_file_name(const RunKey& key) {
  return fmt::format("{}_p{}_s{}.log", key.label(), key.pause, key.seed);
}

std::vector<RunResult> run_matrix(const ScenarioConfig& cfg, const std::vector<RunKey>& keys,
                                  const std::filesystem::path& log_dir, ProgressFn progress) {
  std::vector<RunResult> results(keys.size());
  if (keys.empty()) return results;
  if (!log_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(log_dir, ec);
    if (ec) throw OutputError(fmt::format("cannot create log directory '{}': {}", log_dir.string(), ec.message()));
  }

  std::size_t workers = cfg.threads != 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, keys.size());

  std::atomic<std::size_t> next{0};
  std::size_t done = 0;
  std::mutex mu;
  std::exception_ptr failure;

  auto work = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= keys.size()) return;
      try {
        if (log_dir.empty()) {
          results[i] = run_single(cfg, keys[i]);
        } else {
          const auto path = log_dir / log_file_name(keys[i]);
          std::ofstream out(path);
          if (!out) throw OutputError(fmt::format("cannot write '{}'", path.string()));
          results[i] = run_single(cfg, keys[i], [&out](std::string_view line) {
            out.write(line.data(), static_cast<std::streamsize>(line.size()));
            out.put('\n');
          });
        }
        std::lock_guard lock(mu);
        ++done;
        if (progress) progress(results[i], done, keys.size());
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        next.store(keys.size());
        return;
      }
    }
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

namespace {

std::string opt(const std::optional<double>& v) { return v ? fmt::format("{:.6g}", *v) : std::string(); }

struct Group {
  std::string label;
  double pause;
  bool operator<(const Group& o) const { return std::tie(label, pause) < std::tie(o.label, o.pause); }
};

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw OutputError(fmt::format("cannot write '{}'", path.string()));
  return out;
}

void put(std::ofstream& out, const std::string& s) { out << s; }

}  // namespace

void emit(const ScenarioConfig& cfg, const std::vector<RunResult>& results, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw OutputError(fmt::format("cannot create output directory '{}'", dir.string()));

  std::map<Group, std::vector<const RunResult*>> groups;
  std::vector<std::string> labels;
  for (const auto& r : results) {
    groups[{r.key.label(), r.key.pause}].push_back(&r);
    if (std::find(labels.begin(), labels.end(), r.key.label()) == labels.end()) labels.push_back(r.key.label());
  }

  {
    auto out = open_out(dir / "metrics.csv");
    put(out, "protocol,pause_time,metric,mean,ci95,n\n");
    for (const auto& [g, runs] : groups) {
      std::vector<std::vector<MetricValue>> per_run;
      for (const auto* r : runs) per_run.push_back(run_metrics(r->ledger));
      for (std::size_t m = 0; m < per_run.front().size(); ++m) {
        std::vector<double> values;
        for (const auto& pr : per_run)
          if (pr[m].value) values.push_back(*pr[m].value);
        const auto& name = per_run.front()[m].name;
        if (values.empty()) {
          put(out, fmt::format("{},{},{},,,0\n", g.label, g.pause, name));
          continue;
        }
        const SummaryStat s = summarize(values);
        put(out, fmt::format("{},{},{},{:.6g},{},{}\n", g.label, g.pause, name, s.mean, opt(s.half_width_95), s.n));
      }
    }
  }

  {
    auto out = open_out(dir / "drops.csv");
    put(out, "protocol,reason,count\n");
    double min_pause = results.empty() ? 0.0 : results.front().key.pause;
    for (const auto& r : results) min_pause = std::min(min_pause, r.key.pause);
    for (const auto& label : labels) {
      std::array<std::uint64_t, kDropReasonCount> sum{};
      for (const auto& r : results)
        if (r.key.label() == label && r.key.pause == min_pause)
          for (std::size_t i = 0; i < kDropReasonCount; ++i) sum[i] += r.ledger.drops[i];
      std::uint64_t total = 0;
      for (std::size_t i = 0; i < kDropReasonCount; ++i) {
        put(out, fmt::format("{},{},{}\n", label, drop_reason_name(static_cast<DropReason>(i)), sum[i]));
        total += sum[i];
      }
      put(out, fmt::format("{},Total,{}\n", label, total));
    }
  }

  {
    auto out = open_out(dir / "composition.csv");
    put(out, "protocol,pause_time,kind,mean\n");
    const TxKind kinds[] = {TxKind::kRreq, TxKind::kCachedRrep, TxKind::kTargetRrep, TxKind::kGratuitousRrep,
                            TxKind::kRerr};
    for (const auto& [g, runs] : groups) {
      for (TxKind k : kinds) {
        double sum = 0;
        for (const auto* r : runs) sum += static_cast<double>(r->ledger.tx_count(k));
        put(out, fmt::format("{},{},{},{:.6g}\n", g.label, g.pause, tx_kind_name(k), sum / runs.size()));
      }
    }
  }

  {
    auto out = open_out(dir / "cache_hit.csv");
    put(out, "protocol,n_nodes,cache_hit_rate,ci95,n\n");
    for (const auto& label : labels) {
      std::vector<double> rates;
      for (const auto& r : results)
        if (r.key.label() == label)
          if (auto h = r.ledger.cache_hit_rate()) rates.push_back(*h);
      if (rates.empty()) {
        put(out, fmt::format("{},{},,,0\n", label, cfg.n_nodes));
        continue;
      }
      const SummaryStat s = summarize(rates);
      put(out, fmt::format("{},{},{:.6g},{},{}\n", label, cfg.n_nodes, s.mean, opt(s.half_width_95), s.n));
    }
  }

  {
    auto out = open_out(dir / "runs.csv");
    std::string header = "protocol,pause_time,seed,trace_digest,flow_digest,conserved";
    const auto names = run_metrics(MetricsLedger{});
    for (const auto& m : names) header += "," + m.name;
    put(out, header + "\n");
    for (const auto& r : results) {
      std::string row = fmt::format("{},{},{},{:016x},{:016x},{}", r.key.label(), r.key.pause, r.key.seed,
                                    r.trace_digest, r.flow_digest, r.conserved ? 1 : 0);
      for (const auto& m : run_metrics(r.ledger)) row += "," + opt(m.value);
      put(out, row + "\n");
    }
  }

  {
    auto out = open_out(dir / "config.txt");
    put(out, render_config(cfg));
  }
}

}  // namespace manet

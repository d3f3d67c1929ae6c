// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <chrono>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>
#include <unistd.h>

#include "manet/runner.hpp"
#include "manet/simulation.hpp"

using namespace manet;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int n, const std::string& title, const Verdict& v, double secs) {
  std::printf("%s [%d] %s (%.2f s): %s\n", v.pass ? "PASS" : "FAIL", n, title.c_str(), secs, v.detail.c_str());
  std::fflush(stdout);
  if (!v.pass) ++failures;
}

std::vector<std::string_view> fields(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T number(std::string_view s) {
  T v{};
  std::from_chars(s.data(), s.data() + s.size(), v);
  return v;
}

// ---------------------------------------------------------------------------
// Streaming check over RECORD and RREP-CACHED lines: a cached reply must never
// come from a node holding a live record for that request with H_s <= reply
// length. The record lifetime is applied here independently.

class SuppressionAudit {
 public:
  explicit SuppressionAudit(double ttl) : ttl_(ttl) {}

  void feed(std::string_view line) {
    const auto f = fields(line, '\t');
    if (f.size() < 4) return;
    const bool record = f[2] == "RECORD";
    const bool cached = f[2] == "RREP-CACHED";
    if (!record && !cached) return;
    const double t = number<double>(f[0]);
    const auto node = number<NodeId>(f[1]);
    const auto d = fields(f[3], ' ');
    const Key key{node, number<NodeId>(d[0]), number<std::uint32_t>(d[1])};
    const auto hops = number<std::size_t>(d[2]);
    if (record) {
      records_[key] = {hops, t};
      ++records_seen_;
      return;
    }
    ++cached_seen_;
    auto it = records_.find(key);
    if (it == records_.end() || t - it->second.at > ttl_ + 1e-9) return;
    if (hops >= it->second.h_s) ++violations_;
  }

  EventLog::Sink sink() {
    return [this](std::string_view l) { feed(l); };
  }

  std::uint64_t violations() const { return violations_; }
  std::uint64_t records_seen() const { return records_seen_; }
  std::uint64_t cached_seen() const { return cached_seen_; }

 private:
  struct Key {
    NodeId node;
    NodeId source;
    std::uint32_t id;
    auto operator<=>(const Key&) const = default;
  };
  struct Rec {
    std::size_t h_s;
    double at;
  };
  double ttl_;
  std::map<Key, Rec> records_;
  std::uint64_t violations_ = 0;
  std::uint64_t records_seen_ = 0;
  std::uint64_t cached_seen_ = 0;
};

// Totals over every run of every suite for the conservation and audit criteria.
struct Sweep {
  std::size_t runs = 0;
  std::size_t unconserved = 0;
  std::uint64_t violations = 0;
  std::uint64_t records = 0;
  std::uint64_t cached = 0;

  void add(const MetricsLedger& l, const SuppressionAudit& a) {
    ++runs;
    unconserved += !l.conserved();
    violations += a.violations();
    records += a.records_seen();
    cached += a.cached_seen();
  }
} sweep;

RunResult audited_run(const ScenarioConfig& cfg, const RunKey& key) {
  SuppressionAudit audit(cfg.dsr.record_ttl.seconds());
  RunResult r = run_single(cfg, key, audit.sink());
  sweep.add(r.ledger, audit);
  return r;
}

// ---------------------------------------------------------------------------
// Suppression micro-oracle. A(0) B(1) C(2) D(3) X(4); A-B, A-C, B-D, C-D and
// B-X, D-X in range, A-D, B-C, A-X, C-X not. B and D each know their one-hop
// route to X. A floods for X with Ring Zero off.

constexpr std::uint64_t kMicroSeed = 1;

std::vector<std::string> micro_run(bool suppression) {
  LogCollector log;
  DsrConfig d;
  d.ring_zero = false;
  d.suppression = suppression;
  Simulation sim(WaypointTrace::stationary({{0, 200}, {150, 380}, {150, 20}, {300, 200}, {380, 400}}, 5), {},
                 NetConfig{}, d, kMicroSeed, log.sink());
  sim.dsr().cache(1).insert({1, 4}, SimTime{});
  sim.dsr().cache(3).insert({3, 4}, SimTime{});
  sim.originate_at(SimTime::from_seconds(1), 0, 4);
  const auto& l = sim.run();
  SuppressionAudit audit(d.record_ttl.seconds());
  for (const auto& line : log.lines) audit.feed(line);
  sweep.add(l, audit);
  return log.lines;
}

std::vector<std::size_t> find_lines(const std::vector<std::string>& lines, NodeId node, std::string_view kind,
                                    std::string_view detail_prefix = {}) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto f = fields(lines[i], '\t');
    if (f.size() >= 4 && number<NodeId>(f[1]) == node && f[2] == kind && f[3].starts_with(detail_prefix))
      out.push_back(i);
  }
  return out;
}

Verdict criterion_micro() {
  const auto dsr = micro_run(false);
  const auto dsrs = micro_run(true);
  Verdict v;
  const auto d_cached = find_lines(dsr, 3, "RREP-CACHED");
  const auto s_cached = find_lines(dsrs, 3, "RREP-CACHED");
  std::size_t suppress_lines = 0;
  for (const auto& l : dsrs) suppress_lines += l.find("\tSUPPRESS\t") != std::string::npos;
  const auto s_exact = find_lines(dsrs, 3, "SUPPRESS", "0 1 3 2");
  // Ordering the oracle relies on: D records B's reply before C's rebroadcast reaches it.
  const auto record = find_lines(dsrs, 3, "RECORD", "0 1 2");
  const auto c_fwd = find_lines(dsrs, 2, "RREQ-FWD");
  const bool ordered = !record.empty() && !c_fwd.empty() && record.front() < c_fwd.front();
  const bool d_route = !d_cached.empty() && dsr[d_cached.front()].find("route=0-2-3-4") != std::string::npos;
  v.pass = d_cached.size() >= 1 && d_route && s_cached.empty() && suppress_lines == 1 && s_exact.size() == 1 &&
           ordered;
  v.detail = fmt::format("DSR: D cached RREPs={} (route 0-2-3-4: {}); DSR+S: D cached RREPs={}, SUPPRESS lines={}, "
                         "'0 1 3 2' at D={}, record-before-rebroadcast={}",
                         d_cached.size(), d_route ? "yes" : "no", s_cached.size(), suppress_lines, s_exact.size(),
                         ordered ? "yes" : "no");
  return v;
}

// ---------------------------------------------------------------------------

Verdict criterion_cold_cache() {
  std::vector<Vec2> pos;
  for (int i = 0; i < 10; ++i) pos.push_back({10.0 + 200.0 * i, 10});
  const std::vector<Flow> flows{Flow{0, 9, 2.0, 64, SimTime::from_seconds(1), SimTime::from_seconds(30)}};
  std::string logs[2];
  std::uint64_t delivered[2]{};
  for (int p = 0; p < 2; ++p) {
    DsrConfig d;
    d.suppression = p == 1;
    LogCollector log;
    Simulation sim(WaypointTrace::stationary(pos, 30), flows, NetConfig{}, d, 11, log.sink());
    const auto& l = sim.run();
    delivered[p] = l.delivered;
    SuppressionAudit audit(d.record_ttl.seconds());
    for (const auto& line : log.lines) {
      logs[p] += line;
      logs[p] += '\n';
      audit.feed(line);
    }
    sweep.add(l, audit);
  }
  Verdict v;
  v.pass = logs[0] == logs[1] && !logs[0].empty() && delivered[0] > 0;
  v.detail = fmt::format("log bytes {} vs {}, digests {:016x} vs {:016x}, delivered {}", logs[0].size(),
                         logs[1].size(), digest(logs[0]), digest(logs[1]), delivered[0]);
  return v;
}

// ---------------------------------------------------------------------------

ScenarioConfig desk() {
  ScenarioConfig c;
  c.n_nodes = 50;
  c.n_sources = 20;
  c.duration = 300;
  c.pause_times = {0, 150, 300};
  c.seeds = {1, 2, 3, 4, 5};
  c.threads = 1;
  return c;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict criterion_determinism() {
  auto cfg = desk();
  cfg.pause_times = {0};
  cfg.seeds = {1};
  const auto root = fs::temp_directory_path() / fmt::format("manet_acceptance_{}", ::getpid());
  std::uint64_t digests[2]{};
  double secs[2]{};
  for (int i = 0; i < 2; ++i) {
    const auto t0 = Clock::now();
    std::vector<RunResult> results;
    for (const auto& k : plan_matrix(cfg)) results.push_back(audited_run(cfg, k));
    const auto dir = root / std::to_string(i);
    emit(cfg, results, dir);
    secs[i] = since(t0);
    std::string all;
    for (const char* f : {"metrics.csv", "drops.csv", "composition.csv", "cache_hit.csv", "runs.csv"})
      all += read_file(dir / f);
    digests[i] = digest(all);
  }
  fs::remove_all(root);
  Verdict v;
  v.pass = digests[0] == digests[1] && secs[0] < 120 && secs[1] < 120;
  v.detail = fmt::format("CSV digests {:016x} / {:016x}, run times {:.1f} s / {:.1f} s", digests[0], digests[1], secs[0],
                         secs[1]);
  return v;
}

// ---------------------------------------------------------------------------
// Matrix helpers

struct Cell {
  std::vector<MetricsLedger> runs;

  double mean(const std::function<double(const MetricsLedger&)>& f) const {
    double s = 0;
    for (const auto& l : runs) s += f(l);
    return runs.empty() ? NAN : s / static_cast<double>(runs.size());
  }
};

using Matrix = std::map<std::string, Cell>;  // "label/pause"

std::string cell_key(const std::string& label, double pause) { return fmt::format("{}/{}", label, pause); }

void run_into(Matrix& m, const ScenarioConfig& cfg, const std::vector<RunKey>& keys) {
  for (const auto& k : keys) m[cell_key(k.label(), k.pause)].runs.push_back(audited_run(cfg, k).ledger);
}

double cached(const MetricsLedger& l) { return static_cast<double>(l.tx_count(TxKind::kCachedRrep)); }
double target(const MetricsLedger& l) { return static_cast<double>(l.tx_count(TxKind::kTargetRrep)); }
double overhead(const MetricsLedger& l) { return static_cast<double>(l.total_overhead()); }
double pdr(const MetricsLedger& l) { return l.delivery_ratio_pct().value_or(0.0); }

Verdict criterion_cached_reduction(const Matrix& m, double secs) {
  const std::vector<double> pauses{0, 150, 300};
  std::vector<double> margin;
  std::string per_pause;
  for (double p : pauses) {
    const double d = m.at(cell_key("dsr", p)).mean(cached);
    const double s = m.at(cell_key("dsr+s", p)).mean(cached);
    margin.push_back(d - s);
    per_pause += fmt::format(" p{}: {:.1f}->{:.1f}", p, d, s);
  }
  const double d0 = m.at(cell_key("dsr", 0)).mean(cached);
  const double s0 = m.at(cell_key("dsr+s", 0)).mean(cached);
  const double reduction = d0 > 0 ? (d0 - s0) / d0 : 0.0;
  bool monotone = true;
  for (std::size_t i = 1; i < margin.size(); ++i) monotone = monotone && margin[i] <= margin[i - 1];
  const double td = m.at(cell_key("dsr", 0)).mean(target);
  const double ts = m.at(cell_key("dsr+s", 0)).mean(target);
  const double tdiff = td > 0 ? std::abs(ts - td) / td : 1.0;
  Verdict v;
  v.pass = reduction >= 0.20 && monotone && tdiff < 0.25 && secs < 1800;
  v.detail = fmt::format("cached RREP means{}; reduction at pause 0 {:.1f}%; margins {:.1f}/{:.1f}/{:.1f} ({}); "
                         "target RREP {:.1f} vs {:.1f} ({:.1f}% apart); matrix {:.0f} s",
                         per_pause, 100 * reduction, margin[0], margin[1], margin[2],
                         monotone ? "non-increasing" : "increasing", td, ts, 100 * tdiff, secs);
  return v;
}

Verdict criterion_overhead_delivery(const Matrix& m) {
  const double od = m.at(cell_key("dsr", 0)).mean(overhead);
  const double os = m.at(cell_key("dsr+s", 0)).mean(overhead);
  const double pd = m.at(cell_key("dsr", 0)).mean(pdr);
  const double ps = m.at(cell_key("dsr+s", 0)).mean(pdr);
  Verdict v;
  v.pass = os < od && ps >= pd - 1.0;
  v.detail = fmt::format("total overhead DSR {:.0f} vs DSR+S {:.0f} ({:+.1f}%); delivery {:.2f}% vs {:.2f}%", od, os,
                         od > 0 ? 100 * (os - od) / od : 0.0, pd, ps);
  return v;
}

Verdict criterion_no_ring_zero(const Matrix& m) {
  const double rz_d = m.at(cell_key("dsr", 0)).mean(overhead);
  const double rz_s = m.at(cell_key("dsr+s", 0)).mean(overhead);
  const double nz_d = m.at(cell_key("dsr-norz", 0)).mean(overhead);
  const double nz_s = m.at(cell_key("dsr+s-norz", 0)).mean(overhead);
  const double ratio = nz_d / rz_d;
  const double gain_rz = (rz_d - rz_s) / rz_d;
  const double gain_nz = (nz_d - nz_s) / nz_d;
  Verdict v;
  v.pass = ratio >= 1.3 && gain_nz > gain_rz;
  v.detail = fmt::format("DSR overhead no-RZ/RZ = {:.0f}/{:.0f} = {:.2f} (need >= 1.30); DSR+S improvement "
                         "{:.1f}% without Ring Zero vs {:.1f}% with",
                         nz_d, rz_d, ratio, 100 * gain_nz, 100 * gain_rz);
  return v;
}

Verdict criterion_path_optimality(const Matrix& m) {
  Verdict v;
  for (const char* label : {"dsr", "dsr+s"}) {
    std::uint64_t near = 0, total = 0;
    for (const auto& l : m.at(cell_key(label, 0)).runs) {
      near += l.path_extra[0] + l.path_extra[1];
      total += l.delivered;
    }
    const double frac = total ? static_cast<double>(near) / static_cast<double>(total) : 0.0;
    v.pass = v.pass && frac >= 0.5;
    if (!v.detail.empty()) v.detail += "; ";
    v.detail += fmt::format("{}: {:.1f}% of {} deliveries within one extra hop", label, 100 * frac, total);
  }
  return v;
}

Verdict criterion_density(const Matrix& m50) {
  auto cfg = desk();
  cfg.n_nodes = 25;
  cfg.pause_times = {0};
  Matrix m25;
  run_into(m25, cfg, plan_matrix(cfg));
  Verdict v;
  for (const char* label : {"dsr", "dsr+s"}) {
    std::uint64_t h25 = 0, n25 = 0, h50 = 0, n50 = 0;
    for (const auto& l : m25.at(cell_key(label, 0)).runs) h25 += l.cache_hits, n25 += l.cache_hits + l.cache_misses;
    for (const auto& l : m50.at(cell_key(label, 0)).runs) h50 += l.cache_hits, n50 += l.cache_hits + l.cache_misses;
    const double r25 = n25 ? static_cast<double>(h25) / static_cast<double>(n25) : 0.0;
    const double r50 = n50 ? static_cast<double>(h50) / static_cast<double>(n50) : 0.0;
    v.pass = v.pass && r50 > r25;
    if (!v.detail.empty()) v.detail += "; ";
    v.detail += fmt::format("{}: hit rate {:.4f} at 25 nodes vs {:.4f} at 50", label, r25, r50);
  }
  return v;
}

}  // namespace

int main() {
  auto t0 = Clock::now();
  const Verdict v1 = criterion_micro();
  const double s1 = since(t0);
  report(1, "suppression micro-oracle", Verdict{v1.pass && s1 < 1.0, v1.detail}, s1);

  t0 = Clock::now();
  const Verdict v2 = criterion_cold_cache();
  const double s2 = since(t0);
  report(2, "cold-cache log equivalence", Verdict{v2.pass && s2 < 1.0, v2.detail}, s2);

  t0 = Clock::now();
  const Verdict v3 = criterion_determinism();
  report(3, "determinism", v3, since(t0));

  // Desk-scale matrix with and without Ring Zero.
  t0 = Clock::now();
  const auto cfg = desk();
  Matrix m;
  run_into(m, cfg, plan_matrix(cfg));
  const double matrix_secs = since(t0);
  auto norz = desk();
  norz.ring_zero = false;
  norz.pause_times = {0};
  const auto t_norz = Clock::now();
  run_into(m, norz, plan_matrix(norz));
  const double norz_secs = since(t_norz);

  t0 = Clock::now();
  const Verdict v10 = criterion_density(m);
  const double s10 = since(t0);

  report(4, "conservation in every run",
         Verdict{sweep.unconserved == 0, fmt::format("{} runs, {} unconserved", sweep.runs, sweep.unconserved)}, 0.0);
  report(5, "cached-reply reduction", criterion_cached_reduction(m, matrix_secs), matrix_secs);
  report(6, "overhead and delivery", criterion_overhead_delivery(m), 0.0);
  report(7, "Ring Zero ablation", criterion_no_ring_zero(m), norz_secs);
  report(8, "path optimality", criterion_path_optimality(m), 0.0);
  report(9, "suppression invariant sweep",
         Verdict{sweep.violations == 0 && sweep.records > 0,
                 fmt::format("{} runs, {} records, {} cached replies audited, {} violations", sweep.runs,
                             sweep.records, sweep.cached, sweep.violations)},
         0.0);
  report(10, "cache hit rate grows with density", v10, s10);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

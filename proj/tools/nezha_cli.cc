#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "nezha/harness/cluster.h"
#include "nezha/harness/config.h"
#include "nezha/harness/history.h"
#include "nezha/harness/microbench.h"
#include "nezha/harness/sweep.h"

namespace h = nezha::harness;

namespace {

struct Overrides {
  std::optional<double> percentile;
  std::optional<double> beta;
  std::optional<size_t> window;
  std::optional<double> clamp_us;
  std::optional<bool> proxy;
  std::string commutativity;
  std::string crash_schedule;
  std::string skew;
  bool trace = false;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--percentile", o.percentile, "DOM OWD percentile")->check(CLI::Range(0.0, 100.0));
  cmd->add_option("--beta", o.beta, "DOM clock-error multiplier");
  cmd->add_option("--window", o.window, "OWD sliding window size")->check(CLI::PositiveNumber);
  cmd->add_option("--clamp-us", o.clamp_us, "OWD estimate clamp W (us)")->check(CLI::PositiveNumber);
  cmd->add_flag("--proxy,!--no-proxy", o.proxy, "proxy mode on/off");
  cmd->add_option("--commutativity", o.commutativity, "on|off")->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--crash-schedule", o.crash_schedule, "e.g. \"kill leader at 20ms; rejoin at 40ms\"");
  cmd->add_option("--skew", o.skew, "e.g. \"r0:normal:-300us:30us; r1:constant:5ms\"");
  cmd->add_flag("--trace", o.trace, "record the event trace");
}

h::ScenarioConfig load(const std::string& path, const Overrides& o) {
  h::ScenarioConfig c = path.empty() ? h::parse_config("") : h::load_config(path);
  if (o.percentile) c.dom.percentile = *o.percentile;
  if (o.beta) c.dom.beta = *o.beta;
  if (o.window) c.dom.window = *o.window;
  if (o.clamp_us) c.dom.clamp = nezha::micros(*o.clamp_us);
  if (o.proxy) c.proxy_mode = *o.proxy;
  if (!o.commutativity.empty()) c.commutativity = o.commutativity == "on";
  if (!o.crash_schedule.empty()) {
    auto extra = h::parse_crash_schedule(o.crash_schedule);
    c.crashes.insert(c.crashes.end(), extra.begin(), extra.end());
  }
  for (const auto& [node, model] : h::parse_skew(o.skew)) c.clocks[node] = model;
  if (o.trace) c.run.trace = true;
  c.validate();
  return c;
}

void print_summary(const h::RunResult& r) {
  const auto& m = r.metrics;
  std::cout << "seed " << r.seed << ": submitted=" << m.submitted << " committed=" << m.committed
            << " failed=" << m.failed << " in_flight=" << m.in_flight << " fcr=" << std::fixed
            << std::setprecision(4) << m.fcr << " p50=" << m.latency_p50 << "ns p99=" << m.latency_p99
            << "ns lin=" << m.linearizability << " violations=" << m.violations << '\n';
  for (const auto& [k, n] : m.message_delays) {
    std::cout << "  " << (k.first == nezha::replica::CommitPath::Fast ? "fast" : "slow") << " hops=" << k.second
              << " commits=" << n << '\n';
  }
  if (!r.diagnostic.empty()) std::cout << "  note: " << r.diagnostic << '\n';
  for (const auto& v : r.violations) std::cout << "  VIOLATION " << v.oracle << " @" << v.time << "ns: " << v.detail << '\n';
}

std::pair<uint64_t, uint64_t> parse_seed_range(const std::string& s) {
  const auto dots = s.find("..");
  if (dots == std::string::npos) {
    const uint64_t v = std::stoull(s);
    return {v, v};
  }
  return {std::stoull(s.substr(0, dots)), std::stoull(s.substr(dots + 2))};
}

template <typename T>
std::vector<T> parse_list(const std::string& s) {
  std::vector<T> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    std::istringstream v(item);
    T x{};
    v >> x;
    out.push_back(x);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nezha / DOM deterministic simulator"};
  app.require_subcommand(1);

  Overrides run_o;
  std::string run_config, run_output;
  std::optional<uint64_t> run_seed;
  auto* run = app.add_subcommand("run", "run one scenario");
  run->add_option("--config", run_config, "scenario YAML");
  run->add_option("--seed", run_seed, "override the scenario seed");
  run->add_option("--output", run_output, "directory for CSV and trace output");
  add_overrides(run, run_o);

  Overrides sweep_o;
  std::string sweep_config, sweep_output, sweep_seeds = "1..10";
  unsigned threads = 0;
  auto* sweep = app.add_subcommand("sweep", "run a scenario over a seed range");
  sweep->add_option("--config", sweep_config, "scenario YAML");
  sweep->add_option("--seeds", sweep_seeds, "seed range A..B");
  sweep->add_option("--output", sweep_output, "directory for metrics.csv and violations.csv");
  sweep->add_option("--threads", threads, "worker threads (0 = hardware)");
  add_overrides(sweep, sweep_o);

  h::MicrobenchConfig mb;
  std::string mb_senders = "1,2,4,8,16", mb_rates = "1000,5000,10000,20000", mb_percentiles = "50,75,90,95";
  std::string mb_output;
  double mb_duration_ms = 20;
  auto* micro = app.add_subcommand("microbench-reorder", "reordering score vs senders, rate and DOM percentile");
  micro->add_option("--senders", mb_senders, "comma-separated sender counts");
  micro->add_option("--rates", mb_rates, "comma-separated per-sender rates (msgs/s)");
  micro->add_option("--percentiles", mb_percentiles, "comma-separated DOM percentiles");
  micro->add_option("--base-senders", mb.senders, "sender count for the rate and percentile sweeps");
  micro->add_option("--rate", mb.rate, "per-sender rate for the sender and percentile sweeps");
  micro->add_option("--duration-ms", mb_duration_ms, "simulated duration");
  micro->add_option("--seed", mb.seed, "seed");
  micro->add_option("--beta", mb.params.beta, "DOM clock-error multiplier");
  micro->add_option("--window", mb.params.window, "OWD window");
  micro->add_option("--output", mb_output, "directory for reorder_sweep.csv");

  std::string lin_history;
  size_t lin_bound = 200;
  auto* lin = app.add_subcommand("check-lin", "check a history CSV for linearizability");
  lin->add_option("--history", lin_history, "history.csv written by run")->required();
  lin->add_option("--bound", lin_bound, "maximum history size");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      auto cfg = load(run_config, run_o);
      if (run_seed) cfg.seed = *run_seed;
      const auto r = h::run_scenario(cfg);
      print_summary(r);
      if (!run_output.empty()) h::write_outputs(run_output, r);
      return r.ok() ? 0 : 1;
    }
    if (sweep->parsed()) {
      const auto cfg = load(sweep_config, sweep_o);
      const auto [a, b] = parse_seed_range(sweep_seeds);
      const auto results = h::run_sweep(cfg, a, b, threads);
      uint64_t bad = 0;
      for (const auto& r : results) {
        bad += !r.ok();
        if (!r.ok()) print_summary(r);
      }
      if (!sweep_output.empty()) {
        std::filesystem::create_directories(sweep_output);
        std::ofstream m(std::filesystem::path(sweep_output) / "metrics.csv");
        h::write_metrics_header(m);
        for (const auto& r : results) h::write_metrics_row(m, r);
        std::ofstream v(std::filesystem::path(sweep_output) / "violations.csv");
        v << "seed,oracle,time_ns,detail\n";
        for (const auto& r : results) {
          for (const auto& x : r.violations) {
            std::string d = x.detail;
            std::replace(d.begin(), d.end(), ',', ';');
            v << r.seed << ',' << x.oracle << ',' << x.time << ',' << d << '\n';
          }
        }
      }
      std::cout << results.size() << " runs, " << bad << " with violations\n";
      return bad ? 1 : 0;
    }
    if (micro->parsed()) {
      mb.duration = nezha::millis(mb_duration_ms);
      mb.link = h::MicrobenchConfig::default_link();
      const auto rows = h::reorder_sweep(mb, parse_list<int>(mb_senders), parse_list<double>(mb_rates),
                                         parse_list<double>(mb_percentiles));
      std::ostringstream csv;
      csv << "sweep,x,score\n";
      for (const auto& r : rows) csv << r.sweep << ',' << r.x << ',' << std::fixed << std::setprecision(6) << r.score << '\n';
      std::cout << csv.str();
      if (!mb_output.empty()) {
        std::filesystem::create_directories(mb_output);
        std::ofstream(std::filesystem::path(mb_output) / "reorder_sweep.csv") << csv.str();
      }
      return 0;
    }
    if (lin->parsed()) {
      std::ifstream in(lin_history);
      if (!in) {
        std::cerr << "cannot open " << lin_history << '\n';
        return 2;
      }
      const auto hist = h::read_history_csv(in);
      const auto res = h::check_linearizability(hist, lin_bound);
      switch (res.verdict) {
        case h::LinVerdict::Ok:
          std::cout << "OK: " << hist.size() << " ops linearizable\n";
          return 0;
        case h::LinVerdict::Violation:
          std::cout << "VIOLATION: " << res.message << '\n';
          return 1;
        case h::LinVerdict::Refused:
          std::cout << "REFUSED: " << res.message << '\n';
          return 2;
      }
    }
  } catch (const h::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

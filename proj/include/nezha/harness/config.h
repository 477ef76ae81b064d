#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nezha/dom/owd.h"
#include "nezha/proxy/client.h"
#include "nezha/sim/clock.h"
#include "nezha/sim/link.h"

namespace nezha::harness {

// Invalid scenario input; the message starts with the offending field path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

enum class App { Kv, Null };

struct WorkloadConfig {
  proxy::LoopMode mode = proxy::LoopMode::Closed;
  uint64_t requests_per_client = 100;
  double rate = 10000;  // open loop, per client, req/s
  double read_ratio = 0.5;
  double zipf_s = 0.5;
  uint32_t key_space = 100;
  Nanos duration = 0;  // open loop arrival window; 0 = bounded by requests only
  App app = App::Kv;
  Nanos start_stagger = 0;
};

// `node` is a node name (r0, p1, c2) or "leader" for whoever leads at `at`.
struct CrashEvent {
  std::string node;
  Nanos at = 0;
  std::optional<Nanos> rejoin_at;
};

struct PartitionEvent {
  std::vector<std::string> side;
  Nanos from = 0;
  Nanos until = 0;
};

struct LinkOverride {
  std::string from;
  std::string to;
  sim::LinkModel model;
};

struct ProtocolConfig {
  Nanos heartbeat = millis(10);
  int suspicion_missed = 5;
  bool bounded_degradation = false;
  Nanos degradation_threshold = micros(50);
  Nanos retransmit = micros(500);
  Nanos client_timeout = millis(2);
  int retry_limit = 50;
  bool checkpoint_recovery = false;
  bool hash_crash_vector = true;
};

struct RunConfig {
  Nanos max_time = millis(10000);
  bool trace = false;
  // Periodic oracle checks run every this many events.
  uint64_t oracle_every = 500;
  size_t lin_bound = 200;
  // Keep simulating this long after the last fault before stopping.
  Nanos settle = 0;
};

struct ScenarioConfig {
  uint64_t seed = 1;
  int f = 1;
  int proxies = 1;
  int clients = 1;
  bool proxy_mode = false;
  bool commutativity = false;
  dom::DomParams dom;
  sim::LinkModel client_proxy;
  sim::LinkModel proxy_replica;
  sim::LinkModel replica_replica;
  std::vector<LinkOverride> link_overrides;
  sim::ClockModel default_clock;
  std::map<std::string, sim::ClockModel> clocks;
  WorkloadConfig workload;
  std::vector<CrashEvent> crashes;
  std::vector<PartitionEvent> partitions;
  ProtocolConfig protocol;
  RunConfig run;

  int replicas() const { return 2 * f + 1; }
  // Throws ConfigError on inconsistent values.
  void validate() const;
};

ScenarioConfig parse_config(const std::string& yaml_text);
ScenarioConfig load_config(const std::string& path);

// "kill r1 at 20ms; rejoin at 40ms; kill leader at 60ms". Times take ns/us/ms/s suffixes.
std::vector<CrashEvent> parse_crash_schedule(const std::string& spec);
// "r0:normal:-300us:30us; r1:constant:5ms; r2:sawtooth:1ms:200us; r3:drift:0:50"
std::map<std::string, sim::ClockModel> parse_skew(const std::string& spec);
Nanos parse_duration(const std::string& text);

}  // namespace nezha::harness

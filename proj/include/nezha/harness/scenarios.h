#pragma once

#include <cstdint>

#include "nezha/harness/cluster.h"
#include "nezha/harness/config.h"

namespace nezha::harness {

// Fixed link delays, no loss, perfect clocks, one closed-loop client.
ScenarioConfig perfect_network(int f, bool proxy_mode, uint64_t requests, uint64_t seed = 1);

// As perfect_network, with every follower clock 5 ms behind: the leader's log
// modification reaches followers before their early buffer releases, so each
// request commits on the slow path.
ScenarioConfig forced_slow_path(int f, bool proxy_mode, uint64_t requests, uint64_t seed = 1);

// Randomized fault scenario for the safety suite: f in {1,2}, lossy jittery
// links, skewed clocks, up to f follower crash/rejoin cycles and one leader kill.
ScenarioConfig random_safety_scenario(uint64_t seed);

struct StrayOutcome {
  RunResult result;
  // Commits any proxy reported for the delayed request.
  uint64_t commits = 0;
  // Replicas that replied then crashed and rejoined, leader last.
  int bounced = 0;
};

// A single delayed request reaches one replica at a time (followers first,
// leader last); each replica replies and crashes 1 ns later, followers rejoin
// before the next arrival. Retries are disabled. With `hash_crash_vector`
// false the reply hashes omit the crash vector (negative control).
StrayOutcome run_stray_schedule(int f, bool hash_crash_vector, uint64_t seed = 1);

struct SkewOutcome {
  // Median latency of slow-path commits in the unskewed run.
  Nanos slow_baseline = 0;
  Nanos threshold = 0;
  Nanos median_with_bound = 0;
  Nanos median_without_bound = 0;
  RunResult with_bound;
  RunResult without_bound;
  RunResult baseline;
};

// Leader clock offset N(-300us, 30us); compares bounded degradation on/off
// against slow-path latency on an unskewed run of the same workload.
SkewOutcome run_skew_degradation(uint64_t seed = 1);

}  // namespace nezha::harness

#pragma once

#include <cstdint>
#include <vector>

#include "nezha/harness/cluster.h"

namespace nezha::harness {

// Runs `cfg` once per seed in [first, last], fanning out over `threads`
// workers. Results come back in seed order regardless of scheduling.
std::vector<RunResult> run_sweep(const ScenarioConfig& cfg, uint64_t first, uint64_t last, unsigned threads = 0);

}  // namespace nezha::harness

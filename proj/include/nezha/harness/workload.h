#pragma once

#include <random>
#include <vector>

#include "nezha/common/command.h"
#include "nezha/harness/config.h"
#include "nezha/sim/rng.h"

namespace nezha::harness {

// P(k) proportional to 1/(k+1)^s over [0, n). s = 0 is uniform.
class ZipfSampler {
 public:
  ZipfSampler(uint32_t n, double s);
  uint32_t operator()(sim::Engine& rng) { return static_cast<uint32_t>(dist_(rng)); }
  std::vector<double> probabilities() const { return dist_.probabilities(); }

 private:
  std::discrete_distribution<uint32_t> dist_;
};

// Per-client command stream. Written values are unique across the run, which
// keeps the linearizability search cheap.
class CommandGenerator {
 public:
  CommandGenerator(const WorkloadConfig& w, ClientId client, sim::Engine rng);
  Command next();

 private:
  WorkloadConfig cfg_;
  ClientId client_;
  sim::Engine rng_;
  ZipfSampler zipf_;
  uint64_t counter_ = 0;
};

std::string key_name(uint32_t k);

}  // namespace nezha::harness

#include "nezha/harness/workload.h"

#include <cmath>

namespace nezha::harness {

namespace {
std::vector<double> zipf_weights(uint32_t n, double s) {
  std::vector<double> w(n);
  for (uint32_t k = 0; k < n; ++k) w[k] = 1.0 / std::pow(static_cast<double>(k + 1), s);
  return w;
}
}  // namespace

ZipfSampler::ZipfSampler(uint32_t n, double s) {
  const auto w = zipf_weights(n, s);
  dist_ = std::discrete_distribution<uint32_t>(w.begin(), w.end());
}

std::string key_name(uint32_t k) { return "k" + std::to_string(k); }

CommandGenerator::CommandGenerator(const WorkloadConfig& w, ClientId client, sim::Engine rng)
    : cfg_(w), client_(client), rng_(rng), zipf_(w.key_space, w.zipf_s) {}

Command CommandGenerator::next() {
  if (cfg_.app == App::Null) return Command::nop();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const bool read = u(rng_) < cfg_.read_ratio;
  const std::string key = key_name(zipf_(rng_));
  if (read) return Command::get(key);
  ++counter_;
  return Command::set(key, static_cast<int64_t>((uint64_t{client_} + 1) << 32 | counter_));
}

}  // namespace nezha::harness

#include "nezha/harness/sweep.h"

#include <algorithm>
#include <atomic>
#include <thread>

namespace nezha::harness {

std::vector<RunResult> run_sweep(const ScenarioConfig& cfg, uint64_t first, uint64_t last, unsigned threads) {
  if (last < first) return {};
  const size_t n = last - first + 1;
  std::vector<RunResult> out(n);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<size_t>(threads, n));
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < n; i = next++) {
      ScenarioConfig c = cfg;
      c.seed = first + i;
      out[i] = run_scenario(c);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace nezha::harness

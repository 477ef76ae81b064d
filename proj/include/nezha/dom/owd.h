#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <vector>

#include "nezha/common/types.h"

namespace nezha::dom {

struct DomParams {
  double percentile = 50;
  double beta = 3;
  size_t window = 1000;
  Nanos clamp = micros(200);
};

// Nearest-rank percentile: element ceil(p/100 * n) - 1 of the sorted samples.
// Requires a nonempty input.
Nanos percentile_nearest_rank(std::vector<Nanos> samples, double p);

// Sliding window of OWD samples for one sender/receiver pair.
class OwdWindow {
 public:
  explicit OwdWindow(const DomParams& params = {});

  void add(Nanos sample);
  void clear() { samples_.clear(); }
  bool empty() const { return samples_.empty(); }
  size_t size() const { return samples_.size(); }
  const std::deque<Nanos>& samples() const { return samples_; }
  const DomParams& params() const { return params_; }
  void set_params(const DomParams& p);

 private:
  DomParams params_;
  std::deque<Nanos> samples_;
};

// P + beta * (sigma_send + sigma_recv), clamped to W when outside (0, W).
Nanos estimate_owd(const OwdWindow& window, Nanos sigma_send, Nanos sigma_recv);

void record_owd_sample(OwdWindow& window, Nanos recv_local_time, Nanos send_time);

// send_time + max(estimates). Throws std::invalid_argument on an empty list.
Nanos make_deadline(Nanos send_time, std::span<const Nanos> estimates);

}  // namespace nezha::dom

#include "nezha/dom/owd.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nezha::dom {

Nanos percentile_nearest_rank(std::vector<Nanos> samples, double p) {
  if (samples.empty()) throw std::invalid_argument("percentile of empty sample set");
  const double n = static_cast<double>(samples.size());
  auto rank = static_cast<long>(std::ceil(std::clamp(p, 0.0, 100.0) / 100.0 * n));
  const size_t idx = static_cast<size_t>(std::max(1L, rank) - 1);
  std::nth_element(samples.begin(), samples.begin() + static_cast<long>(idx), samples.end());
  return samples[idx];
}

OwdWindow::OwdWindow(const DomParams& params) : params_(params) {
  if (params_.window == 0) throw std::invalid_argument("OWD window size must be positive");
}

void OwdWindow::set_params(const DomParams& p) {
  if (p.window == 0) throw std::invalid_argument("OWD window size must be positive");
  params_ = p;
  while (samples_.size() > params_.window) samples_.pop_front();
}

void OwdWindow::add(Nanos sample) {
  if (samples_.size() == params_.window) samples_.pop_front();
  samples_.push_back(sample);
}

Nanos estimate_owd(const OwdWindow& window, Nanos sigma_send, Nanos sigma_recv) {
  const auto& p = window.params();
  if (window.empty()) return p.clamp;
  const Nanos pct = percentile_nearest_rank({window.samples().begin(), window.samples().end()}, p.percentile);
  const Nanos owd = pct + static_cast<Nanos>(std::llround(p.beta * static_cast<double>(sigma_send + sigma_recv)));
  if (owd <= 0 || owd >= p.clamp) return p.clamp;
  return owd;
}

void record_owd_sample(OwdWindow& window, Nanos recv_local_time, Nanos send_time) {
  window.add(recv_local_time - send_time);
}

Nanos make_deadline(Nanos send_time, std::span<const Nanos> estimates) {
  if (estimates.empty()) throw std::invalid_argument("make_deadline needs one estimate per receiver");
  return send_time + *std::max_element(estimates.begin(), estimates.end());
}

}  // namespace nezha::dom

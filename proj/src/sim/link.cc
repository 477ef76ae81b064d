#include "nezha/sim/link.h"

#include <algorithm>
#include <cmath>
#include <random>

namespace nezha::sim {

Nanos Link::sample_delay() {
  Nanos extra = 0;
  if (const auto* u = std::get_if<jitter::Uniform>(&model_.jitter)) {
    std::uniform_int_distribution<Nanos> d(std::min(u->low, u->high), std::max(u->low, u->high));
    extra = d(stream_);
  } else if (const auto* e = std::get_if<jitter::Exponential>(&model_.jitter)) {
    if (e->mean > 0) {
      std::exponential_distribution<double> d(1.0 / static_cast<double>(e->mean));
      extra = static_cast<Nanos>(std::llround(d(stream_)));
    }
  } else if (const auto* l = std::get_if<jitter::LogNormal>(&model_.jitter)) {
    std::lognormal_distribution<double> d(l->mu, l->sigma);
    extra = static_cast<Nanos>(std::llround(d(stream_)));
  }
  return std::max<Nanos>(0, model_.base_delay + extra);
}

LinkSample Link::sample() {
  LinkSample s;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (model_.drop_prob > 0 && coin(stream_) < model_.drop_prob) {
    s.dropped = true;
    return s;
  }
  s.delay = sample_delay();
  if (model_.dup_prob > 0 && coin(stream_) < model_.dup_prob) {
    s.duplicate_delay = sample_delay();
  }
  return s;
}

}  // namespace nezha::sim

#pragma once

#include <optional>
#include <variant>

#include "nezha/common/types.h"
#include "nezha/sim/rng.h"

namespace nezha::sim {

namespace jitter {
struct None {};
struct Uniform {
  Nanos low = 0;
  Nanos high = 0;
};
struct Exponential {
  Nanos mean = 0;
};
// exp(N(mu, sigma)) nanoseconds; mu = ln(median).
struct LogNormal {
  double mu = 0;
  double sigma = 0;
};
}  // namespace jitter

using Jitter = std::variant<jitter::None, jitter::Uniform, jitter::Exponential, jitter::LogNormal>;

struct LinkModel {
  Nanos base_delay = 0;
  Jitter jitter = jitter::None{};
  double drop_prob = 0;
  double dup_prob = 0;
};

// Result of pushing one message through a link.
struct LinkSample {
  bool dropped = false;
  Nanos delay = 0;
  std::optional<Nanos> duplicate_delay;
};

// Draws delivery outcomes from one link's private stream. The order of draws
// per message is fixed (drop, delay, dup, dup-delay) so replays match.
class Link {
 public:
  Link(LinkModel model, Engine stream) : model_(model), stream_(stream) {}

  LinkSample sample();
  Nanos sample_delay();

  const LinkModel& model() const { return model_; }
  void set_model(const LinkModel& m) { model_ = m; }

 private:
  LinkModel model_;
  Engine stream_;
};

}  // namespace nezha::sim

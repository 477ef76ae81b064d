#pragma once

#include <optional>
#include <variant>

#include "nezha/common/types.h"
#include "nezha/sim/rng.h"

namespace nezha::sim {

// Offset added to true time when a node reads its clock.
namespace offset {
struct Zero {};
struct Constant {
  Nanos value = 0;
};
// Linear drift: value = base + ppm * 1e-6 * t.
struct Drift {
  Nanos base = 0;
  double ppm = 0;
};
// Jumps from `before` to `after` at true time `at`.
struct Step {
  Nanos at = 0;
  Nanos before = 0;
  Nanos after = 0;
};
// Ramps linearly from 0 to `amplitude` over each period, then snaps back.
struct Sawtooth {
  Nanos period = 1;
  Nanos amplitude = 0;
};
// A fresh N(mean, stddev) sample on every reading.
struct Normal {
  double mean = 0;
  double stddev = 0;
};
}  // namespace offset

using ClockOffset = std::variant<offset::Zero, offset::Constant, offset::Drift,
                                 offset::Step, offset::Sawtooth, offset::Normal>;

struct ClockModel {
  ClockOffset offset = offset::Zero{};
  // Error-bound estimates the node reports to DOM as sender / receiver.
  Nanos sigma_send = 0;
  Nanos sigma_recv = 0;
  bool monotonic_repair = false;
};

// One node's imperfect clock. Owns its noise stream so readings are a pure
// function of (seed, node name, sequence of read times).
class LocalClock {
 public:
  LocalClock(ClockModel model, Engine noise) : model_(model), noise_(noise) {}

  Nanos read(Nanos true_time);
  // Offset without side effects; Normal offsets report their mean.
  Nanos nominal_offset(Nanos true_time) const;

  const ClockModel& model() const { return model_; }

 private:
  ClockModel model_;
  Engine noise_;
  std::optional<Nanos> last_;
};

}  // namespace nezha::sim

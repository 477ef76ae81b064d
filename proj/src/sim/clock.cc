#include "nezha/sim/clock.h"

#include <cmath>
#include <random>

namespace nezha::sim {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

Nanos LocalClock::nominal_offset(Nanos t) const {
  return std::visit(
      overloaded{
          [](const offset::Zero&) -> Nanos { return 0; },
          [](const offset::Constant& c) -> Nanos { return c.value; },
          [t](const offset::Drift& d) -> Nanos {
            return d.base + static_cast<Nanos>(std::llround(d.ppm * 1e-6 * static_cast<double>(t)));
          },
          [t](const offset::Step& s) -> Nanos { return t < s.at ? s.before : s.after; },
          [t](const offset::Sawtooth& s) -> Nanos {
            if (s.period <= 0) return 0;
            const Nanos phase = t % s.period;
            return static_cast<Nanos>(static_cast<long double>(s.amplitude) * phase / s.period);
          },
          [](const offset::Normal& n) -> Nanos { return static_cast<Nanos>(std::llround(n.mean)); },
      },
      model_.offset);
}

Nanos LocalClock::read(Nanos true_time) {
  Nanos off;
  if (const auto* n = std::get_if<offset::Normal>(&model_.offset)) {
    if (n->stddev > 0) {
      std::normal_distribution<double> dist(n->mean, n->stddev);
      off = static_cast<Nanos>(std::llround(dist(noise_)));
    } else {
      off = static_cast<Nanos>(std::llround(n->mean));
    }
  } else {
    off = nominal_offset(true_time);
  }
  Nanos reading = true_time + off;
  if (model_.monotonic_repair && last_ && reading < *last_) reading = *last_;
  last_ = reading;
  return reading;
}

}  // namespace nezha::sim

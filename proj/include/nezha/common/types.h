#pragma once

#include <cstdint>
#include <functional>
#include <string>

namespace nezha {

// All simulated time is integer nanoseconds.
using Nanos = int64_t;

inline constexpr Nanos kNanosPerMicro = 1000;
inline constexpr Nanos kNanosPerMilli = 1000 * kNanosPerMicro;
inline constexpr Nanos kNanosPerSecond = 1000 * kNanosPerMilli;

constexpr Nanos micros(double us) { return static_cast<Nanos>(us * kNanosPerMicro); }
constexpr Nanos millis(double ms) { return static_cast<Nanos>(ms * kNanosPerMilli); }

using NodeId = uint32_t;
using ClientId = uint32_t;
using RequestId = uint32_t;
using ReplicaId = uint32_t;
using ViewId = uint64_t;

inline constexpr NodeId kNoNode = UINT32_MAX;

// Uniquely names one client request across the whole system.
struct RequestKey {
  ClientId client_id = 0;
  RequestId request_id = 0;

  friend auto operator<=>(const RequestKey&, const RequestKey&) = default;
  friend bool operator==(const RequestKey&, const RequestKey&) = default;
};

struct RequestKeyHash {
  size_t operator()(const RequestKey& k) const noexcept {
    return std::hash<uint64_t>{}((uint64_t{k.client_id} << 32) | k.request_id);
  }
};

inline std::string to_string(const RequestKey& k) {
  return std::to_string(k.client_id) + ":" + std::to_string(k.request_id);
}

}  // namespace nezha

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nezha/common/types.h"

namespace nezha::recovery {

// One monotone counter per replica (2f+1 entries).
using CrashVector = std::vector<uint64_t>;

// Element-wise max. Throws std::invalid_argument on an empty set or length mismatch.
CrashVector aggregate_cv(std::span<const CrashVector> vectors);
CrashVector aggregate_cv(const CrashVector& a, const CrashVector& b);

enum class CvCheck { Accept, Stray };

// Stray iff msg_cv[sender] < local[sender]. On accept, local absorbs msg_cv.
CvCheck check_crash_vector(ReplicaId sender, const CrashVector& msg_cv, CrashVector& local);

// True when a message carrying `msg_cv` from `sender` is stale relative to `local`.
inline bool is_stray(ReplicaId sender, const CrashVector& msg_cv, const CrashVector& local) {
  return msg_cv.at(sender) < local.at(sender);
}

}  // namespace nezha::recovery

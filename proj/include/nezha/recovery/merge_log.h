#pragma once

#include <span>
#include <vector>

#include "nezha/common/request.h"
#include "nezha/recovery/crash_vector.h"

namespace nezha::recovery {

// The parts of a view-change message that merge_log consumes.
struct ViewChangeLog {
  ReplicaId from = 0;
  ViewId view = 0;
  ViewId last_normal_view = 0;
  std::vector<LogEntry> log;
  // Number of leading log entries known consistent with the leader.
  size_t sync_point = 0;
};

// Rebuilds the new leader's log from f+1 view-change messages:
//  1. keep messages with the largest last_normal_view;
//  2. copy the synced prefix of the one with the largest sync_point;
//  3. add each later entry (same deadline, client, request) found in at least
//     ceil(f/2)+1 of the kept logs;
//  4. sort by deadline tuple.
// With commutativity, step 3 compares a candidate only against prefix entries
// it conflicts with. Throws std::invalid_argument on empty input.
std::vector<LogEntry> merge_log(std::span<const ViewChangeLog> msgs, int f, bool commutativity = false);

inline int fast_quorum(int f) { return 1 + f + (f + 1) / 2; }
inline int merge_threshold(int f) { return (f + 1) / 2 + 1; }

}  // namespace nezha::recovery

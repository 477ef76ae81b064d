#pragma once

#include <map>
#include <optional>

#include "nezha/replica/messages.h"

namespace nezha::proxy {

using replica::CommitPath;
using replica::FastReply;
using replica::SlowReply;

// Replies collected for one request. Only the highest view seen is kept.
class ReplySet {
 public:
  // Returns false if the reply was stale or a duplicate.
  bool add_fast(const FastReply& r, uint32_t depth);
  bool add_slow(const SlowReply& r, uint32_t depth);

  bool empty() const { return fast_.empty() && slow_.empty(); }
  ViewId view() const { return view_; }
  const std::map<ReplicaId, std::pair<FastReply, uint32_t>>& fast() const { return fast_; }
  const std::map<ReplicaId, std::pair<SlowReply, uint32_t>>& slow() const { return slow_; }

 private:
  bool admit(ViewId v);

  bool seen_ = false;
  ViewId view_ = 0;
  std::map<ReplicaId, std::pair<FastReply, uint32_t>> fast_;
  std::map<ReplicaId, std::pair<SlowReply, uint32_t>> slow_;
};

struct CommitDecision {
  FastReply leader;
  CommitPath path = CommitPath::Fast;
  // Network hops to the reply that completed the quorum.
  uint32_t hops = 0;
};

// Fast: leader fast reply plus enough replicas whose slow reply or matching
// (same hash and deadline) fast reply brings the count to 1+f+ceil(f/2). Slow: leader fast reply plus
// f slow replies. The fast rule is checked first.
std::optional<CommitDecision> check_committed(const ReplySet& set, int f);

}  // namespace nezha::proxy

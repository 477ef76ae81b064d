#include "nezha/proxy/reply_set.h"

#include <algorithm>
#include <vector>

namespace nezha::proxy {

bool ReplySet::admit(ViewId v) {
  if (seen_ && v < view_) return false;
  if (!seen_ || v > view_) {
    fast_.clear();
    slow_.clear();
    view_ = v;
    seen_ = true;
  }
  return true;
}

bool ReplySet::add_fast(const FastReply& r, uint32_t depth) {
  if (!admit(r.view)) return false;
  return fast_.emplace(r.replica, std::make_pair(r, depth)).second;
}

bool ReplySet::add_slow(const SlowReply& r, uint32_t depth) {
  if (!admit(r.view)) return false;
  return slow_.emplace(r.replica, std::make_pair(r, depth)).second;
}

std::optional<CommitDecision> check_committed(const ReplySet& set, int f) {
  const auto n = static_cast<ViewId>(2 * f + 1);
  const auto leader = static_cast<ReplicaId>(set.view() % n);
  auto lit = set.fast().find(leader);
  if (lit == set.fast().end() || !lit->second.first.result) return std::nullopt;
  const auto& [lead, lead_depth] = lit->second;

  std::vector<uint32_t> fast_depths;
  std::vector<uint32_t> slow_depths;
  for (ReplicaId r = 0; r < static_cast<ReplicaId>(n); ++r) {
    if (r == leader) continue;
    std::optional<uint32_t> best;
    if (auto s = set.slow().find(r); s != set.slow().end()) {
      best = s->second.second;
      slow_depths.push_back(s->second.second);
    }
    // Reads are not in the keyed hash, so the deadline pins the entry.
    if (auto fr = set.fast().find(r); fr != set.fast().end() && fr->second.first.hash == lead.hash &&
                                      fr->second.first.deadline == lead.deadline) {
      best = best ? std::min(*best, fr->second.second) : fr->second.second;
    }
    if (best) fast_depths.push_back(*best);
  }
  const size_t need_fast = static_cast<size_t>(f + (f + 1) / 2);  // followers beyond the leader
  if (fast_depths.size() >= need_fast) {
    std::sort(fast_depths.begin(), fast_depths.end());
    const uint32_t hops = std::max(lead_depth, need_fast ? fast_depths[need_fast - 1] : 0u);
    return CommitDecision{lead, CommitPath::Fast, hops};
  }
  if (slow_depths.size() >= static_cast<size_t>(f)) {
    std::sort(slow_depths.begin(), slow_depths.end());
    const uint32_t hops = std::max(lead_depth, f > 0 ? slow_depths[static_cast<size_t>(f) - 1] : 0u);
    return CommitDecision{lead, CommitPath::Slow, hops};
  }
  return std::nullopt;
}

}  // namespace nezha::proxy

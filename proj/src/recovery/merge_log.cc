#include "nezha/recovery/merge_log.h"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace nezha::recovery {

std::vector<LogEntry> merge_log(std::span<const ViewChangeLog> msgs, int f, bool commutativity) {
  if (msgs.empty()) throw std::invalid_argument("merge_log needs at least one view-change message");

  ViewId lnv = 0;
  for (const auto& m : msgs) lnv = std::max(lnv, m.last_normal_view);
  std::vector<const ViewChangeLog*> kept;
  for (const auto& m : msgs) {
    if (m.last_normal_view == lnv) kept.push_back(&m);
  }
  const ViewChangeLog* base = kept.front();
  for (const auto* m : kept) {
    if (m->sync_point > base->sync_point) base = m;
  }

  const size_t sp = std::min(base->sync_point, base->log.size());
  std::vector<LogEntry> out(base->log.begin(), base->log.begin() + static_cast<long>(sp));
  std::map<RequestKey, DeadlineTuple> in_prefix;
  for (const auto& e : out) in_prefix.emplace(e.key(), e.tuple());

  // Bound a candidate must exceed to sit after the copied prefix.
  auto beyond_prefix = [&](const LogEntry& c) {
    if (!commutativity) return out.empty() || c.tuple() > out.back().tuple();
    for (const auto& e : out) {
      if (conflicts(e.request.command, c.request.command) && e.tuple() >= c.tuple()) return false;
    }
    return true;
  };

  std::map<DeadlineTuple, std::pair<int, const LogEntry*>> candidates;
  for (const auto* m : kept) {
    std::map<DeadlineTuple, bool> seen;  // count each log once per entry
    for (const auto& e : m->log) {
      if (in_prefix.count(e.key()) || !seen.emplace(e.tuple(), true).second) continue;
      auto& slot = candidates[e.tuple()];
      ++slot.first;
      if (!slot.second) slot.second = &e;
    }
  }
  const int need = merge_threshold(f);
  for (const auto& [tuple, c] : candidates) {
    if (c.first >= need && beyond_prefix(*c.second) && !in_prefix.count(tuple.key())) {
      in_prefix.emplace(tuple.key(), tuple);
      out.push_back(*c.second);
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const LogEntry& a, const LogEntry& b) { return a.tuple() < b.tuple(); });
  return out;
}

}  // namespace nezha::recovery

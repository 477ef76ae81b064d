#include "nezha/dom/buffers.h"

#include <algorithm>

namespace nezha::dom {

namespace {
DeadlineTuple lookup(const std::map<std::string, DeadlineTuple>& m, const std::string& k) {
  auto it = m.find(k);
  return it == m.end() ? kMinTuple : it->second;
}
}  // namespace

DeadlineTuple ReleaseTracker::threshold(const Request& r, bool commutativity) const {
  if (!commutativity) return global_;
  bool keyed = false;
  DeadlineTuple t = keyless_;
  for (const auto& op : r.command.ops) {
    if (op.kind == OpKind::Nop) continue;
    keyed = true;
    t = std::max(t, op.kind == OpKind::Set ? lookup(last_any_, op.key) : lookup(last_write_, op.key));
  }
  return keyed ? t : global_;
}

void ReleaseTracker::note_released(const Request& r) {
  const DeadlineTuple t = r.tuple();
  global_ = std::max(global_, t);
  bool keyed = false;
  for (const auto& op : r.command.ops) {
    if (op.kind == OpKind::Nop) continue;
    keyed = true;
    auto& any = last_any_.try_emplace(op.key, kMinTuple).first->second;
    any = std::max(any, t);
    if (op.kind == OpKind::Set) {
      auto& w = last_write_.try_emplace(op.key, kMinTuple).first->second;
      w = std::max(w, t);
    }
  }
  if (!keyed) keyless_ = std::max(keyless_, t);
}

bool EarlyBuffer::push(Request r) {
  const RequestKey k = r.key();
  if (index_.count(k)) return false;
  const DeadlineTuple t = r.tuple();
  index_.emplace(k, t);
  by_tuple_.emplace(t, std::move(r));
  return true;
}

Request EarlyBuffer::pop() {
  auto it = by_tuple_.begin();
  Request r = std::move(it->second);
  by_tuple_.erase(it);
  index_.erase(r.key());
  return r;
}

const Request* EarlyBuffer::find(const RequestKey& k) const {
  auto it = index_.find(k);
  if (it == index_.end()) return nullptr;
  return &by_tuple_.at(it->second);
}

std::optional<Request> EarlyBuffer::take(const RequestKey& k) {
  auto it = index_.find(k);
  if (it == index_.end()) return std::nullopt;
  auto node = by_tuple_.extract(it->second);
  index_.erase(it);
  return std::move(node.mapped());
}

void EarlyBuffer::clear() {
  by_tuple_.clear();
  index_.clear();
}

const Request* LateBuffer::find(const RequestKey& k) const {
  auto it = items_.find(k);
  return it == items_.end() ? nullptr : &it->second;
}

std::optional<Request> LateBuffer::take(const RequestKey& k) {
  auto it = items_.find(k);
  if (it == items_.end()) return std::nullopt;
  Request r = std::move(it->second);
  items_.erase(it);
  return r;
}

Route classify(const Request& r, const ReleaseTracker& tracker, bool commutativity) {
  return tracker.eligible(r, commutativity) ? Route::Early : Route::Late;
}

std::vector<Request> release_ready(EarlyBuffer& early, ReleaseTracker& tracker, Nanos clock) {
  std::vector<Request> out;
  while (!early.empty() && early.top().deadline <= clock) {
    out.push_back(early.pop());
    tracker.note_released(out.back());
  }
  return out;
}

}  // namespace nezha::dom

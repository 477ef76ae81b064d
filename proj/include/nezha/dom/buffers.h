#pragma once

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "nezha/common/request.h"

namespace nezha::dom {

// Largest released deadline tuples, globally and per key. With commutativity
// enabled a request only has to beat the releases it conflicts with.
class ReleaseTracker {
 public:
  DeadlineTuple threshold(const Request& r, bool commutativity) const;
  bool eligible(const Request& r, bool commutativity) const {
    return r.tuple() > threshold(r, commutativity);
  }
  void note_released(const Request& r);
  void reset() { *this = ReleaseTracker{}; }

  DeadlineTuple global() const { return global_; }

 private:
  DeadlineTuple global_ = kMinTuple;
  DeadlineTuple keyless_ = kMinTuple;
  std::map<std::string, DeadlineTuple> last_write_;
  std::map<std::string, DeadlineTuple> last_any_;
};

class EarlyBuffer {
 public:
  // Returns false if a request with the same key is already buffered.
  bool push(Request r);
  bool empty() const { return by_tuple_.empty(); }
  size_t size() const { return by_tuple_.size(); }
  const Request& top() const { return by_tuple_.begin()->second; }
  Request pop();
  bool contains(const RequestKey& k) const { return index_.count(k) > 0; }
  const Request* find(const RequestKey& k) const;
  std::optional<Request> take(const RequestKey& k);
  // Removes and returns every request failing `keep`.
  template <class Pred>
  std::vector<Request> extract_if_not(Pred keep) {
    std::vector<Request> out;
    for (auto it = by_tuple_.begin(); it != by_tuple_.end();) {
      if (!keep(it->second)) {
        index_.erase(it->second.key());
        out.push_back(std::move(it->second));
        it = by_tuple_.erase(it);
      } else {
        ++it;
      }
    }
    return out;
  }
  const std::map<DeadlineTuple, Request>& items() const { return by_tuple_; }
  void clear();

 private:
  std::map<DeadlineTuple, Request> by_tuple_;
  std::unordered_map<RequestKey, DeadlineTuple, RequestKeyHash> index_;
};

class LateBuffer {
 public:
  // At most one entry per key; an existing entry is replaced.
  void insert(Request r) { items_.insert_or_assign(r.key(), std::move(r)); }
  bool contains(const RequestKey& k) const { return items_.count(k) > 0; }
  const Request* find(const RequestKey& k) const;
  std::optional<Request> take(const RequestKey& k);
  size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const std::map<RequestKey, Request>& items() const { return items_; }
  void clear() { items_.clear(); }

 private:
  std::map<RequestKey, Request> items_;
};

enum class Route { Early, Late };

Route classify(const Request& r, const ReleaseTracker& tracker, bool commutativity);

// Pops every request with deadline <= clock in tuple order and records it as released.
std::vector<Request> release_ready(EarlyBuffer& early, ReleaseTracker& tracker, Nanos clock);

}  // namespace nezha::dom

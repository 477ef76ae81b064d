#pragma once

#include <functional>
#include <queue>
#include <string>
#include <vector>

#include "nezha/common/types.h"

namespace nezha::sim {

using EventId = uint64_t;

struct Event {
  Nanos at = 0;
  EventId seq = 0;
  NodeId node = kNoNode;
  std::string kind;
  std::function<void()> action;
};

// Min-queue on (at, seq). seq is a global insertion counter, so ties pop in
// insertion order.
class EventQueue {
 public:
  EventId push(Nanos at, NodeId node, std::string kind, std::function<void()> action) {
    const EventId id = next_seq_++;
    heap_.push(Event{at, id, node, std::move(kind), std::move(action)});
    return id;
  }

  bool empty() const { return heap_.empty(); }
  size_t size() const { return heap_.size(); }
  Nanos next_time() const { return heap_.top().at; }

  Event pop() {
    // priority_queue::top is const; the moved-from element is popped at once.
    Event e = std::move(const_cast<Event&>(heap_.top()));
    heap_.pop();
    return e;
  }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.at != b.at) return a.at > b.at;
      return a.seq > b.seq;
    }
  };
  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  EventId next_seq_ = 0;
};

}  // namespace nezha::sim

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nezha/common/types.h"
#include "nezha/sim/clock.h"
#include "nezha/sim/event_queue.h"
#include "nezha/sim/link.h"

namespace nezha::sim {

// Raised for scenario bugs such as scheduling an event in the past.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TraceRecord {
  Nanos time = 0;
  std::string node;
  std::string kind;
  std::string details;
};

// Deterministic discrete-event simulator: virtual true time, per-node clocks,
// and a lossy message fabric. Single-threaded; holds no global state.
class Simulator {
 public:
  using Action = std::function<void()>;
  using DetailFn = std::function<std::string()>;

  explicit Simulator(uint64_t seed) : seed_(seed) {}
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  uint64_t seed() const { return seed_; }

  NodeId add_node(std::string name, ClockModel clock = {});
  size_t node_count() const { return nodes_.size(); }
  const std::string& node_name(NodeId n) const { return nodes_.at(n).name; }

  void set_default_link(const LinkModel& m) { default_link_ = m; }
  void set_link(NodeId src, NodeId dst, const LinkModel& m);
  const LinkModel& link_model(NodeId src, NodeId dst);

  Nanos now() const { return now_; }

  EventId schedule(Nanos at, NodeId node, std::string_view kind, Action action);
  EventId schedule_after(Nanos delay, NodeId node, std::string_view kind, Action action) {
    return schedule(now_ + delay, node, kind, std::move(action));
  }
  // Runs only if `node` has not crashed or restarted since scheduling.
  EventId schedule_timer(NodeId node, Nanos delay, std::string_view kind, Action action);

  // Delivers through the (src, dst) link unless dropped; may duplicate.
  void send(NodeId src, NodeId dst, std::string_view kind, Action on_deliver,
            const DetailFn& details = {});

  Nanos read_clock(NodeId node);
  const ClockModel& clock_model(NodeId node) const { return nodes_.at(node).clock.model(); }
  void set_clock(NodeId node, const ClockModel& m);

  void crash(NodeId node);
  void restart(NodeId node);
  bool is_up(NodeId node) const { return nodes_.at(node).up; }
  uint64_t incarnation(NodeId node) const { return nodes_.at(node).incarnation; }

  // Messages between `side` and every other node are dropped during [from, until).
  void add_partition(std::vector<NodeId> side, Nanos from, Nanos until);

  bool step();
  void run_until(Nanos t);
  bool idle() const { return queue_.empty(); }
  size_t pending() const { return queue_.size(); }
  uint64_t events_processed() const { return processed_; }

  void set_post_event_hook(Action hook) { post_event_ = std::move(hook); }

  void enable_trace(bool on) { tracing_ = on; }
  bool tracing() const { return tracing_; }
  void record(NodeId node, std::string_view kind, std::string details);
  const std::vector<TraceRecord>& trace() const { return trace_; }
  void write_trace(std::ostream& out) const;

 private:
  struct Node {
    std::string name;
    LocalClock clock;
    bool up = true;
    uint64_t incarnation = 0;
  };
  struct Partition {
    std::vector<NodeId> side;
    Nanos from = 0;
    Nanos until = 0;
  };

  Link& link(NodeId src, NodeId dst);
  bool partitioned(NodeId a, NodeId b) const;
  void deliver(NodeId src, NodeId dst, std::string_view kind, Nanos delay, Action on_deliver,
               const std::string& details);

  uint64_t seed_;
  Nanos now_ = 0;
  EventQueue queue_;
  std::vector<Node> nodes_;
  LinkModel default_link_;
  std::map<std::pair<NodeId, NodeId>, std::unique_ptr<Link>> links_;
  std::vector<Partition> partitions_;
  Action post_event_;
  bool tracing_ = false;
  std::vector<TraceRecord> trace_;
  uint64_t processed_ = 0;
};

}  // namespace nezha::sim

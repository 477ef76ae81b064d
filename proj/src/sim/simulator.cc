#include "nezha/sim/simulator.h"

#include <algorithm>

namespace nezha::sim {

NodeId Simulator::add_node(std::string name, ClockModel clock) {
  const NodeId id = static_cast<NodeId>(nodes_.size());
  Engine noise = make_stream(seed_, "clock/" + name);
  nodes_.push_back(Node{std::move(name), LocalClock(clock, noise)});
  return id;
}

void Simulator::set_clock(NodeId node, const ClockModel& m) {
  auto& n = nodes_.at(node);
  n.clock = LocalClock(m, make_stream(seed_, "clock/" + n.name));
}

Link& Simulator::link(NodeId src, NodeId dst) {
  auto& slot = links_[{src, dst}];
  if (!slot) {
    const std::string label = "link/" + nodes_.at(src).name + "->" + nodes_.at(dst).name;
    slot = std::make_unique<Link>(default_link_, make_stream(seed_, label));
  }
  return *slot;
}

void Simulator::set_link(NodeId src, NodeId dst, const LinkModel& m) { link(src, dst).set_model(m); }

const LinkModel& Simulator::link_model(NodeId src, NodeId dst) { return link(src, dst).model(); }

EventId Simulator::schedule(Nanos at, NodeId node, std::string_view kind, Action action) {
  if (at < now_) {
    throw ScenarioError("event '" + std::string(kind) + "' scheduled at " + std::to_string(at) +
                        " before current time " + std::to_string(now_));
  }
  return queue_.push(at, node, std::string(kind), std::move(action));
}

EventId Simulator::schedule_timer(NodeId node, Nanos delay, std::string_view kind, Action action) {
  const uint64_t inc = nodes_.at(node).incarnation;
  return schedule(now_ + delay, node, kind, [this, node, inc, a = std::move(action)] {
    const auto& n = nodes_[node];
    if (n.up && n.incarnation == inc) a();
  });
}

bool Simulator::partitioned(NodeId a, NodeId b) const {
  for (const auto& p : partitions_) {
    if (now_ < p.from || now_ >= p.until) continue;
    const bool ia = std::find(p.side.begin(), p.side.end(), a) != p.side.end();
    const bool ib = std::find(p.side.begin(), p.side.end(), b) != p.side.end();
    if (ia != ib) return true;
  }
  return false;
}

void Simulator::add_partition(std::vector<NodeId> side, Nanos from, Nanos until) {
  partitions_.push_back(Partition{std::move(side), from, until});
}

void Simulator::send(NodeId src, NodeId dst, std::string_view kind, Action on_deliver,
                     const DetailFn& details) {
  std::string info = (tracing_ && details) ? details() : std::string();
  if (partitioned(src, dst)) {
    if (tracing_) record(src, "drop", std::string(kind) + " -> " + nodes_[dst].name + " partition " + info);
    return;
  }
  const LinkSample s = link(src, dst).sample();
  if (s.dropped) {
    if (tracing_) record(src, "drop", std::string(kind) + " -> " + nodes_[dst].name + " " + info);
    return;
  }
  if (tracing_) {
    record(src, "send",
           std::string(kind) + " -> " + nodes_[dst].name + " delay=" + std::to_string(s.delay) + " " + info);
  }
  if (s.duplicate_delay) {
    if (tracing_) {
      record(src, "dup", std::string(kind) + " -> " + nodes_[dst].name +
                             " delay=" + std::to_string(*s.duplicate_delay));
    }
    deliver(src, dst, kind, *s.duplicate_delay, on_deliver, info);
  }
  deliver(src, dst, kind, s.delay, std::move(on_deliver), info);
}

void Simulator::deliver(NodeId src, NodeId dst, std::string_view kind, Nanos delay, Action on_deliver,
                        const std::string& details) {
  std::string k(kind);
  schedule(now_ + delay, dst, k, [this, src, dst, k, a = std::move(on_deliver), details] {
    if (!nodes_[dst].up) {
      if (tracing_) record(dst, "drop", k + " <- " + nodes_[src].name + " node-down");
      return;
    }
    if (tracing_) record(dst, "deliver", k + " <- " + nodes_[src].name + " " + details);
    a();
  });
}

Nanos Simulator::read_clock(NodeId node) { return nodes_.at(node).clock.read(now_); }

void Simulator::crash(NodeId node) {
  auto& n = nodes_.at(node);
  n.up = false;
  ++n.incarnation;
  if (tracing_) record(node, "crash", "");
}

void Simulator::restart(NodeId node) {
  auto& n = nodes_.at(node);
  n.up = true;
  ++n.incarnation;
  if (tracing_) record(node, "restart", "");
}

bool Simulator::step() {
  if (queue_.empty()) return false;
  Event e = queue_.pop();
  now_ = e.at;
  ++processed_;
  e.action();
  if (post_event_) post_event_();
  return true;
}

void Simulator::run_until(Nanos t) {
  while (!queue_.empty() && queue_.next_time() <= t) step();
  if (now_ < t) now_ = t;
}

void Simulator::record(NodeId node, std::string_view kind, std::string details) {
  if (!tracing_) return;
  trace_.push_back(TraceRecord{now_, node == kNoNode ? std::string("-") : nodes_.at(node).name,
                               std::string(kind), std::move(details)});
}

void Simulator::write_trace(std::ostream& out) const {
  for (const auto& r : trace_) out << r.time << '\t' << r.node << '\t' << r.kind << '\t' << r.details << '\n';
}

}  // namespace nezha::sim

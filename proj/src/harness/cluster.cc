#include "nezha/harness/cluster.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_map>

#include "nezha/dom/owd.h"
#include "nezha/dom/reorder.h"

namespace nezha::harness {

using replica::CommitPath;
using replica::Envelope;
using replica::Message;
using replica::Status;

// ---------------------------------------------------------------- helpers

std::map<std::pair<CommitPath, uint32_t>, uint64_t> measure_message_delays(const History& h) {
  std::map<std::pair<CommitPath, uint32_t>, uint64_t> out;
  for (const auto& op : h) {
    if (op.status == OpStatus::Committed) ++out[{op.path, op.hops}];
  }
  return out;
}

Nanos latency_percentile(const History& h, double p) {
  std::vector<Nanos> lat;
  for (const auto& op : h) {
    if (op.status == OpStatus::Committed) lat.push_back(op.response - op.invoke);
  }
  if (lat.empty()) return 0;
  return dom::percentile_nearest_rank(std::move(lat), p);
}

std::optional<size_t> first_order_violation(const std::vector<Request>& seq, bool commutativity) {
  if (!commutativity) {
    for (size_t i = 1; i < seq.size(); ++i) {
      if (!(seq[i - 1].tuple() < seq[i].tuple())) return i;
    }
    return std::nullopt;
  }
  // Per key: the largest tuple among earlier writes and among all earlier ops.
  std::unordered_map<std::string, DeadlineTuple> max_write, max_any;
  DeadlineTuple max_keyless = kMinTuple;
  DeadlineTuple max_all = kMinTuple;
  for (size_t i = 0; i < seq.size(); ++i) {
    const auto& r = seq[i];
    const DeadlineTuple t = r.tuple();
    std::map<std::string, bool> writes;
    for (const auto& op : r.command.ops) {
      if (op.kind == OpKind::Nop) continue;
      writes[op.key] = writes[op.key] || op.kind == OpKind::Set;
    }
    if (writes.empty()) {
      if (!(max_all < t)) return i;
    } else {
      if (!(max_keyless < t)) return i;
      for (const auto& [k, w] : writes) {
        const auto& table = w ? max_any : max_write;
        auto it = table.find(k);
        if (it != table.end() && !(it->second < t)) return i;
      }
    }
    max_all = std::max(max_all, t);
    if (writes.empty()) max_keyless = std::max(max_keyless, t);
    for (const auto& [k, w] : writes) {
      auto& a = max_any.try_emplace(k, kMinTuple).first->second;
      a = std::max(a, t);
      if (w) {
        auto& m = max_write.try_emplace(k, kMinTuple).first->second;
        m = std::max(m, t);
      }
    }
  }
  return std::nullopt;
}

namespace {

// Plain sequential key-value executor used as the replay oracle.
Result replay_step(std::map<std::string, int64_t>& s, const Command& c) {
  Result r;
  for (const auto& op : c.ops) {
    if (op.kind == OpKind::Nop) {
      r.values.push_back(0);
      continue;
    }
    auto it = s.find(op.key);
    r.values.push_back(it == s.end() ? std::nullopt : std::optional<int64_t>(it->second));
    if (op.kind == OpKind::Set) s[op.key] = op.value;
  }
  return r;
}

uint64_t pack(const RequestKey& k) { return (uint64_t{k.client_id} << 32) | k.request_id; }

std::string key_str(const RequestKey& k) { return to_string(k); }

}  // namespace

// ---------------------------------------------------------------- env

class Cluster::NodeEnv : public replica::Env {
 public:
  NodeEnv(Cluster& c, NodeId id, sim::Engine rng) : c_(c), id_(id), rng_(rng) {}
  NodeId self() const override { return id_; }
  Nanos clock() override { return c_.sim_.read_clock(id_); }
  void send(NodeId dst, Message msg, uint32_t depth) override { c_.transmit(id_, dst, std::move(msg), depth); }
  void timer(Nanos delay, std::function<void()> fn) override {
    c_.sim_.schedule_timer(id_, delay, "timer", std::move(fn));
  }
  uint64_t random() override { return rng_(); }

 private:
  Cluster& c_;
  NodeId id_;
  sim::Engine rng_;
};

// ---------------------------------------------------------------- setup

Cluster::Cluster(ScenarioConfig cfg) : cfg_(std::move(cfg)), sim_(cfg_.seed) {
  cfg_.validate();
  sim_.enable_trace(cfg_.run.trace);
  const int n = cfg_.replicas();
  const int np = cfg_.proxy_mode ? cfg_.proxies : 0;
  first_proxy_ = n;
  first_client_ = n + np;

  auto add = [&](const std::string& name, Role role, int index) {
    auto it = cfg_.clocks.find(name);
    const sim::ClockModel clock = it == cfg_.clocks.end() ? cfg_.default_clock : it->second;
    const NodeId id = sim_.add_node(name, clock);
    auto node = std::make_unique<Node>();
    node->role = role;
    node->index = index;
    node->env = std::make_unique<NodeEnv>(*this, id, sim::make_stream(cfg_.seed, "node/" + name));
    nodes_.push_back(std::move(node));
  };
  for (int i = 0; i < n; ++i) add("r" + std::to_string(i), Role::Replica, i);
  for (int i = 0; i < np; ++i) add("p" + std::to_string(i), Role::Proxy, i);
  for (int i = 0; i < cfg_.clients; ++i) add("c" + std::to_string(i), Role::Client, i);

  for (NodeId a = 0; a < nodes_.size(); ++a) {
    for (NodeId b = 0; b < nodes_.size(); ++b) {
      if (a != b) sim_.set_link(a, b, link_class(a, b));
    }
  }
  for (const auto& o : cfg_.link_overrides) sim_.set_link(node_by_name(o.from), node_by_name(o.to), o.model);
  for (const auto& p : cfg_.partitions) {
    std::vector<NodeId> side;
    for (const auto& s : p.side) side.push_back(node_by_name(s));
    sim_.add_partition(side, p.from, p.until);
    last_fault_ = std::max(last_fault_, p.until);
  }

  const auto& pr = cfg_.protocol;
  auto commit_hook = [this](const replica::ClientReply& r, NodeId) { on_proxy_commit(r); };
  for (NodeId id = 0; id < nodes_.size(); ++id) {
    Node& node = *nodes_[id];
    const auto& clock = sim_.clock_model(id);
    if (node.role == Role::Replica) {
      replica::ReplicaConfig rc;
      rc.f = cfg_.f;
      rc.commutativity = cfg_.commutativity;
      rc.bounded_degradation = pr.bounded_degradation;
      rc.degradation_threshold = pr.degradation_threshold;
      rc.heartbeat = pr.heartbeat;
      rc.suspicion_missed = pr.suspicion_missed;
      rc.retransmit = pr.retransmit;
      rc.checkpoint_recovery = pr.checkpoint_recovery;
      rc.hash_crash_vector = pr.hash_crash_vector;
      rc.sigma_recv = clock.sigma_recv;
      node.replica = std::make_unique<replica::Replica>(static_cast<ReplicaId>(node.index), rc, *node.env, static_cast<replica::Observer*>(this));
    } else if (node.role == Role::Proxy) {
      node.proxy = std::make_unique<proxy::Proxy>(proxy::ProxyConfig{cfg_.f, cfg_.dom, clock.sigma_send, false},
                                                  *node.env);
      node.proxy->set_commit_hook(commit_hook);
    } else {
      proxy::ClientConfig cc;
      cc.id = static_cast<ClientId>(node.index);
      if (cfg_.proxy_mode) {
        for (int i = 0; i < np; ++i) cc.proxies.push_back(proxy_node(i));
      } else {
        cc.proxies = {id};
      }
      cc.co_located = !cfg_.proxy_mode;
      cc.timeout = pr.client_timeout;
      cc.retry_limit = pr.retry_limit;
      cc.mode = cfg_.workload.mode;
      cc.requests = cfg_.workload.requests_per_client;
      cc.rate = cfg_.workload.rate;
      cc.duration = cfg_.workload.duration;
      cc.start_at = cfg_.workload.start_stagger * node.index;
      node.workload = std::make_unique<CommandGenerator>(
          cfg_.workload, cc.id, sim::make_stream(cfg_.seed, "workload/c" + std::to_string(node.index)));
      CommandGenerator* gen = node.workload.get();
      node.client = std::make_unique<proxy::Client>(
          cc, *node.env, [gen] { return gen->next(); }, [this] { return sim_.now(); });
      if (!cfg_.proxy_mode) {
        node.proxy = std::make_unique<proxy::Proxy>(proxy::ProxyConfig{cfg_.f, cfg_.dom, clock.sigma_send, true},
                                                    *node.env);
        node.proxy->set_commit_hook(commit_hook);
        proxy::Client* client = node.client.get();
        proxy::Proxy* p = node.proxy.get();
        p->set_local_reply([client](const replica::ClientReply& r, uint32_t depth) { client->on_reply(r, depth); });
        client->set_local_submit([p, id](const replica::ClientRequest& req, NodeId) { p->submit(id, req, 0); });
      }
    }
  }
  release_ids_.resize(static_cast<size_t>(n));
}

Cluster::~Cluster() = default;

NodeId Cluster::node_by_name(const std::string& name) const {
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    if (sim_.node_name(i) == name) return i;
  }
  throw ConfigError("node", "no node named '" + name + "'");
}

sim::LinkModel Cluster::link_class(NodeId a, NodeId b) const {
  const Role ra = nodes_[a]->role;
  const Role rb = nodes_[b]->role;
  if (ra == Role::Replica && rb == Role::Replica) return cfg_.replica_replica;
  if (ra == Role::Replica || rb == Role::Replica) return cfg_.proxy_replica;
  return cfg_.client_proxy;
}

std::optional<ReplicaId> Cluster::current_leader() const {
  std::optional<ReplicaId> best;
  ViewId bv = 0;
  for (ReplicaId r = 0; r < static_cast<ReplicaId>(cfg_.replicas()); ++r) {
    const auto& rep = *nodes_[r]->replica;
    if (!sim_.is_up(r) || rep.status() != Status::Normal || !rep.is_leader()) continue;
    if (!best || rep.view() > bv) {
      best = r;
      bv = rep.view();
    }
  }
  if (best) return best;
  for (ReplicaId r = 0; r < static_cast<ReplicaId>(cfg_.replicas()); ++r) {
    const auto& rep = *nodes_[r]->replica;
    if (!sim_.is_up(r) || rep.status() == Status::Down) continue;
    if (!best || rep.view() >= bv) {
      bv = rep.view();
      best = rep.leader_of(bv);
    }
  }
  return best;
}

// ---------------------------------------------------------------- messaging

void Cluster::transmit(NodeId src, NodeId dst, Message msg, uint32_t depth) {
  const char* kind = replica::message_kind(msg);
  auto env = std::make_shared<const Envelope>(Envelope{src, depth, std::move(msg)});
  sim::Simulator::DetailFn details;
  if (sim_.tracing()) details = [env] { return replica::describe(env->msg); };
  sim_.send(src, dst, kind, [this, dst, env] { deliver(dst, *env); }, details);
}

void Cluster::deliver(NodeId dst, const Envelope& e) {
  Node& node = *nodes_[dst];
  switch (node.role) {
    case Role::Replica:
      node.replica->handle(e);
      break;
    case Role::Proxy:
      node.proxy->handle(e);
      break;
    case Role::Client:
      if (std::holds_alternative<replica::ClientReply>(e.msg)) {
        node.client->handle(e);
      } else if (node.proxy) {
        node.proxy->handle(e);
      }
      break;
  }
}

// ---------------------------------------------------------------- faults

void Cluster::crash_node(NodeId n) {
  if (!sim_.is_up(n)) return;
  sim_.crash(n);
  ++crashes_;
  last_fault_ = std::max(last_fault_, sim_.now());
  Node& node = *nodes_[n];
  if (node.replica) node.replica->crash();
  if (node.role == Role::Proxy) node.proxy->crash();
}

void Cluster::restart_node(NodeId n) {
  if (sim_.is_up(n)) return;
  sim_.restart(n);
  last_fault_ = std::max(last_fault_, sim_.now());
  Node& node = *nodes_[n];
  if (node.replica) node.replica->rejoin();
}

void Cluster::schedule_faults() {
  for (const auto& e : cfg_.crashes) {
    const Nanos delay = e.rejoin_at ? *e.rejoin_at - e.at : 0;
    const bool rejoin = e.rejoin_at.has_value();
    sim_.schedule(e.at, kNoNode, "fault", [this, e, delay, rejoin] { try_kill(e, delay, rejoin); });
    last_fault_ = std::max(last_fault_, e.rejoin_at.value_or(e.at));
  }
}

void Cluster::try_kill(const CrashEvent& e, Nanos rejoin_delay, bool has_rejoin) {
  std::optional<NodeId> target;
  if (e.node == "leader") {
    if (auto l = current_leader()) target = *l;
  } else {
    target = node_by_name(e.node);
  }
  const bool is_replica = target && nodes_[*target]->role == Role::Replica;
  bool defer = !target;
  if (is_replica) {
    if (!sim_.is_up(*target)) {
      sim_.record(*target, "fault", "kill skipped: already down");
      return;
    }
    // Never let more than f replicas be down or recovering at once.
    int others = 0;
    for (ReplicaId r = 0; r < static_cast<ReplicaId>(cfg_.replicas()); ++r) {
      if (r == *target) continue;
      if (!sim_.is_up(r) || nodes_[r]->replica->status() == Status::Recovering) ++others;
    }
    defer = others >= cfg_.f;
  }
  if (defer) {
    const Nanos retry = millis(1);
    if (sim_.now() + retry < cfg_.run.max_time) {
      sim_.record(kNoNode, "fault", "kill " + e.node + " deferred");
      last_fault_ = std::max(last_fault_, sim_.now() + retry + rejoin_delay);
      sim_.schedule_after(retry, kNoNode, "fault", [this, e, rejoin_delay, has_rejoin] {
        try_kill(e, rejoin_delay, has_rejoin);
      });
    }
    return;
  }
  const NodeId t = *target;
  sim_.record(t, "fault", "kill");
  crash_node(t);
  if (has_rejoin) {
    last_fault_ = std::max(last_fault_, sim_.now() + rejoin_delay);
    sim_.schedule_after(rejoin_delay, kNoNode, "fault", [this, t] {
      sim_.record(t, "fault", "rejoin");
      restart_node(t);
    });
  }
}

// ---------------------------------------------------------------- run

void Cluster::start() {
  if (started_) return;
  started_ = true;
  for (auto& node : nodes_) {
    if (node->replica) node->replica->start();
  }
  for (auto& node : nodes_) {
    if (node->client) node->client->start();
  }
  schedule_faults();
  uint64_t counter = 0;
  const uint64_t every = std::max<uint64_t>(1, cfg_.run.oracle_every);
  sim_.set_post_event_hook([this, counter, every]() mutable {
    if (++counter % every == 0) check_periodic();
  });
}

bool Cluster::all_clients_done() const {
  for (const auto& node : nodes_) {
    if (node->client && !node->client->done()) return false;
  }
  return true;
}

void Cluster::run() {
  start();
  const bool scheduled = !cfg_.crashes.empty() || !cfg_.partitions.empty();
  const Nanos settle =
      cfg_.run.settle > 0 ? cfg_.run.settle : (cfg_.protocol.suspicion_missed + 3) * cfg_.protocol.heartbeat;
  auto unfinished = [this] {
    uint64_t n = 0;
    for (const auto& node : nodes_) {
      if (!node->client) continue;
      for (const auto& op : node->client->history()) n += op.status == OpStatus::Pending;
    }
    return n;
  };
  while (true) {
    // Scripted crashes count as faults too.
    const bool faulty = scheduled || crashes_ > 0;
    if (all_clients_done() && (!faulty || sim_.now() >= last_fault_ + settle)) break;
    if (sim_.now() > cfg_.run.max_time) {
      diagnostic_ = "horizon " + std::to_string(cfg_.run.max_time) + "ns reached with " +
                    std::to_string(unfinished()) + " ops unfinished";
      break;
    }
    if (!sim_.step()) {
      diagnostic_ = "deadlock: event queue drained at " + std::to_string(sim_.now()) + "ns with " +
                    std::to_string(unfinished()) + " ops unfinished";
      break;
    }
  }
}

// ---------------------------------------------------------------- oracles

void Cluster::violation(std::string oracle, std::string detail) {
  if (violations_.size() >= 200) return;
  if (!reported_.insert(oracle + "|" + detail).second) return;
  violations_.push_back(Violation{std::move(oracle), sim_.now(), std::move(detail)});
}

void Cluster::on_proxy_commit(const replica::ClientReply& r) {
  const RequestKey k{r.client_id, r.request_id};
  CommitRecord rec{k, r.result, r.path, r.view, sim_.now()};
  commits_.push_back(rec);
  auto [it, fresh] = committed_result_.try_emplace(k, r.result);
  if (!fresh && it->second != r.result) {
    violation("consistency", key_str(k) + " committed with results " + it->second.to_string() + " and " +
                                 r.result.to_string());
  }
  if (commit_hook) commit_hook(rec);
}

void Cluster::on_release(ReplicaId r, ViewId v, uint64_t inc, const Request& req) {
  segments_[SegmentKey{r, v, inc}].push_back(req);
  release_ids_[r].push_back(pack(req.key()));
}

void Cluster::on_fast_reply(ReplicaId r, const replica::FastReply& fr) {
  if (fast_reply_hook) fast_reply_hook(r, fr);
}

void Cluster::on_normal(ReplicaId r, ViewId, bool leader) {
  if (leader) check_leader_log(r);
}

void Cluster::on_log_status(ReplicaId r, ViewId v, uint64_t sp) {
  const auto& log = nodes_[r]->replica->synced();
  Report rep;
  rep.sync_point = sp;
  rep.prefix.reserve(sp);
  for (size_t i = 0; i < sp && i < log.size(); ++i) rep.prefix.push_back(log[i].tuple());
  reports_[{r, v}] = std::move(rep);
}

void Cluster::on_commit_point(ReplicaId leader, ViewId v, uint64_t cp) {
  const auto& log = nodes_[leader]->replica->synced();
  int holders = 1;
  for (ReplicaId r = 0; r < static_cast<ReplicaId>(cfg_.replicas()); ++r) {
    if (r == leader) continue;
    auto it = reports_.find({r, v});
    if (it == reports_.end() || it->second.sync_point < cp) continue;
    bool same = cp <= log.size();
    for (size_t i = 0; same && i < cp; ++i) same = it->second.prefix[i] == log[i].tuple();
    holders += same;
  }
  if (holders < cfg_.f + 1) {
    violation("commit_point", "r" + std::to_string(leader) + " view " + std::to_string(v) + " commit point " +
                                  std::to_string(cp) + " held by only " + std::to_string(holders) + " replicas");
  }
}

void Cluster::check_leader_log(ReplicaId leader) {
  const auto& rep = *nodes_[leader]->replica;
  std::map<std::string, int64_t> state;
  std::unordered_map<RequestKey, Result, RequestKeyHash> results;
  for (const auto& e : rep.synced()) results.emplace(e.key(), replay_step(state, e.request.command));
  for (const auto& [k, res] : committed_result_) {
    auto it = results.find(k);
    if (it == results.end()) {
      violation("durability", "committed " + key_str(k) + " missing from r" + std::to_string(leader) +
                                  " log in view " + std::to_string(rep.view()));
    } else if (it->second != res) {
      violation("consistency", "committed " + key_str(k) + " returned " + res.to_string() + " but replay of r" +
                                   std::to_string(leader) + " view " + std::to_string(rep.view()) + " gives " +
                                   it->second.to_string());
    }
  }
}

void Cluster::check_periodic() {
  const ReplicaId n = static_cast<ReplicaId>(cfg_.replicas());
  std::vector<Request> seq;
  for (ReplicaId r = 0; r < n; ++r) {
    const auto& rep = *nodes_[r]->replica;
    if (!sim_.is_up(r) || rep.status() != Status::Normal) continue;
    seq.clear();
    for (const auto& e : rep.synced()) seq.push_back(e.request);
    for (const auto& e : rep.unsynced()) seq.push_back(e.request);
    if (auto bad = first_order_violation(seq, cfg_.commutativity)) {
      violation("log_order", "r" + std::to_string(r) + " view " + std::to_string(rep.view()) + " entry " +
                                 std::to_string(*bad) + " " + seq[*bad].tuple().to_string() + " out of order");
    }
    if (rep.is_leader() && !rep.unsynced().empty()) {
      violation("prefix_consistency", "leader r" + std::to_string(r) + " has unsynced entries");
    }
  }
  for (ReplicaId l = 0; l < n; ++l) {
    const auto& leader = *nodes_[l]->replica;
    if (!sim_.is_up(l) || leader.status() != Status::Normal || !leader.is_leader()) continue;
    const auto& ll = leader.synced();
    for (ReplicaId r = 0; r < n; ++r) {
      const auto& f = *nodes_[r]->replica;
      if (r == l || !sim_.is_up(r) || f.status() != Status::Normal || f.view() != leader.view()) continue;
      const auto& fl = f.synced();
      for (size_t i = 0; i < fl.size(); ++i) {
        if (i >= ll.size() || !same_entry(fl[i], ll[i])) {
          violation("prefix_consistency", "r" + std::to_string(r) + " synced entry " + std::to_string(i) +
                                              " differs from leader r" + std::to_string(l) + " in view " +
                                              std::to_string(leader.view()));
          break;
        }
      }
    }
  }
}

void Cluster::check_final(RunResult& out) {
  check_periodic();
  for (const auto& [seg, reqs] : segments_) {
    if (auto bad = first_order_violation(reqs, cfg_.commutativity)) {
      violation("dom_ordering", "r" + std::to_string(seg.replica) + " view " + std::to_string(seg.view) +
                                    " incarnation " + std::to_string(seg.incarnation) + " released " +
                                    reqs[*bad].tuple().to_string() + " out of order");
    }
  }
  if (auto l = current_leader(); l && nodes_[*l]->replica->status() == Status::Normal) check_leader_log(*l);
  for (ReplicaId r = 0; r < static_cast<ReplicaId>(cfg_.replicas()); ++r) {
    const uint64_t d = nodes_[r]->replica->kv().duplicate_executions();
    if (d) violation("at_most_once", "r" + std::to_string(r) + " executed " + std::to_string(d) + " duplicates");
  }
  // Path labels seen by clients must match a proxy decision.
  std::map<RequestKey, std::set<CommitPath>> decided;
  for (const auto& c : commits_) decided[c.key].insert(c.path);
  for (const auto& op : out.history) {
    if (op.status != OpStatus::Committed) continue;
    const RequestKey k{op.client_id, op.request_id};
    auto it = decided.find(k);
    if (it == decided.end() || !it->second.count(op.path)) {
      violation("history", key_str(k) + " path label has no matching quorum decision");
    }
    if (op.response <= op.invoke) violation("history", key_str(k) + " response not after invocation");
  }
  const auto lin = check_linearizability(out.history, cfg_.run.lin_bound);
  switch (lin.verdict) {
    case LinVerdict::Ok:
      out.metrics.linearizability = "ok";
      break;
    case LinVerdict::Violation:
      out.metrics.linearizability = "violation";
      violation("linearizability", lin.message);
      break;
    case LinVerdict::Refused:
      out.metrics.linearizability = "skipped";
      break;
  }
}

RunResult Cluster::finish() {
  RunResult out;
  out.seed = cfg_.seed;
  out.diagnostic = diagnostic_;
  std::vector<const History*> hs;
  for (const auto& node : nodes_) {
    if (node->client) hs.push_back(&node->client->history());
  }
  out.history = merge_histories(hs);
  check_final(out);

  auto& m = out.metrics;
  for (const auto& op : out.history) {
    ++m.submitted;
    switch (op.status) {
      case OpStatus::Committed:
        ++m.committed;
        (op.path == CommitPath::Fast ? m.fast : m.slow)++;
        break;
      case OpStatus::Failed:
        ++m.failed;
        break;
      case OpStatus::Pending:
        ++m.in_flight;
        break;
    }
  }
  m.fcr = m.committed ? static_cast<double>(m.fast) / static_cast<double>(m.committed) : 0.0;
  m.latency_p50 = latency_percentile(out.history, 50);
  m.latency_p90 = latency_percentile(out.history, 90);
  m.latency_p99 = latency_percentile(out.history, 99);
  m.message_delays = measure_message_delays(out.history);
  for (const auto& node : nodes_) {
    if (node->client) m.retries += node->client->retries();
    if (!node->replica) continue;
    const auto& s = node->replica->stats();
    m.view_changes += s.view_changes;
    m.state_transfers += s.state_transfers;
    m.late_arrivals += s.late_arrivals;
    m.deadline_rewrites += s.deadline_rewrites;
    m.degraded += s.degraded;
  }
  for (size_t a = 0; a < release_ids_.size(); ++a) {
    for (size_t b = a + 1; b < release_ids_.size(); ++b) {
      m.reordering_scores.push_back(ReorderScore{static_cast<ReplicaId>(a), static_cast<ReplicaId>(b),
                                                 dom::reordering_score(release_ids_[a], release_ids_[b])});
    }
  }
  m.crashes = crashes_;
  m.events = sim_.events_processed();
  m.sim_end = sim_.now();
  out.violations = violations_;
  m.violations = out.violations.size();
  out.trace = sim_.trace();
  return out;
}

RunResult run_scenario(const ScenarioConfig& cfg) {
  Cluster c(cfg);
  c.run();
  return c.finish();
}

// ---------------------------------------------------------------- export

void write_metrics_header(std::ostream& out) {
  out << "seed,submitted,committed,failed,in_flight,fast,slow,fcr,latency_p50_ns,latency_p90_ns,latency_p99_ns,"
         "retries,view_changes,state_transfers,late_arrivals,deadline_rewrites,degraded,crashes,events,sim_end_ns,"
         "linearizability,violations\n";
}

void write_metrics_row(std::ostream& out, const RunResult& r) {
  const auto& m = r.metrics;
  std::ostringstream fcr;
  fcr << std::fixed << std::setprecision(6) << m.fcr;
  out << r.seed << ',' << m.submitted << ',' << m.committed << ',' << m.failed << ',' << m.in_flight << ','
      << m.fast << ',' << m.slow << ',' << fcr.str() << ',' << m.latency_p50 << ',' << m.latency_p90 << ','
      << m.latency_p99 << ',' << m.retries << ',' << m.view_changes << ',' << m.state_transfers << ','
      << m.late_arrivals << ',' << m.deadline_rewrites << ',' << m.degraded << ',' << m.crashes << ',' << m.events
      << ',' << m.sim_end << ',' << m.linearizability << ',' << m.violations << '\n';
}

void write_metrics_csv(std::ostream& out, const RunResult& r) {
  write_metrics_header(out);
  write_metrics_row(out, r);
}

void write_hops_csv(std::ostream& out, const RunMetrics& m) {
  out << "path,hops,commits\n";
  for (const auto& [k, n] : m.message_delays) {
    out << (k.first == CommitPath::Fast ? "fast" : "slow") << ',' << k.second << ',' << n << '\n';
  }
}

void write_reorder_csv(std::ostream& out, const RunMetrics& m) {
  out << "reference,observed,score\n";
  for (const auto& s : m.reordering_scores) {
    out << 'r' << s.reference << ",r" << s.observed << ',' << std::fixed << std::setprecision(6) << s.score << '\n';
  }
}

void write_violations_csv(std::ostream& out, const std::vector<Violation>& v) {
  out << "oracle,time_ns,detail\n";
  for (const auto& x : v) {
    std::string d = x.detail;
    std::replace(d.begin(), d.end(), ',', ';');
    out << x.oracle << ',' << x.time << ',' << d << '\n';
  }
}

void write_trace(std::ostream& out, const std::vector<sim::TraceRecord>& trace) {
  for (const auto& r : trace) out << r.time << '\t' << r.node << '\t' << r.kind << '\t' << r.details << '\n';
}

void write_outputs(const std::string& dir, const RunResult& r) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(fs::path(dir) / name);
    if (!f) throw std::runtime_error("cannot write " + (fs::path(dir) / name).string());
    return f;
  };
  {
    auto f = open("metrics.csv");
    write_metrics_csv(f, r);
  }
  {
    auto f = open("history.csv");
    write_history_csv(f, r.history);
  }
  {
    auto f = open("hops.csv");
    write_hops_csv(f, r.metrics);
  }
  {
    auto f = open("reorder.csv");
    write_reorder_csv(f, r.metrics);
  }
  {
    auto f = open("violations.csv");
    write_violations_csv(f, r.violations);
  }
  {
    auto f = open("trace.tsv");
    write_trace(f, r.trace);
  }
}

}  // namespace nezha::harness

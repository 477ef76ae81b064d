#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "nezha/harness/config.h"
#include "nezha/harness/history.h"
#include "nezha/harness/workload.h"
#include "nezha/proxy/client.h"
#include "nezha/proxy/proxy.h"
#include "nezha/replica/replica.h"
#include "nezha/sim/simulator.h"

namespace nezha::harness {

struct Violation {
  std::string oracle;
  Nanos time = 0;
  std::string detail;
};

struct ReorderScore {
  ReplicaId reference = 0;
  ReplicaId observed = 0;
  double score = 0;
};

struct RunMetrics {
  uint64_t submitted = 0;
  uint64_t committed = 0;
  uint64_t failed = 0;
  uint64_t in_flight = 0;
  uint64_t fast = 0;
  uint64_t slow = 0;
  double fcr = 0;
  Nanos latency_p50 = 0;
  Nanos latency_p90 = 0;
  Nanos latency_p99 = 0;
  // (path, hops) -> commits
  std::map<std::pair<replica::CommitPath, uint32_t>, uint64_t> message_delays;
  std::vector<ReorderScore> reordering_scores;
  uint64_t retries = 0;
  uint64_t view_changes = 0;
  uint64_t state_transfers = 0;
  uint64_t late_arrivals = 0;
  uint64_t deadline_rewrites = 0;
  uint64_t degraded = 0;
  uint64_t crashes = 0;
  uint64_t events = 0;
  Nanos sim_end = 0;
  // ok | violation | skipped
  std::string linearizability = "skipped";
  uint64_t violations = 0;
};

// A commit as decided by a proxy's quorum check.
struct CommitRecord {
  RequestKey key;
  Result result;
  replica::CommitPath path = replica::CommitPath::Fast;
  ViewId view = 0;
  Nanos time = 0;
};

struct RunResult {
  uint64_t seed = 0;
  RunMetrics metrics;
  History history;
  std::vector<Violation> violations;
  std::vector<sim::TraceRecord> trace;
  // Set when the run stopped for a reason other than completing its workload.
  std::string diagnostic;

  bool ok() const { return violations.empty(); }
};

// measure_message_delays: per-commit hop counts, keyed by commit path.
std::map<std::pair<replica::CommitPath, uint32_t>, uint64_t> measure_message_delays(const History& h);

// Latency percentile (nearest rank) over committed ops, in ns. 0 if none.
Nanos latency_percentile(const History& h, double p);

// Conflicting requests must appear in increasing deadline-tuple order.
// Returns the index of the first offending entry.
std::optional<size_t> first_order_violation(const std::vector<Request>& seq, bool commutativity);

// One simulated deployment: replicas r0..r2f are nodes 0..2f, then proxies
// p0.. (proxy mode only), then clients c0... In non-proxy mode each client
// node hosts its own proxy.
class Cluster : private replica::Observer {
 public:
  explicit Cluster(ScenarioConfig cfg);
  ~Cluster() override;
  Cluster(const Cluster&) = delete;
  Cluster& operator=(const Cluster&) = delete;

  const ScenarioConfig& config() const { return cfg_; }
  sim::Simulator& sim() { return sim_; }
  int replica_count() const { return cfg_.replicas(); }
  replica::Replica& replica(ReplicaId r) { return *nodes_.at(r)->replica; }
  proxy::Client& client(int i) { return *nodes_.at(client_node(i))->client; }
  NodeId client_node(int i) const { return static_cast<NodeId>(first_client_ + i); }
  NodeId proxy_node(int i) const { return static_cast<NodeId>(first_proxy_ + i); }
  NodeId node_by_name(const std::string& name) const;

  // Leader of the highest view held by a live replica.
  std::optional<ReplicaId> current_leader() const;

  // Fault controls usable from scripted scenarios.
  void crash_node(NodeId n);
  void restart_node(NodeId n);

  // Called on every fast reply a replica sends, before it leaves the node.
  std::function<void(ReplicaId, const replica::FastReply&)> fast_reply_hook;
  // Called on every proxy commit decision.
  std::function<void(const CommitRecord&)> commit_hook;

  void start();
  // Runs until every client finishes (plus settle time after faults), the
  // horizon is reached, or the event queue drains.
  void run();
  // Final oracles and metrics.
  RunResult finish();

  const std::vector<Violation>& violations() const { return violations_; }
  const std::vector<CommitRecord>& commits() const { return commits_; }

 private:
  enum class Role { Replica, Proxy, Client };
  class NodeEnv;
  struct Node {
    Role role = Role::Replica;
    int index = 0;
    std::unique_ptr<NodeEnv> env;
    std::unique_ptr<replica::Replica> replica;
    std::unique_ptr<proxy::Proxy> proxy;
    std::unique_ptr<proxy::Client> client;
    std::unique_ptr<CommandGenerator> workload;
  };
  struct SegmentKey {
    ReplicaId replica;
    ViewId view;
    uint64_t incarnation;
    auto operator<=>(const SegmentKey&) const = default;
  };
  struct Report {
    uint64_t sync_point = 0;
    std::vector<DeadlineTuple> prefix;
  };

  void transmit(NodeId src, NodeId dst, replica::Message msg, uint32_t depth);
  void deliver(NodeId dst, const replica::Envelope& e);
  sim::LinkModel link_class(NodeId a, NodeId b) const;
  void schedule_faults();
  void try_kill(const CrashEvent& e, Nanos rejoin_delay, bool has_rejoin);
  bool all_clients_done() const;
  void violation(std::string oracle, std::string detail);
  void on_proxy_commit(const replica::ClientReply& r);

  // Observer
  void on_release(ReplicaId r, ViewId v, uint64_t inc, const Request& req) override;
  void on_fast_reply(ReplicaId r, const replica::FastReply& fr) override;
  void on_normal(ReplicaId r, ViewId v, bool leader) override;
  void on_commit_point(ReplicaId r, ViewId v, uint64_t cp) override;
  void on_log_status(ReplicaId r, ViewId v, uint64_t sp) override;

  // Oracles
  void check_leader_log(ReplicaId leader);
  void check_periodic();
  void check_final(RunResult& out);

  ScenarioConfig cfg_;
  sim::Simulator sim_;
  std::vector<std::unique_ptr<Node>> nodes_;
  int first_proxy_ = 0;
  int first_client_ = 0;
  Nanos last_fault_ = 0;
  uint64_t crashes_ = 0;
  bool started_ = false;
  std::string diagnostic_;

  std::vector<Violation> violations_;
  std::set<std::string> reported_;
  std::vector<CommitRecord> commits_;
  std::map<RequestKey, Result> committed_result_;
  std::map<SegmentKey, std::vector<Request>> segments_;
  std::vector<std::vector<uint64_t>> release_ids_;
  std::map<std::pair<ReplicaId, ViewId>, Report> reports_;
};

RunResult run_scenario(const ScenarioConfig& cfg);

// CSV/trace export. Times are integer ns.
void write_metrics_csv(std::ostream& out, const RunResult& r);
void write_metrics_header(std::ostream& out);
void write_metrics_row(std::ostream& out, const RunResult& r);
void write_hops_csv(std::ostream& out, const RunMetrics& m);
void write_reorder_csv(std::ostream& out, const RunMetrics& m);
void write_violations_csv(std::ostream& out, const std::vector<Violation>& v);
void write_trace(std::ostream& out, const std::vector<sim::TraceRecord>& trace);
// Writes metrics.csv, history.csv, hops.csv, reorder.csv, violations.csv and
// trace.tsv under `dir`, creating it if needed.
void write_outputs(const std::string& dir, const RunResult& r);

}  // namespace nezha::harness

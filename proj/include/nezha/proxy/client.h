#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "nezha/replica/env.h"
#include "nezha/sim/rng.h"

namespace nezha::proxy {

enum class LoopMode { Closed, Open };
enum class OpStatus { Pending, Committed, Failed };

struct ClientConfig {
  ClientId id = 0;
  std::vector<NodeId> proxies;
  bool co_located = false;
  Nanos timeout = micros(100);
  int retry_limit = 50;
  LoopMode mode = LoopMode::Closed;
  uint64_t requests = 100;
  // Open loop: mean arrival rate (requests per simulated second).
  double rate = 1000;
  // Open loop: no new arrivals after this time (0 = unbounded).
  Nanos duration = 0;
  Nanos start_at = 0;
};

// One client operation as seen by the client. Times are true simulated time.
struct OpRecord {
  ClientId client_id = 0;
  RequestId request_id = 0;
  Command command;
  Nanos invoke = 0;
  Nanos response = 0;
  std::optional<Result> result;
  OpStatus status = OpStatus::Pending;
  replica::CommitPath path = replica::CommitPath::Fast;
  ViewId view = 0;
  uint32_t hops = 0;
  int attempts = 0;
};

class Client {
 public:
  using CommandSource = std::function<Command()>;
  using Submit = std::function<void(const replica::ClientRequest&, NodeId proxy)>;
  using Clock = std::function<Nanos()>;

  Client(ClientConfig cfg, replica::Env& env, CommandSource commands, Clock true_time);

  void start();
  void handle(const replica::Envelope& e);
  void on_reply(const replica::ClientReply& r, uint32_t depth);
  // Replaces network submission (co-located proxy).
  void set_local_submit(Submit s) { local_submit_ = std::move(s); }

  const std::vector<OpRecord>& history() const { return ops_; }
  uint64_t retries() const { return retries_; }
  bool done() const;

 private:
  void issue();
  void send(OpRecord& op);
  void arm_timeout(RequestId rid, int attempt);
  void schedule_arrival();

  ClientConfig cfg_;
  replica::Env& env_;
  CommandSource commands_;
  Clock now_;
  Submit local_submit_;
  sim::Engine rng_;
  std::vector<OpRecord> ops_;  // index = request_id - 1
  size_t next_proxy_ = 0;
  uint64_t retries_ = 0;
  uint64_t outstanding_ = 0;
  bool stopped_ = false;
};

}  // namespace nezha::proxy

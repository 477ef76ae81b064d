#pragma once

#include <functional>
#include <map>
#include <vector>

#include "nezha/dom/owd.h"
#include "nezha/proxy/reply_set.h"
#include "nezha/replica/env.h"

namespace nezha::proxy {

struct ProxyConfig {
  int f = 1;
  dom::DomParams dom;
  // Error bound this proxy reports as DOM sender.
  Nanos sigma_send = 0;
  // Proxy runs inside the client node (non-proxy mode).
  bool co_located = false;
};

struct ProxyStats {
  uint64_t submitted = 0;
  uint64_t fast_commits = 0;
  uint64_t slow_commits = 0;
};

// Stateless proxy: DOM sender plus quorum check. It never deduplicates; a
// committed request is answered once and forgotten.
class Proxy {
 public:
  using CommitHook = std::function<void(const replica::ClientReply&, NodeId client)>;
  using LocalReply = std::function<void(const replica::ClientReply&, uint32_t depth)>;

  Proxy(ProxyConfig cfg, replica::Env& env);

  // Client -> proxy. `depth` counts hops so far (0 when co-located).
  void submit(NodeId client, const replica::ClientRequest& req, uint32_t depth);
  // Replica replies.
  void handle(const replica::Envelope& e);

  void set_commit_hook(CommitHook h) { on_commit_ = std::move(h); }
  void set_local_reply(LocalReply f) { local_reply_ = std::move(f); }

  // Drops OWD history; only latency should change.
  void reset_windows();
  // Loses all in-flight state.
  void crash();

  const ProxyStats& stats() const { return stats_; }
  const std::vector<dom::OwdWindow>& windows() const { return windows_; }
  size_t in_flight() const { return pending_.size(); }

 private:
  struct Pending {
    NodeId client = kNoNode;
    ReplySet replies;
  };
  void maybe_commit(const RequestKey& k);

  ProxyConfig cfg_;
  replica::Env& env_;
  int n_;
  std::vector<dom::OwdWindow> windows_;
  std::vector<Nanos> sigma_recv_;
  std::map<RequestKey, Pending> pending_;
  CommitHook on_commit_;
  LocalReply local_reply_;
  ProxyStats stats_;
};

}  // namespace nezha::proxy

#include "nezha/proxy/proxy.h"

namespace nezha::proxy {

using replica::ClientReply;
using replica::ClientRequest;

Proxy::Proxy(ProxyConfig cfg, replica::Env& env) : cfg_(cfg), env_(env), n_(2 * cfg.f + 1) {
  windows_.assign(static_cast<size_t>(n_), dom::OwdWindow(cfg_.dom));
  sigma_recv_.assign(static_cast<size_t>(n_), 0);
}

void Proxy::submit(NodeId client, const ClientRequest& req, uint32_t depth) {
  ++stats_.submitted;
  Request r;
  r.client_id = req.client_id;
  r.request_id = req.request_id;
  r.command = req.command;
  r.send_time = env_.clock();
  std::vector<Nanos> est(static_cast<size_t>(n_));
  for (size_t i = 0; i < est.size(); ++i) est[i] = dom::estimate_owd(windows_[i], cfg_.sigma_send, sigma_recv_[i]);
  r.deadline = dom::make_deadline(r.send_time, est);
  r.reply_to = env_.self();
  pending_.try_emplace(r.key(), Pending{client, {}}).first->second.client = client;
  for (ReplicaId i = 0; i < static_cast<ReplicaId>(n_); ++i) env_.send(i, replica::RequestMsg{r}, depth + 1);
}

void Proxy::handle(const replica::Envelope& e) {
  if (const auto* fr = std::get_if<replica::FastReply>(&e.msg)) {
    if (fr->replica < windows_.size()) {
      windows_[fr->replica].add(fr->owd_sample);
      sigma_recv_[fr->replica] = fr->sigma_recv;
    }
    const RequestKey k{fr->client_id, fr->request_id};
    auto it = pending_.find(k);
    if (it == pending_.end()) return;
    if (it->second.replies.add_fast(*fr, e.depth)) maybe_commit(k);
  } else if (const auto* sr = std::get_if<replica::SlowReply>(&e.msg)) {
    const RequestKey k{sr->client_id, sr->request_id};
    auto it = pending_.find(k);
    if (it == pending_.end()) return;
    if (it->second.replies.add_slow(*sr, e.depth)) maybe_commit(k);
  } else if (const auto* cr = std::get_if<ClientRequest>(&e.msg)) {
    submit(e.src, *cr, e.depth);
  }
}

void Proxy::maybe_commit(const RequestKey& k) {
  auto it = pending_.find(k);
  auto decision = check_committed(it->second.replies, cfg_.f);
  if (!decision) return;
  const NodeId client = it->second.client;
  pending_.erase(it);
  (decision->path == CommitPath::Fast ? stats_.fast_commits : stats_.slow_commits)++;
  ClientReply reply{k.client_id, k.request_id, *decision->leader.result, decision->path, decision->leader.view,
                    decision->hops};
  if (on_commit_) on_commit_(reply, client);
  if (cfg_.co_located) {
    if (local_reply_) local_reply_(reply, decision->hops);
  } else {
    reply.hops = decision->hops + 1;
    env_.send(client, reply, decision->hops + 1);
  }
}

void Proxy::reset_windows() {
  for (auto& w : windows_) w.clear();
}

void Proxy::crash() {
  reset_windows();
  pending_.clear();
}

}  // namespace nezha::proxy

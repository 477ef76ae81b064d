#include "nezha/proxy/client.h"

#include <random>

namespace nezha::proxy {

using replica::ClientReply;
using replica::ClientRequest;

Client::Client(ClientConfig cfg, replica::Env& env, CommandSource commands, Clock true_time)
    : cfg_(std::move(cfg)), env_(env), commands_(std::move(commands)), now_(std::move(true_time)), rng_(env.random()) {
  next_proxy_ = cfg_.proxies.empty() ? 0 : cfg_.id % cfg_.proxies.size();
}

void Client::start() {
  const Nanos delay = std::max<Nanos>(0, cfg_.start_at - now_());
  if (cfg_.mode == LoopMode::Closed) {
    env_.timer(delay, [this] { issue(); });
  } else {
    env_.timer(delay, [this] { schedule_arrival(); });
  }
}

bool Client::done() const { return (ops_.size() >= cfg_.requests || stopped_) && outstanding_ == 0; }

void Client::schedule_arrival() {
  if (ops_.size() >= cfg_.requests) return;
  if (cfg_.duration > 0 && now_() >= cfg_.start_at + cfg_.duration) {
    stopped_ = true;
    return;
  }
  issue();
  std::exponential_distribution<double> gap(cfg_.rate / static_cast<double>(kNanosPerSecond));
  const Nanos d = std::max<Nanos>(1, static_cast<Nanos>(gap(rng_)));
  env_.timer(d, [this] { schedule_arrival(); });
}

void Client::issue() {
  if (ops_.size() >= cfg_.requests) return;
  OpRecord op;
  op.client_id = cfg_.id;
  op.request_id = static_cast<RequestId>(ops_.size() + 1);
  op.command = commands_();
  op.invoke = now_();
  ops_.push_back(std::move(op));
  ++outstanding_;
  send(ops_.back());
}

void Client::send(OpRecord& op) {
  ++op.attempts;
  ClientRequest req{op.client_id, op.request_id, op.command};
  const NodeId proxy = cfg_.proxies.at(next_proxy_);
  if (local_submit_) {
    local_submit_(req, proxy);
  } else {
    env_.send(proxy, req, 1);
  }
  arm_timeout(op.request_id, op.attempts);
}

void Client::arm_timeout(RequestId rid, int attempt) {
  env_.timer(cfg_.timeout, [this, rid, attempt] {
    OpRecord& op = ops_.at(rid - 1);
    if (op.status != OpStatus::Pending || op.attempts != attempt) return;
    if (op.attempts > cfg_.retry_limit) {
      op.status = OpStatus::Failed;
      op.response = now_();
      --outstanding_;
      if (cfg_.mode == LoopMode::Closed) issue();
      return;
    }
    ++retries_;
    next_proxy_ = (next_proxy_ + 1) % cfg_.proxies.size();
    send(op);
  });
}

void Client::handle(const replica::Envelope& e) {
  if (const auto* r = std::get_if<ClientReply>(&e.msg)) on_reply(*r, e.depth);
}

void Client::on_reply(const ClientReply& r, uint32_t depth) {
  if (r.client_id != cfg_.id || r.request_id == 0 || r.request_id > ops_.size()) return;
  OpRecord& op = ops_[r.request_id - 1];
  if (op.status != OpStatus::Pending) return;
  op.status = OpStatus::Committed;
  op.response = now_();
  op.result = r.result;
  op.path = r.path;
  op.view = r.view;
  op.hops = depth;
  --outstanding_;
  if (cfg_.mode == LoopMode::Closed) issue();
}

}  // namespace nezha::proxy

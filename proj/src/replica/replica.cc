#include "nezha/replica/replica.h"

#include <algorithm>

#include "nezha/recovery/merge_log.h"

namespace nezha::replica {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::vector<std::string> written_keys(const Command& c) {
  std::vector<std::string> out;
  for (const auto& op : c.ops) {
    if (op.kind == OpKind::Set) out.push_back(op.key);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

hashing::Digest160 digest_of(const Request& r) {
  return hashing::entry_digest(r.deadline, r.client_id, r.request_id);
}

}  // namespace

const char* status_name(Status s) {
  switch (s) {
    case Status::Normal: return "NORMAL";
    case Status::ViewChange: return "VIEWCHANGE";
    case Status::Recovering: return "RECOVERING";
    case Status::Down: return "DOWN";
  }
  return "?";
}

hashing::Digest160 chain_digest(const std::vector<LogEntry>& log, size_t n) {
  hashing::Digest160 d;
  std::vector<uint8_t> buf(36);
  for (size_t i = 0; i < n && i < log.size(); ++i) {
    const auto enc = hashing::encode_entry(log[i].request.deadline, log[i].request.client_id, log[i].request.request_id);
    std::copy(d.bytes.begin(), d.bytes.end(), buf.begin());
    std::copy(enc.begin(), enc.end(), buf.begin() + 20);
    d = hashing::sha1(buf);
  }
  return d;
}

Replica::Replica(ReplicaId id, ReplicaConfig cfg, Env& env, Observer* obs)
    : id_(id), cfg_(cfg), env_(env), obs_(obs), n_(2 * cfg.f + 1) {
  cv_.assign(static_cast<size_t>(n_), 0);
  follower_sp_.assign(static_cast<size_t>(n_), 0);
}

std::vector<LogEntry> Replica::log() const {
  std::vector<LogEntry> out = synced_;
  out.insert(out.end(), unsynced_.begin(), unsynced_.end());
  return out;
}

void Replica::reset_volatile() {
  early_.clear();
  late_.clear();
  tracker_.reset();
  synced_.clear();
  unsynced_.clear();
  synced_hash_ = unsynced_hash_ = {};
  synced_keys_.clear();
  unsynced_keys_.clear();
  released_.clear();
  arrivals_.clear();
  kv_.reset();
  executed_ = 0;
  commit_point_ = 0;
  release_armed_ = false;
  ++release_gen_;
  retransmit_armed_ = false;
  pending_mods_.clear();
  follower_sp_.assign(static_cast<size_t>(n_), 0);
  parked_.clear();
  leader_len_ = 0;
  fetch_.reset();
  fetched_.reset();
  last_sync_request_ = INT64_MIN;
  missed_ = 0;
  vc_set_.clear();
  vc_ticks_ = 0;
  phase_ = RecoveryPhase::None;
  cv_reps_.clear();
  rec_reps_.clear();
  catchup_.reset();
}

void Replica::start() {
  reset_volatile();
  status_ = Status::Normal;
  view_ = lnv_ = 0;
  cv_.assign(static_cast<size_t>(n_), 0);
  env_.timer(cfg_.heartbeat, [this] { tick(); });
  if (obs_) obs_->on_normal(id_, view_, is_leader());
}

void Replica::crash() {
  reset_volatile();
  status_ = Status::Down;
  ++incarnation_;
}

void Replica::rejoin() {
  reset_volatile();
  status_ = Status::Recovering;
  view_ = lnv_ = 0;
  cv_.assign(static_cast<size_t>(n_), 0);
  nonce_ = {env_.random(), env_.random()};
  phase_ = RecoveryPhase::CrashVectors;
  broadcast(CrashVectorReq{id_, nonce_});
  arm_retransmit();
  env_.timer(cfg_.heartbeat, [this] { tick(); });
}

void Replica::broadcast(const Message& m, uint32_t depth) {
  for (ReplicaId r = 0; r < static_cast<ReplicaId>(n_); ++r) {
    if (r != id_) env_.send(r, m, depth);
  }
}

bool Replica::accept_cv(ReplicaId sender, const CrashVector& cv) {
  if (cv.size() != cv_.size() || sender >= cv_.size()) return false;
  if (recovery::check_crash_vector(sender, cv, cv_) == recovery::CvCheck::Stray) {
    ++stats_.stray_dropped;
    return false;
  }
  return true;
}

hashing::Digest160 Replica::cv_digest() const {
  return cfg_.hash_crash_vector ? hashing::crash_vector_digest(cv_) : hashing::Digest160{};
}

hashing::Digest160 Replica::hash_part(const Request& r, bool) const {
  const auto keys = r.command.keys();
  if (!cfg_.commutativity || keys.empty()) return synced_hash_ ^ unsynced_hash_;
  hashing::Digest160 h;
  for (const auto& k : keys) h ^= synced_keys_.get(k) ^ unsynced_keys_.get(k);
  return h;
}

void Replica::add_synced(const LogEntry& e) {
  const auto d = digest_of(e.request);
  synced_.push_back(e);
  synced_hash_ ^= d;
  for (const auto& k : written_keys(e.request.command)) synced_keys_.apply(k, d);
}

void Replica::add_unsynced(const LogEntry& e) {
  const auto d = digest_of(e.request);
  unsynced_.push_back(e);
  unsynced_hash_ ^= d;
  for (const auto& k : written_keys(e.request.command)) unsynced_keys_.apply(k, d);
}

LogEntry Replica::remove_unsynced(size_t idx) {
  LogEntry e = std::move(unsynced_[idx]);
  unsynced_.erase(unsynced_.begin() + static_cast<long>(idx));
  const auto d = digest_of(e.request);
  unsynced_hash_ ^= d;
  for (const auto& k : written_keys(e.request.command)) unsynced_keys_.apply(k, d);
  return e;
}

void Replica::handle(const Envelope& e) {
  if (status_ == Status::Down) return;
  std::visit(overloaded{
                 [&](const RequestMsg& m) { on_request(m, e.depth); },
                 [&](const SyncMsg& m) { on_sync(m, e.src); },
                 [&](const LogStatus& m) { on_log_status(m); },
                 [&](const SyncRequest& m) { on_sync_request(m); },
                 [&](const FetchReq& m) { on_fetch_req(m, e.depth); },
                 [&](const FetchRep& m) { on_fetch_rep(m, e.depth); },
                 [&](const CrashVectorReq& m) { on_crash_vector_req(m); },
                 [&](const CrashVectorRep& m) { on_crash_vector_rep(m); },
                 [&](const RecoveryReq& m) { on_recovery_req(m); },
                 [&](const RecoveryRep& m) { on_recovery_rep(m); },
                 [&](const StateTransferReq& m) { on_state_transfer_req(m); },
                 [&](const StateTransferRep& m) { on_state_transfer_rep(m); },
                 [&](const ViewChangeReq& m) { on_view_change_req(m); },
                 [&](const ViewChange& m) { on_view_change(m); },
                 [&](const StartView& m) { on_start_view(m); },
                 [](const auto&) {},
             },
             e.msg);
  pump();
  flush();
}

// ---------------------------------------------------------------- fast path

void Replica::on_request(const RequestMsg& m, uint32_t depth) {
  if (status_ != Status::Normal) return;
  Request r = m.request;
  const RequestKey k = r.key();
  if (released_.count(k)) {
    resend_reply(r, depth);
    return;
  }
  if (early_.contains(k)) return;
  late_.take(k);
  arrivals_[k] = Arrival{env_.clock() - r.send_time, depth};
  if (is_leader()) {
    leader_admit(std::move(r));
    return;
  }
  if (dom::classify(r, tracker_, cfg_.commutativity) == dom::Route::Early) {
    early_.push(std::move(r));
  } else {
    ++stats_.late_arrivals;
    late_.insert(std::move(r));
  }
}

void Replica::leader_admit(Request r) {
  const Nanos now = env_.clock();
  const DeadlineTuple thr = tracker_.threshold(r, cfg_.commutativity);
  if (!(r.tuple() > thr)) {
    ++stats_.late_arrivals;
    ++stats_.deadline_rewrites;
    r.deadline = std::max(now, thr.deadline + kNanosPerMicro);
  }
  if (cfg_.bounded_degradation && r.deadline > now + cfg_.degradation_threshold) {
    const Nanos shrunk = thr == kMinTuple ? now : thr.deadline + kNanosPerMicro;
    if (shrunk < r.deadline) {
      r.deadline = shrunk;
      ++stats_.degraded;
    }
  }
  early_.push(std::move(r));
}

void Replica::resend_reply(const Request& r, uint32_t depth) {
  const auto& rel = released_.at(r.key());
  const Nanos owd = env_.clock() - r.send_time;
  if (is_leader()) {
    if (!rel.result) return;
    FastReply fr{view_, id_, r.client_id, r.request_id, rel.result, rel.hash_part ^ cv_digest(), rel.deadline, owd,
                 cfg_.sigma_recv};
    env_.send(r.reply_to, fr, depth + 1);
  } else if (rel.synced) {
    env_.send(r.reply_to, SlowReply{view_, id_, r.client_id, r.request_id}, depth + 1);
  } else {
    FastReply fr{view_, id_, r.client_id, r.request_id, std::nullopt, rel.hash_part ^ cv_digest(), rel.deadline, owd,
                 cfg_.sigma_recv};
    env_.send(r.reply_to, fr, depth + 1);
  }
}

void Replica::pump() {
  if (status_ != Status::Normal || early_.empty()) return;
  auto out = dom::release_ready(early_, tracker_, env_.clock());
  for (auto& r : out) on_release(std::move(r));
  arm_release();
}

void Replica::arm_release() {
  if (early_.empty()) return;
  const Nanos target = early_.top().deadline;
  if (release_armed_ && release_target_ <= target) return;
  release_armed_ = true;
  release_target_ = target;
  const uint64_t gen = ++release_gen_;
  const Nanos delay = std::max<Nanos>(1, target - env_.clock());
  env_.timer(delay, [this, gen] {
    if (gen == release_gen_) release_armed_ = false;
    pump();
    flush();
  });
}

void Replica::on_release(Request r) {
  ++stats_.released;
  if (obs_) obs_->on_release(id_, view_, incarnation_, r);
  const RequestKey k = r.key();
  Arrival a;
  if (auto it = arrivals_.find(k); it != arrivals_.end()) a = it->second;
  LogEntry e{r, a.depth};
  FastReply fr{view_, id_, r.client_id, r.request_id, std::nullopt, {}, r.deadline, a.owd, cfg_.sigma_recv};
  if (is_leader()) {
    add_synced(e);
    Result res = kv_.apply(r);
    executed_ = synced_.size();
    const auto hp = hash_part(r, true);
    released_[k] = Released{true, res, hp, r.reply_to, r.deadline};
    pending_mods_.push_back(LogMod{synced_.size() - 1, r.client_id, r.request_id, r.deadline, r.reply_to, e.depth});
    fr.result = std::move(res);
    fr.hash = hp ^ cv_digest();
  } else {
    add_unsynced(e);
    const auto hp = hash_part(r, false);
    released_[k] = Released{false, std::nullopt, hp, r.reply_to, r.deadline};
    fr.hash = hp ^ cv_digest();
  }
  ++stats_.fast_replies;
  if (obs_) obs_->on_fast_reply(id_, fr);
  env_.send(r.reply_to, std::move(fr), a.depth + 1);
}

void Replica::flush() {
  if (pending_mods_.empty()) return;
  if (!is_leader() || status_ != Status::Normal) {
    pending_mods_.clear();
    return;
  }
  SyncMsg m{view_, cv_, commit_point_, synced_.size(), std::move(pending_mods_)};
  pending_mods_.clear();
  broadcast(m, 1);
}

// ---------------------------------------------------------------- slow path

void Replica::on_sync(const SyncMsg& m, NodeId src) {
  if (status_ == Status::Recovering || m.view < view_) return;
  const ReplicaId ldr = leader_of(m.view);
  if (src != ldr || ldr == id_) return;
  if (m.view > view_ || status_ != Status::Normal) {
    // Missed a view change: catch up from the leader of the newer view.
    if (!accept_cv(ldr, m.cv)) return;
    if (catchup_ && catchup_->second >= m.view) return;
    catchup_ = std::make_pair(ldr, m.view);
    request_state_transfer(ldr);
    arm_retransmit();
    return;
  }
  if (!accept_cv(ldr, m.cv)) return;
  missed_ = 0;
  for (const auto& mod : m.entries) {
    if (mod.log_id >= synced_.size() && parked_.size() < cfg_.max_parked) parked_.emplace(mod.log_id, Parked{mod});
  }
  leader_len_ = std::max<uint64_t>(leader_len_, m.leader_log_len);
  apply_parked();
  const uint64_t cp = std::min<uint64_t>(m.commit_point, synced_.size());
  if (cp > commit_point_) {
    commit_point_ = cp;
    advance_execution(cp);
  }
  if (m.entries.empty()) {
    env_.send(ldr, LogStatus{view_, id_, synced_.size(), cv_}, 1);
    if (obs_) obs_->on_log_status(id_, view_, synced_.size());
  }
  if (synced_.size() < leader_len_ && !fetch_ && !parked_.count(synced_.size())) request_sync();
}

void Replica::apply_parked() {
  while (!fetch_) {
    while (!parked_.empty() && parked_.begin()->first < synced_.size()) parked_.erase(parked_.begin());
    auto it = parked_.find(synced_.size());
    if (it == parked_.end()) break;
    const LogMod mod = it->second.mod;
    if (!apply_mod(mod)) break;
    parked_.erase(mod.log_id);
  }
}

bool Replica::apply_mod(const LogMod& mod) {
  const RequestKey k{mod.client_id, mod.request_id};
  std::optional<Request> body;
  uint32_t local_depth = 0;
  for (size_t i = 0; i < unsynced_.size(); ++i) {
    if (unsynced_[i].key() == k) {
      body = remove_unsynced(i).request;
      break;
    }
  }
  if (!body) body = late_.take(k);
  if (!body) body = early_.take(k);
  if (body) {
    if (auto it = arrivals_.find(k); it != arrivals_.end()) local_depth = it->second.depth;
  } else if (fetched_ && fetched_->first == mod.log_id && fetched_->second.first.key() == k) {
    body = fetched_->second.first;
    local_depth = fetched_->second.second;
  } else {
    const uint32_t d = mod.depth + 2;
    fetch_ = FetchWait{mod.log_id, k, env_.clock(), d};
    ++stats_.fetches;
    env_.send(leader_of(view_), FetchReq{view_, id_, mod.log_id, mod.client_id, mod.request_id}, d);
    arm_retransmit();
    return false;
  }
  fetched_.reset();
  body->deadline = mod.deadline;
  body->reply_to = mod.reply_to;
  LogEntry e{*body, std::max(mod.depth + 1, local_depth)};

  // Unsynced entries ordered before this one but absent from the leader's
  // prefix are wrong; park them in the late buffer.
  for (size_t i = 0; i < unsynced_.size();) {
    const auto& u = unsynced_[i];
    if (u.tuple() < e.tuple() && (!cfg_.commutativity || conflicts(u.request.command, e.request.command))) {
      LogEntry w = remove_unsynced(i);
      released_.erase(w.key());
      late_.insert(std::move(w.request));
    } else {
      ++i;
    }
  }
  add_synced(e);
  released_[k] = Released{true, std::nullopt, {}, mod.reply_to, mod.deadline};
  tracker_.note_released(e.request);
  for (auto& r : early_.extract_if_not([&](const Request& r) { return tracker_.eligible(r, cfg_.commutativity); })) {
    late_.insert(std::move(r));
  }
  SlowReply sr{view_, id_, mod.client_id, mod.request_id};
  ++stats_.slow_replies;
  if (obs_) obs_->on_slow_reply(id_, sr);
  env_.send(mod.reply_to, sr, e.depth + 1);
  return true;
}

void Replica::request_sync() {
  const Nanos now = env_.clock();
  if (last_sync_request_ != INT64_MIN && now - last_sync_request_ < cfg_.retransmit && now >= last_sync_request_) return;
  last_sync_request_ = now;
  env_.send(leader_of(view_), SyncRequest{view_, id_, synced_.size()}, 1);
  arm_retransmit();
}

void Replica::on_sync_request(const SyncRequest& m) {
  if (status_ != Status::Normal || !is_leader() || m.view != view_) return;
  SyncMsg out{view_, cv_, commit_point_, synced_.size(), {}};
  const uint64_t end = std::min<uint64_t>(synced_.size(), m.from + cfg_.resend_batch);
  for (uint64_t i = m.from; i < end; ++i) {
    const auto& r = synced_[i].request;
    out.entries.push_back(LogMod{i, r.client_id, r.request_id, r.deadline, r.reply_to, synced_[i].depth});
  }
  env_.send(m.replica, std::move(out), 1);
}

void Replica::on_fetch_req(const FetchReq& m, uint32_t depth) {
  if (status_ != Status::Normal || !is_leader() || m.view != view_) return;
  if (m.log_id >= synced_.size()) return;
  const auto& e = synced_[m.log_id];
  if (e.key() != RequestKey{m.client_id, m.request_id}) return;
  env_.send(m.replica, FetchRep{view_, m.log_id, e.request}, depth + 1);
}

void Replica::on_fetch_rep(const FetchRep& m, uint32_t depth) {
  if (status_ != Status::Normal || m.view != view_ || !fetch_) return;
  if (fetch_->log_id != m.log_id || fetch_->key != m.request.key()) return;
  fetched_ = std::make_pair(m.log_id, std::make_pair(m.request, depth));
  fetch_.reset();
  apply_parked();
}

void Replica::on_log_status(const LogStatus& m) {
  if (status_ != Status::Normal || !is_leader() || m.view != view_ || m.replica >= follower_sp_.size()) return;
  if (!accept_cv(m.replica, m.cv)) return;
  follower_sp_[m.replica] = std::max(follower_sp_[m.replica], m.sync_point);
  std::vector<uint64_t> sps = follower_sp_;
  sps[id_] = synced_.size();
  std::sort(sps.begin(), sps.end(), std::greater<>());
  const uint64_t cp = std::min<uint64_t>(sps[static_cast<size_t>(cfg_.f)], synced_.size());
  if (cp > commit_point_) {
    commit_point_ = cp;
    if (obs_) obs_->on_commit_point(id_, view_, cp);
  }
}

void Replica::advance_execution(uint64_t upto) {
  while (executed_ < upto && executed_ < synced_.size()) {
    kv_.apply(synced_[executed_].request);
    ++executed_;
  }
}

void Replica::send_heartbeat() { broadcast(SyncMsg{view_, cv_, commit_point_, synced_.size(), {}}, 1); }

// ------------------------------------------------------------ view change

void Replica::initiate_view_change(ViewId v) {
  status_ = Status::ViewChange;
  view_ = v;
  vc_set_.clear();
  vc_ticks_ = 0;
  missed_ = 0;
  catchup_.reset();
  fetch_.reset();
  fetched_.reset();
  parked_.clear();
  pending_mods_.clear();
  ++stats_.view_changes;
  broadcast(ViewChangeReq{id_, v, cv_});
  send_view_change(leader_of(v));
  arm_retransmit();
}

void Replica::send_view_change(ReplicaId to) {
  ViewChange m{id_, view_, lnv_, log(), synced_.size(), cv_};
  if (to == id_) {
    on_view_change(m);
  } else {
    env_.send(to, std::move(m), 1);
  }
}

void Replica::send_start_view(ReplicaId to) { env_.send(to, StartView{id_, view_, cv_, synced_}, 1); }

void Replica::on_view_change_req(const ViewChangeReq& m) {
  if (status_ == Status::Recovering) return;
  if (!accept_cv(m.replica, m.cv)) return;
  if (m.view > view_) {
    initiate_view_change(m.view);
  } else if (status_ == Status::Normal) {
    // Only the view's leader holds a fully synced log to hand out.
    if (is_leader()) send_start_view(m.replica);
  } else if (m.view < view_ || m.replica == leader_of(view_)) {
    send_view_change(m.replica);
  }
}

void Replica::on_view_change(const ViewChange& m) {
  if (status_ == Status::Recovering) return;
  if (!accept_cv(m.replica, m.cv)) return;
  if (status_ == Status::Normal) {
    if (m.view <= view_) {
      if (is_leader()) send_start_view(m.replica);
      return;
    }
    initiate_view_change(m.view);
    if (status_ != Status::ViewChange) return;
  }
  if (m.view > view_) {
    initiate_view_change(m.view);
    if (status_ != Status::ViewChange) return;
  }
  if (m.view < view_) {
    env_.send(m.replica, ViewChangeReq{id_, view_, cv_}, 1);
    return;
  }
  if (leader_of(view_) != id_) return;
  std::vector<ReplicaId> stale;
  for (const auto& [r, x] : vc_set_) {
    if (x.cv[r] < cv_[r]) stale.push_back(r);
  }
  for (ReplicaId r : stale) {
    vc_set_.erase(r);
    env_.send(r, ViewChangeReq{id_, view_, cv_}, 1);
  }
  vc_set_[m.replica] = m;
  if (status_ == Status::ViewChange && vc_set_.size() >= static_cast<size_t>(cfg_.f + 1)) complete_view_change();
}

void Replica::complete_view_change() {
  std::vector<recovery::ViewChangeLog> logs;
  for (const auto& [r, x] : vc_set_) logs.push_back({r, x.view, x.last_normal_view, x.log, x.sync_point});
  auto merged = recovery::merge_log(logs, cfg_.f, cfg_.commutativity);
  vc_set_.clear();
  adopt_log(std::move(merged), view_, 0);
  become_normal();
  broadcast(StartView{id_, view_, cv_, synced_});
}

void Replica::on_start_view(const StartView& m) {
  if (status_ == Status::Recovering) return;
  if (!accept_cv(m.replica, m.cv)) return;
  if (m.view < view_ || (m.view == view_ && status_ == Status::Normal)) return;
  if (m.replica != leader_of(m.view)) return;
  adopt_log(m.log, m.view, 0);
  become_normal();
  env_.send(leader_of(view_), LogStatus{view_, id_, synced_.size(), cv_}, 1);
  if (obs_) obs_->on_log_status(id_, view_, synced_.size());
}

void Replica::adopt_log(std::vector<LogEntry> log, ViewId view, uint64_t commit_point) {
  std::vector<LogEntry> old = this->log();
  view_ = lnv_ = view;
  synced_.clear();
  unsynced_.clear();
  synced_hash_ = unsynced_hash_ = {};
  synced_keys_.clear();
  unsynced_keys_.clear();
  released_.clear();
  kv_.reset();
  executed_ = 0;
  tracker_.reset();
  parked_.clear();
  fetch_.reset();
  fetched_.reset();
  pending_mods_.clear();
  follower_sp_.assign(static_cast<size_t>(n_), 0);
  leader_len_ = log.size();
  catchup_.reset();
  last_sync_request_ = INT64_MIN;

  const bool leader = leader_of(view) == id_;
  for (auto& e : log) {
    add_synced(e);
    // Post-recovery eligibility: the last released request is the largest
    // conflicting entry of the recovered log.
    tracker_.note_released(e.request);
    const auto& r = e.request;
    if (leader) {
      Result res = kv_.apply(r);
      released_[r.key()] = Released{true, std::move(res), hash_part(r, true), r.reply_to, r.deadline};
    } else {
      released_[r.key()] = Released{true, std::nullopt, {}, r.reply_to, r.deadline};
    }
  }
  if (leader) {
    executed_ = synced_.size();
    commit_point_ = std::min<uint64_t>(commit_point, synced_.size());
  } else {
    commit_point_ = std::min<uint64_t>(commit_point, synced_.size());
    advance_execution(commit_point_);
  }

  for (auto& e : old) {
    if (!released_.count(e.key())) late_.insert(e.request);
  }
  early_.extract_if_not([&](const Request& r) { return !released_.count(r.key()); });
  std::vector<RequestKey> drop;
  for (const auto& [k, r] : late_.items()) {
    if (released_.count(k)) drop.push_back(k);
  }
  for (const auto& k : drop) late_.take(k);
  for (auto& r : early_.extract_if_not([&](const Request& r) { return tracker_.eligible(r, cfg_.commutativity); })) {
    late_.insert(std::move(r));
  }
  if (leader) {
    // The leader has no use for a late buffer: re-admit with fresh deadlines.
    std::vector<Request> pending;
    for (const auto& [k, r] : late_.items()) pending.push_back(r);
    late_.clear();
    for (auto& r : pending) leader_admit(std::move(r));
  }
}

void Replica::become_normal() {
  status_ = Status::Normal;
  missed_ = 0;
  vc_ticks_ = 0;
  phase_ = RecoveryPhase::None;
  if (obs_) obs_->on_normal(id_, view_, is_leader());
}

// ---------------------------------------------------------------- rejoin

void Replica::on_crash_vector_req(const CrashVectorReq& m) {
  if (status_ != Status::Normal) return;
  env_.send(m.replica, CrashVectorRep{id_, m.nonce, cv_}, 1);
}

void Replica::on_crash_vector_rep(const CrashVectorRep& m) {
  if (status_ != Status::Recovering || phase_ != RecoveryPhase::CrashVectors || m.nonce != nonce_) return;
  if (m.cv.size() != cv_.size()) return;
  cv_reps_[m.replica] = m.cv;
  if (cv_reps_.size() < static_cast<size_t>(cfg_.f + 1)) return;
  std::vector<CrashVector> all{cv_};
  for (const auto& [r, cv] : cv_reps_) all.push_back(cv);
  cv_ = recovery::aggregate_cv(all);
  ++cv_[id_];
  start_recovery_round();
}

void Replica::start_recovery_round() {
  phase_ = RecoveryPhase::Replies;
  rec_reps_.clear();
  broadcast(RecoveryReq{id_, cv_});
  arm_retransmit();
}

void Replica::on_recovery_req(const RecoveryReq& m) {
  if (status_ != Status::Normal || m.cv.size() != cv_.size()) return;
  cv_ = recovery::aggregate_cv(cv_, m.cv);
  // The rejoining replica lost its log; its old sync-point report is void.
  if (m.replica < follower_sp_.size()) follower_sp_[m.replica] = 0;
  env_.send(m.replica, RecoveryRep{id_, view_, cv_}, 1);
}

void Replica::on_recovery_rep(const RecoveryRep& m) {
  if (status_ != Status::Recovering || phase_ != RecoveryPhase::Replies) return;
  if (m.cv.size() != cv_.size()) return;
  if (recovery::check_crash_vector(m.replica, m.cv, cv_) == recovery::CvCheck::Stray) {
    ++stats_.stray_dropped;
    env_.send(m.replica, RecoveryReq{id_, cv_}, 1);
    return;
  }
  std::vector<ReplicaId> stale;
  for (const auto& [r, x] : rec_reps_) {
    if (x.cv[r] < cv_[r]) stale.push_back(r);
  }
  for (ReplicaId r : stale) {
    rec_reps_.erase(r);
    env_.send(r, RecoveryReq{id_, cv_}, 1);
  }
  rec_reps_[m.replica] = m;
  if (rec_reps_.size() < static_cast<size_t>(cfg_.f + 1)) return;
  ViewId v = 0;
  for (const auto& [r, x] : rec_reps_) v = std::max(v, x.view);
  const ReplicaId l = leader_of(v);
  if (l == id_) {
    // Wait for the others to elect someone else; retransmit asks again.
    rec_reps_.clear();
    return;
  }
  view_ = v;
  phase_ = RecoveryPhase::Transfer;
  transfer_from_ = l;
  transfer_tries_ = 0;
  request_state_transfer(l);
}

void Replica::request_state_transfer(ReplicaId from) {
  StateTransferReq req{id_, cv_, 0, {}};
  if (cfg_.checkpoint_recovery && status_ != Status::Recovering && commit_point_ > 0) {
    req.keep = commit_point_;
    req.prefix_digest = chain_digest(synced_, commit_point_);
  }
  env_.send(from, std::move(req), 1);
}

void Replica::on_state_transfer_req(const StateTransferReq& m) {
  if (status_ != Status::Normal || !is_leader()) return;
  if (!accept_cv(m.replica, m.cv)) return;
  StateTransferRep rep{id_, view_, cv_, 0, {}, synced_.size(), commit_point_};
  if (m.keep > 0 && m.keep <= synced_.size() && chain_digest(synced_, m.keep) == m.prefix_digest) {
    rep.keep = m.keep;
    rep.log.assign(synced_.begin() + static_cast<long>(m.keep), synced_.end());
  } else {
    rep.log = synced_;
  }
  if (m.replica < follower_sp_.size()) follower_sp_[m.replica] = 0;
  env_.send(m.replica, std::move(rep), 1);
}

void Replica::on_state_transfer_rep(const StateTransferRep& m) {
  const bool recovering = status_ == Status::Recovering && phase_ == RecoveryPhase::Transfer;
  const bool catching_up = status_ != Status::Recovering && catchup_ &&
                           (m.view > view_ || (m.view == view_ && status_ != Status::Normal));
  if (!recovering && !catching_up) return;
  if (m.replica != leader_of(m.view)) return;
  if (!accept_cv(m.replica, m.cv)) return;
  std::vector<LogEntry> log;
  if (m.keep > 0) {
    if (m.keep > synced_.size()) return;
    log.assign(synced_.begin(), synced_.begin() + static_cast<long>(m.keep));
  }
  log.insert(log.end(), m.log.begin(), m.log.end());
  ++stats_.state_transfers;
  stats_.transferred_entries += m.log.size();
  adopt_log(std::move(log), m.view, m.commit_point);
  become_normal();
  env_.send(leader_of(view_), LogStatus{view_, id_, synced_.size(), cv_}, 1);
  if (obs_) obs_->on_log_status(id_, view_, synced_.size());
}

// ---------------------------------------------------------------- timers

void Replica::tick() {
  switch (status_) {
    case Status::Down: return;
    case Status::Normal:
      if (is_leader()) {
        send_heartbeat();
      } else if (++missed_ > cfg_.suspicion_missed) {
        initiate_view_change(view_ + 1);
      }
      break;
    case Status::ViewChange:
      if (++vc_ticks_ > cfg_.suspicion_missed) initiate_view_change(view_ + 1);
      break;
    case Status::Recovering: break;
  }
  env_.timer(cfg_.heartbeat, [this] { tick(); });
  pump();
  flush();
}

void Replica::arm_retransmit() {
  if (retransmit_armed_) return;
  retransmit_armed_ = true;
  env_.timer(cfg_.retransmit, [this] {
    retransmit_armed_ = false;
    retransmit();
    pump();
    flush();
  });
}

void Replica::retransmit() {
  bool again = false;
  switch (status_) {
    case Status::Down: return;
    case Status::Normal:
      if (catchup_) {
        request_state_transfer(catchup_->first);
        again = true;
      } else if (fetch_) {
        env_.send(leader_of(view_),
                  FetchReq{view_, id_, fetch_->log_id, fetch_->key.client_id, fetch_->key.request_id}, fetch_->depth);
        again = true;
      } else if (!is_leader() && synced_.size() < leader_len_) {
        request_sync();
        again = true;
      }
      break;
    case Status::ViewChange:
      if (catchup_) {
        request_state_transfer(catchup_->first);
      } else {
        broadcast(ViewChangeReq{id_, view_, cv_});
        send_view_change(leader_of(view_));
      }
      again = status_ == Status::ViewChange;
      break;
    case Status::Recovering:
      switch (phase_) {
        case RecoveryPhase::CrashVectors:
          broadcast(CrashVectorReq{id_, nonce_});
          break;
        case RecoveryPhase::Replies:
          for (ReplicaId r = 0; r < static_cast<ReplicaId>(n_); ++r) {
            if (r != id_ && !rec_reps_.count(r)) env_.send(r, RecoveryReq{id_, cv_}, 1);
          }
          break;
        case RecoveryPhase::Transfer:
          if (++transfer_tries_ > 8) {
            start_recovery_round();
          } else {
            request_state_transfer(transfer_from_);
          }
          break;
        case RecoveryPhase::None: break;
      }
      again = true;
      break;
  }
  if (again) arm_retransmit();
}

}  // namespace nezha::replica

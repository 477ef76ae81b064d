#pragma once

#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "nezha/dom/buffers.h"
#include "nezha/hashing/digest.h"
#include "nezha/replica/env.h"
#include "nezha/replica/kv_store.h"
#include "nezha/replica/messages.h"

namespace nezha::replica {

enum class Status { Normal, ViewChange, Recovering, Down };
const char* status_name(Status s);

struct ReplicaConfig {
  int f = 1;
  bool commutativity = false;
  // Leader shrinks far-future deadlines to just past the last release.
  bool bounded_degradation = false;
  Nanos degradation_threshold = micros(50);
  Nanos heartbeat = millis(10);
  int suspicion_missed = 5;
  // Resend period for fetches, sync requests and recovery/view-change messages.
  Nanos retransmit = micros(500);
  bool checkpoint_recovery = false;
  // Negative-control knob: leave the crash-vector digest out of reply hashes.
  bool hash_crash_vector = true;
  size_t max_parked = 1 << 16;
  size_t resend_batch = 256;
  // Error bound this replica reports as DOM receiver.
  Nanos sigma_recv = 0;
};

// Hooks the harness uses for oracles and fault scripting. All default to no-ops.
class Observer {
 public:
  virtual ~Observer() = default;
  virtual void on_release(ReplicaId, ViewId, uint64_t /*incarnation*/, const Request&) {}
  virtual void on_fast_reply(ReplicaId, const FastReply&) {}
  virtual void on_slow_reply(ReplicaId, const SlowReply&) {}
  virtual void on_normal(ReplicaId, ViewId, bool /*leader*/) {}
  virtual void on_commit_point(ReplicaId, ViewId, uint64_t) {}
  virtual void on_log_status(ReplicaId, ViewId, uint64_t) {}
};

struct ReplicaStats {
  uint64_t released = 0;
  uint64_t late_arrivals = 0;
  uint64_t deadline_rewrites = 0;
  uint64_t degraded = 0;
  uint64_t fast_replies = 0;
  uint64_t slow_replies = 0;
  uint64_t fetches = 0;
  uint64_t view_changes = 0;
  uint64_t state_transfers = 0;
  uint64_t transferred_entries = 0;
  uint64_t stray_dropped = 0;
};

class Replica {
 public:
  Replica(ReplicaId id, ReplicaConfig cfg, Env& env, Observer* obs = nullptr);

  // Boots in view 0 with NORMAL status.
  void start();
  // Loses all volatile state.
  void crash();
  // Restarted after a crash: runs the rejoin protocol.
  void rejoin();
  void handle(const Envelope& e);

  ReplicaId id() const { return id_; }
  Status status() const { return status_; }
  ViewId view() const { return view_; }
  ViewId last_normal_view() const { return lnv_; }
  bool is_leader() const { return leader_of(view_) == id_; }
  ReplicaId leader_of(ViewId v) const { return static_cast<ReplicaId>(v % static_cast<ViewId>(n_)); }
  const CrashVector& crash_vector() const { return cv_; }
  uint64_t incarnation() const { return incarnation_; }

  // Synced prefix followed by the unsynced tail.
  std::vector<LogEntry> log() const;
  const std::vector<LogEntry>& synced() const { return synced_; }
  const std::vector<LogEntry>& unsynced() const { return unsynced_; }
  uint64_t sync_point() const { return synced_.size(); }
  uint64_t commit_point() const { return commit_point_; }
  const KvStore& kv() const { return kv_; }
  const dom::EarlyBuffer& early() const { return early_; }
  const dom::LateBuffer& late() const { return late_; }
  const ReplicaStats& stats() const { return stats_; }
  const ReplicaConfig& config() const { return cfg_; }

  // Running XOR hash of the whole log (synced and unsynced).
  hashing::Digest160 set_hash() const { return synced_hash_ ^ unsynced_hash_; }
  hashing::Digest160 synced_hash() const { return synced_hash_; }
  hashing::Digest160 unsynced_hash() const { return unsynced_hash_; }

 private:
  struct Released {
    bool synced = false;
    std::optional<Result> result;
    hashing::Digest160 hash_part;
    NodeId reply_to = kNoNode;
    Nanos deadline = 0;
  };
  struct Arrival {
    Nanos owd = 0;
    uint32_t depth = 0;
  };
  struct Parked {
    LogMod mod;
  };
  struct FetchWait {
    uint64_t log_id = 0;
    RequestKey key;
    Nanos sent_at = 0;
    uint32_t depth = 0;
  };
  enum class RecoveryPhase { None, CrashVectors, Replies, Transfer };

  // request path
  void on_request(const RequestMsg& m, uint32_t depth);
  void leader_admit(Request r);
  void resend_reply(const Request& r, uint32_t depth);
  void pump();
  void arm_release();
  void on_release(Request r);
  void flush();
  hashing::Digest160 hash_part(const Request& r, bool leader_view) const;
  hashing::Digest160 cv_digest() const;
  void add_synced(const LogEntry& e);
  void add_unsynced(const LogEntry& e);
  LogEntry remove_unsynced(size_t idx);

  // slow path
  void on_sync(const SyncMsg& m, NodeId src);
  void apply_parked();
  bool apply_mod(const LogMod& mod);
  void request_sync();
  void on_sync_request(const SyncRequest& m);
  void on_fetch_req(const FetchReq& m, uint32_t depth);
  void on_fetch_rep(const FetchRep& m, uint32_t depth);
  void on_log_status(const LogStatus& m);
  void advance_execution(uint64_t upto);
  void send_heartbeat();

  // recovery and view change
  bool accept_cv(ReplicaId sender, const CrashVector& cv);
  void broadcast(const Message& m, uint32_t depth = 1);
  void initiate_view_change(ViewId v);
  void send_view_change(ReplicaId to);
  void send_start_view(ReplicaId to);
  void on_view_change_req(const ViewChangeReq& m);
  void on_view_change(const ViewChange& m);
  void complete_view_change();
  void on_start_view(const StartView& m);
  void adopt_log(std::vector<LogEntry> log, ViewId view, uint64_t commit_point);
  void become_normal();
  void on_crash_vector_req(const CrashVectorReq& m);
  void on_crash_vector_rep(const CrashVectorRep& m);
  void on_recovery_req(const RecoveryReq& m);
  void on_recovery_rep(const RecoveryRep& m);
  void on_state_transfer_req(const StateTransferReq& m);
  void on_state_transfer_rep(const StateTransferRep& m);
  void request_state_transfer(ReplicaId from);
  void start_recovery_round();

  void tick();
  void arm_retransmit();
  void retransmit();
  void reset_volatile();

  ReplicaId id_;
  ReplicaConfig cfg_;
  Env& env_;
  Observer* obs_;
  int n_;

  Status status_ = Status::Down;
  ViewId view_ = 0;
  ViewId lnv_ = 0;
  CrashVector cv_;
  uint64_t incarnation_ = 0;

  dom::EarlyBuffer early_;
  dom::LateBuffer late_;
  dom::ReleaseTracker tracker_;
  std::vector<LogEntry> synced_;
  std::vector<LogEntry> unsynced_;
  hashing::Digest160 synced_hash_, unsynced_hash_;
  hashing::KeyHashTable synced_keys_, unsynced_keys_;
  std::unordered_map<RequestKey, Released, RequestKeyHash> released_;
  std::unordered_map<RequestKey, Arrival, RequestKeyHash> arrivals_;
  KvStore kv_;
  uint64_t executed_ = 0;
  uint64_t commit_point_ = 0;

  bool release_armed_ = false;
  Nanos release_target_ = 0;
  uint64_t release_gen_ = 0;
  bool retransmit_armed_ = false;
  bool in_handler_ = false;

  // leader
  std::vector<LogMod> pending_mods_;
  std::vector<uint64_t> follower_sp_;

  // follower
  std::map<uint64_t, Parked> parked_;
  uint64_t leader_len_ = 0;
  std::optional<FetchWait> fetch_;
  std::optional<std::pair<uint64_t, std::pair<Request, uint32_t>>> fetched_;
  Nanos last_sync_request_ = INT64_MIN;
  int missed_ = 0;

  // view change
  std::map<ReplicaId, ViewChange> vc_set_;
  int vc_ticks_ = 0;

  // recovery
  RecoveryPhase phase_ = RecoveryPhase::None;
  Nonce nonce_{};
  std::map<ReplicaId, CrashVector> cv_reps_;
  std::map<ReplicaId, RecoveryRep> rec_reps_;
  ReplicaId transfer_from_ = 0;
  int transfer_tries_ = 0;
  // Laggard state transfer while NORMAL/VIEWCHANGE.
  std::optional<std::pair<ReplicaId, ViewId>> catchup_;

  ReplicaStats stats_;
};

// SHA-1 chain over the tuples of the first n entries.
hashing::Digest160 chain_digest(const std::vector<LogEntry>& log, size_t n);

}  // namespace nezha::replica

#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nezha/common/request.h"
#include "nezha/hashing/digest.h"
#include "nezha/recovery/crash_vector.h"

namespace nezha::replica {

using recovery::CrashVector;
using Nonce = std::array<uint64_t, 2>;

// Client -> proxy.
struct ClientRequest {
  ClientId client_id = 0;
  RequestId request_id = 0;
  Command command;
};

enum class CommitPath : uint8_t { Fast, Slow };

// Proxy -> client.
struct ClientReply {
  ClientId client_id = 0;
  RequestId request_id = 0;
  Result result;
  CommitPath path = CommitPath::Fast;
  ViewId view = 0;
  uint32_t hops = 0;
};

// Proxy -> replica.
struct RequestMsg {
  Request request;
};

struct FastReply {
  ViewId view = 0;
  ReplicaId replica = 0;
  ClientId client_id = 0;
  RequestId request_id = 0;
  std::optional<Result> result;  // leader only
  hashing::Digest160 hash;
  Nanos deadline = 0;
  // Piggybacked OWD feedback for the proxy's estimator.
  Nanos owd_sample = 0;
  Nanos sigma_recv = 0;
};

struct SlowReply {
  ViewId view = 0;
  ReplicaId replica = 0;
  ClientId client_id = 0;
  RequestId request_id = 0;
};

// One log-modification: the leader's entry at position log_id.
struct LogMod {
  uint64_t log_id = 0;
  ClientId client_id = 0;
  RequestId request_id = 0;
  Nanos deadline = 0;
  NodeId reply_to = kNoNode;
  uint32_t depth = 0;  // hops when the body reached the leader
};

// Batched log-modifications. An empty batch is the leader heartbeat.
struct SyncMsg {
  ViewId view = 0;
  CrashVector cv;
  uint64_t commit_point = 0;
  uint64_t leader_log_len = 0;
  std::vector<LogMod> entries;
};

struct LogStatus {
  ViewId view = 0;
  ReplicaId replica = 0;
  uint64_t sync_point = 0;
  CrashVector cv;
};

// Follower asks the leader to resend log-modifications from `from`.
struct SyncRequest {
  ViewId view = 0;
  ReplicaId replica = 0;
  uint64_t from = 0;
};

struct FetchReq {
  ViewId view = 0;
  ReplicaId replica = 0;
  uint64_t log_id = 0;
  ClientId client_id = 0;
  RequestId request_id = 0;
};

struct FetchRep {
  ViewId view = 0;
  uint64_t log_id = 0;
  Request request;
};

struct CrashVectorReq {
  ReplicaId replica = 0;
  Nonce nonce{};
};

struct CrashVectorRep {
  ReplicaId replica = 0;
  Nonce nonce{};
  CrashVector cv;
};

struct RecoveryReq {
  ReplicaId replica = 0;
  CrashVector cv;
};

struct RecoveryRep {
  ReplicaId replica = 0;
  ViewId view = 0;
  CrashVector cv;
};

struct StateTransferReq {
  ReplicaId replica = 0;
  CrashVector cv;
  // Checkpoint acceleration: requester keeps its first `keep` entries when
  // their chained digest matches the leader's.
  uint64_t keep = 0;
  hashing::Digest160 prefix_digest;
};

struct StateTransferRep {
  ReplicaId replica = 0;
  ViewId view = 0;
  CrashVector cv;
  uint64_t keep = 0;  // entries the requester retains; `log` is the suffix
  std::vector<LogEntry> log;
  uint64_t sync_point = 0;
  uint64_t commit_point = 0;
};

struct ViewChangeReq {
  ReplicaId replica = 0;
  ViewId view = 0;
  CrashVector cv;
};

struct ViewChange {
  ReplicaId replica = 0;
  ViewId view = 0;
  ViewId last_normal_view = 0;
  std::vector<LogEntry> log;
  uint64_t sync_point = 0;
  CrashVector cv;
};

struct StartView {
  ReplicaId replica = 0;
  ViewId view = 0;
  CrashVector cv;
  std::vector<LogEntry> log;
};

using Message =
    std::variant<ClientRequest, ClientReply, RequestMsg, FastReply, SlowReply, SyncMsg, LogStatus, SyncRequest,
                 FetchReq, FetchRep, CrashVectorReq, CrashVectorRep, RecoveryReq, RecoveryRep, StateTransferReq,
                 StateTransferRep, ViewChangeReq, ViewChange, StartView>;

struct Envelope {
  NodeId src = kNoNode;
  uint32_t depth = 0;  // network hops on the causal path so far, including this one
  Message msg;
};

const char* message_kind(const Message& m);
std::string describe(const Message& m);

}  // namespace nezha::replica

#pragma once

#include <compare>
#include <optional>
#include <string>

#include "nezha/common/command.h"
#include "nezha/common/types.h"

namespace nezha {

// Total order rank of a request: deadline, then client id, then request id.
struct DeadlineTuple {
  Nanos deadline = 0;
  ClientId client_id = 0;
  RequestId request_id = 0;

  friend auto operator<=>(const DeadlineTuple&, const DeadlineTuple&) = default;
  friend bool operator==(const DeadlineTuple&, const DeadlineTuple&) = default;

  RequestKey key() const { return {client_id, request_id}; }
  std::string to_string() const;
};

inline constexpr DeadlineTuple kMinTuple{INT64_MIN, 0, 0};

// A client request as multicast by a proxy.
struct Request {
  ClientId client_id = 0;
  RequestId request_id = 0;
  Command command;
  Nanos send_time = 0;
  Nanos deadline = 0;
  // Where replies go (the proxy node). Not part of the request identity.
  NodeId reply_to = kNoNode;

  RequestKey key() const { return {client_id, request_id}; }
  DeadlineTuple tuple() const { return {deadline, client_id, request_id}; }
};

struct LogEntry {
  Request request;
  // Network hops accumulated when the entry's body reached this replica;
  // used only for message-delay accounting.
  uint32_t depth = 0;

  RequestKey key() const { return request.key(); }
  DeadlineTuple tuple() const { return request.tuple(); }
};

inline bool same_entry(const LogEntry& a, const LogEntry& b) { return a.tuple() == b.tuple(); }

}  // namespace nezha

#pragma once

#include <functional>

#include "nezha/common/types.h"
#include "nezha/replica/messages.h"

namespace nezha::replica {

// What a protocol actor sees of the outside world. Replica r is node r; the
// harness places proxies and clients after the replicas.
class Env {
 public:
  virtual ~Env() = default;
  virtual NodeId self() const = 0;
  // Local (imperfect) clock reading.
  virtual Nanos clock() = 0;
  // `depth` counts network hops on the causal path including this send.
  virtual void send(NodeId dst, Message msg, uint32_t depth) = 0;
  // Fires after `delay` unless the node crashes first.
  virtual void timer(Nanos delay, std::function<void()> fn) = 0;
  virtual uint64_t random() = 0;
};

}  // namespace nezha::replica

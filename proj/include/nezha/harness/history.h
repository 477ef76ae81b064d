#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "nezha/proxy/client.h"

namespace nezha::harness {

using proxy::OpRecord;
using proxy::OpStatus;
using History = std::vector<OpRecord>;

// Client order, then request order.
History merge_histories(const std::vector<const History*>& per_client);

void write_history_csv(std::ostream& out, const History& h);
// Inverse of write_history_csv for the check-lin subcommand.
History read_history_csv(std::istream& in);

enum class LinVerdict { Ok, Violation, Refused };

struct LinResult {
  LinVerdict verdict = LinVerdict::Ok;
  // Indices into the checked history of a minimal offending pair.
  std::optional<std::pair<size_t, size_t>> witness;
  std::string message;
};

// Exhaustive search with memoization over a key-value model. Committed ops
// must be linearized with their observed results; pending and failed ops may
// take effect at any point after invocation, or not at all. Keyless ops are
// ignored. Ops touching disjoint keys are checked independently.
LinResult check_linearizability(const History& h, size_t bound = 200);

}  // namespace nezha::harness

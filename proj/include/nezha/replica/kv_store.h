#pragma once

#include <map>
#include <set>
#include <string>

#include "nezha/common/request.h"

namespace nezha::replica {

// The replicated application: an in-memory key-value map.
class KvStore {
 public:
  Result execute(const Command& c);
  // Executes on behalf of a logged request; counts repeated keys.
  Result apply(const Request& r);

  const std::map<std::string, int64_t>& data() const { return data_; }
  uint64_t duplicate_executions() const { return duplicates_; }
  void reset();

 private:
  std::map<std::string, int64_t> data_;
  std::set<RequestKey> applied_;
  uint64_t duplicates_ = 0;
};

}  // namespace nezha::replica

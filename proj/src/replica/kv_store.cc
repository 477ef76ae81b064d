#include "nezha/replica/kv_store.h"

namespace nezha::replica {

Result KvStore::execute(const Command& c) {
  Result r;
  r.values.reserve(c.ops.size());
  for (const auto& op : c.ops) {
    switch (op.kind) {
      case OpKind::Get: {
        auto it = data_.find(op.key);
        r.values.push_back(it == data_.end() ? std::nullopt : std::optional<int64_t>(it->second));
        break;
      }
      case OpKind::Set: {
        auto it = data_.find(op.key);
        r.values.push_back(it == data_.end() ? std::nullopt : std::optional<int64_t>(it->second));
        data_[op.key] = op.value;
        break;
      }
      case OpKind::Nop:
        r.values.push_back(0);
        break;
    }
  }
  return r;
}

Result KvStore::apply(const Request& req) {
  if (!applied_.insert(req.key()).second) ++duplicates_;
  return execute(req.command);
}

void KvStore::reset() {
  data_.clear();
  applied_.clear();
}

}  // namespace nezha::replica

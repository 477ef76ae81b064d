#include "nezha/harness/history.h"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace nezha::harness {

History merge_histories(const std::vector<const History*>& per_client) {
  History out;
  for (const auto* h : per_client) out.insert(out.end(), h->begin(), h->end());
  std::sort(out.begin(), out.end(), [](const OpRecord& a, const OpRecord& b) {
    return std::pair(a.client_id, a.request_id) < std::pair(b.client_id, b.request_id);
  });
  return out;
}

namespace {

const char* status_str(OpStatus s) {
  switch (s) {
    case OpStatus::Committed:
      return "committed";
    case OpStatus::Failed:
      return "failed";
    case OpStatus::Pending:
      break;
  }
  return "pending";
}

std::string result_field(const std::optional<Result>& r) {
  if (!r) return "";
  std::string s;
  for (size_t i = 0; i < r->values.size(); ++i) {
    if (i) s += '|';
    s += r->values[i] ? std::to_string(*r->values[i]) : std::string("nil");
  }
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

void write_history_csv(std::ostream& out, const History& h) {
  out << "client_id,request_id,command,invoke_ns,response_ns,status,result,path,view,hops,attempts\n";
  for (const auto& op : h) {
    out << op.client_id << ',' << op.request_id << ',' << op.command.to_string() << ',' << op.invoke << ','
        << (op.status == OpStatus::Pending ? std::string() : std::to_string(op.response)) << ','
        << status_str(op.status) << ',' << result_field(op.result) << ','
        << (op.status != OpStatus::Committed ? "" : op.path == replica::CommitPath::Fast ? "fast" : "slow") << ','
        << op.view << ',' << op.hops << ',' << op.attempts << '\n';
  }
}

History read_history_csv(std::istream& in) {
  History h;
  std::string line;
  if (!std::getline(in, line)) return h;
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 11) throw std::runtime_error("history line " + std::to_string(lineno) + ": expected 11 fields");
    OpRecord op;
    op.client_id = static_cast<ClientId>(std::stoul(f[0]));
    op.request_id = static_cast<RequestId>(std::stoul(f[1]));
    auto cmd = parse_command(f[2]);
    if (!cmd) throw std::runtime_error("history line " + std::to_string(lineno) + ": bad command '" + f[2] + "'");
    op.command = *cmd;
    op.invoke = std::stoll(f[3]);
    if (!f[4].empty()) op.response = std::stoll(f[4]);
    op.status = f[5] == "committed" ? OpStatus::Committed : f[5] == "failed" ? OpStatus::Failed : OpStatus::Pending;
    if (op.status == OpStatus::Committed) {
      Result r;
      for (const auto& v : split(f[6], '|')) {
        r.values.push_back(v == "nil" ? std::nullopt : std::optional<int64_t>(std::stoll(v)));
      }
      op.result = r;
    }
    op.path = f[7] == "slow" ? replica::CommitPath::Slow : replica::CommitPath::Fast;
    op.view = std::stoull(f[8]);
    op.hops = static_cast<uint32_t>(std::stoul(f[9]));
    op.attempts = std::stoi(f[10]);
    h.push_back(std::move(op));
  }
  return h;
}

namespace {

constexpr Nanos kForever = std::numeric_limits<Nanos>::max();

struct LinOp {
  size_t index;  // into the caller's history
  const Command* command;
  const Result* result;  // null when the op may or may not have happened
  Nanos invoke;
  Nanos response;
};

using State = std::map<std::string, int64_t>;

std::optional<Result> step(State& s, const Command& c) {
  Result r;
  for (const auto& op : c.ops) {
    auto it = s.find(op.key);
    const std::optional<int64_t> cur = it == s.end() ? std::nullopt : std::optional<int64_t>(it->second);
    if (op.kind == OpKind::Nop) {
      r.values.push_back(0);
    } else {
      r.values.push_back(cur);
      if (op.kind == OpKind::Set) s[op.key] = op.value;
    }
  }
  return r;
}

// Wing-Gong style search: repeatedly linearize an op that no unlinearized op
// precedes in real time, backtracking on result mismatch.
class Search {
 public:
  explicit Search(std::vector<LinOp> ops) : ops_(std::move(ops)) {
    for (const auto& o : ops_) required_ += o.result != nullptr;
  }

  bool run() {
    std::vector<bool> done(ops_.size(), false);
    State s;
    return dfs(done, s, 0);
  }

 private:
  std::string memo_key(const std::vector<bool>& done, const State& s) const {
    std::string k;
    k.reserve(ops_.size() + s.size() * 16);
    for (bool b : done) k += b ? '1' : '0';
    for (const auto& [key, v] : s) {
      k += key;
      k += '=';
      k += std::to_string(v);
      k += ';';
    }
    return k;
  }

  bool dfs(std::vector<bool>& done, State& s, size_t committed_done) {
    if (committed_done == required_) return true;
    if (!seen_.insert(memo_key(done, s)).second) return false;
    Nanos horizon = kForever;
    for (size_t i = 0; i < ops_.size(); ++i) {
      if (!done[i]) horizon = std::min(horizon, ops_[i].response);
    }
    for (size_t i = 0; i < ops_.size(); ++i) {
      if (done[i] || ops_[i].invoke > horizon) continue;
      State next = s;
      const auto got = step(next, *ops_[i].command);
      if (ops_[i].result && *got != *ops_[i].result) continue;
      done[i] = true;
      if (dfs(done, next, committed_done + (ops_[i].result != nullptr))) return true;
      done[i] = false;
    }
    return false;
  }

  std::vector<LinOp> ops_;
  size_t required_ = 0;
  std::unordered_set<std::string> seen_;
};

bool linearizable(const std::vector<LinOp>& ops) { return Search(ops).run(); }

}  // namespace

LinResult check_linearizability(const History& h, size_t bound) {
  LinResult out;
  if (h.size() > bound) {
    out.verdict = LinVerdict::Refused;
    out.message = "history has " + std::to_string(h.size()) + " ops, above the bound of " + std::to_string(bound);
    return out;
  }
  for (const auto& op : h) {
    if (op.status == OpStatus::Committed && op.response <= op.invoke) {
      out.verdict = LinVerdict::Violation;
      out.message = "op " + std::to_string(op.client_id) + ":" + std::to_string(op.request_id) +
                    " responds before it is invoked";
      return out;
    }
  }

  // Group ops into components of transitively shared keys.
  std::vector<size_t> parent(h.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<size_t(size_t)> find = [&](size_t x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  std::map<std::string, size_t> owner;
  for (size_t i = 0; i < h.size(); ++i) {
    for (const auto& k : h[i].command.keys()) {
      auto [it, fresh] = owner.try_emplace(k, i);
      if (!fresh) parent[find(i)] = find(it->second);
    }
  }
  std::map<size_t, std::vector<LinOp>> groups;
  for (size_t i = 0; i < h.size(); ++i) {
    const auto& op = h[i];
    if (op.command.keys().empty()) continue;
    const bool committed = op.status == OpStatus::Committed && op.result;
    groups[find(i)].push_back(LinOp{i, &op.command, committed ? &*op.result : nullptr, op.invoke,
                                    committed ? op.response : kForever});
  }

  for (const auto& [_, ops] : groups) {
    if (linearizable(ops)) continue;
    out.verdict = LinVerdict::Violation;
    std::vector<LinOp> optional;
    std::vector<LinOp> required;
    for (const auto& o : ops) (o.result ? required : optional).push_back(o);
    // Smallest witness: a committed pair that is already unexplainable
    // together with the optional ops, falling back to a single op.
    for (size_t a = 0; a < required.size() && !out.witness; ++a) {
      auto solo = optional;
      solo.push_back(required[a]);
      if (!linearizable(solo)) {
        out.witness = {required[a].index, required[a].index};
        break;
      }
      for (size_t b = a + 1; b < required.size(); ++b) {
        auto pair = optional;
        pair.push_back(required[a]);
        pair.push_back(required[b]);
        if (!linearizable(pair)) {
          out.witness = {required[a].index, required[b].index};
          break;
        }
      }
    }
    std::ostringstream msg;
    msg << "no legal sequential order";
    if (out.witness) {
      const auto& x = h[out.witness->first];
      const auto& y = h[out.witness->second];
      msg << "; witness " << x.client_id << ":" << x.request_id << " [" << x.command.to_string() << " -> "
          << x.result->to_string() << "] and " << y.client_id << ":" << y.request_id << " ["
          << y.command.to_string() << " -> " << y.result->to_string() << "]";
    }
    out.message = msg.str();
    return out;
  }
  return out;
}

}  // namespace nezha::harness

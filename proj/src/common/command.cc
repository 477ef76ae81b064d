#include "nezha/common/command.h"

#include <algorithm>
#include <sstream>

#include "nezha/common/request.h"

namespace nezha {

bool Command::is_write() const {
  return std::any_of(ops.begin(), ops.end(), [](const Op& o) { return o.kind == OpKind::Set; });
}

std::vector<std::string> Command::keys() const {
  std::vector<std::string> out;
  for (const auto& o : ops) {
    if (o.kind != OpKind::Nop) out.push_back(o.key);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string Command::to_string() const {
  std::ostringstream s;
  for (size_t i = 0; i < ops.size(); ++i) {
    if (i) s << ';';
    const auto& o = ops[i];
    switch (o.kind) {
      case OpKind::Get: s << "get " << o.key; break;
      case OpKind::Set: s << "set " << o.key << ' ' << o.value; break;
      case OpKind::Nop: s << "nop"; break;
    }
  }
  return s.str();
}

std::string Result::to_string() const {
  std::ostringstream s;
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) s << ';';
    if (values[i]) s << *values[i];
    else s << '-';
  }
  return s.str();
}

bool conflicts(const Command& a, const Command& b) {
  const auto ka = a.keys();
  const auto kb = b.keys();
  if (ka.empty() || kb.empty()) return true;
  for (const auto& oa : a.ops) {
    if (oa.kind == OpKind::Nop) continue;
    for (const auto& ob : b.ops) {
      if (ob.kind == OpKind::Nop || oa.key != ob.key) continue;
      if (oa.kind == OpKind::Set || ob.kind == OpKind::Set) return true;
    }
  }
  return false;
}

std::optional<Command> parse_command(const std::string& text) {
  Command c;
  std::istringstream parts(text);
  std::string part;
  while (std::getline(parts, part, ';')) {
    std::istringstream in(part);
    std::string verb;
    if (!(in >> verb)) return std::nullopt;
    Op op;
    if (verb == "get") {
      op.kind = OpKind::Get;
      if (!(in >> op.key)) return std::nullopt;
    } else if (verb == "set") {
      op.kind = OpKind::Set;
      if (!(in >> op.key >> op.value)) return std::nullopt;
    } else if (verb == "nop") {
      op.kind = OpKind::Nop;
    } else {
      return std::nullopt;
    }
    std::string extra;
    if (in >> extra) return std::nullopt;
    c.ops.push_back(std::move(op));
  }
  if (c.ops.empty()) return std::nullopt;
  return c;
}

std::string DeadlineTuple::to_string() const {
  return "(" + std::to_string(deadline) + "," + std::to_string(client_id) + "," + std::to_string(request_id) + ")";
}

}  // namespace nezha

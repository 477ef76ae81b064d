#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nezha {

enum class OpKind : uint8_t { Get, Set, Nop };

struct Op {
  OpKind kind = OpKind::Nop;
  std::string key;
  int64_t value = 0;

  friend bool operator==(const Op&, const Op&) = default;
};

// A command is one or more key-value operations applied atomically. Compound
// commands touch several keys (e.g. a transfer between two keys).
struct Command {
  std::vector<Op> ops;

  bool is_write() const;
  // Sorted, de-duplicated keys. Empty for keyless (null application) commands.
  std::vector<std::string> keys() const;
  std::string to_string() const;

  static Command get(std::string key) { return Command{{Op{OpKind::Get, std::move(key), 0}}}; }
  static Command set(std::string key, int64_t v) { return Command{{Op{OpKind::Set, std::move(key), v}}}; }
  static Command nop() { return Command{{Op{}}}; }

  friend bool operator==(const Command&, const Command&) = default;
};

// One value per op: get -> current value, set -> previous value, nop -> 0.
struct Result {
  std::vector<std::optional<int64_t>> values;

  std::string to_string() const;
  friend bool operator==(const Result&, const Result&) = default;
};

// True when the two commands must be ordered relative to each other. Keyless
// commands conflict with everything; keyed commands conflict when they share
// a key and at least one of them writes it.
bool conflicts(const Command& a, const Command& b);

// Parses "get x", "set x 5", "nop", with ';' separating ops of a compound command.
std::optional<Command> parse_command(const std::string& text);

}  // namespace nezha

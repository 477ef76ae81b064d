#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "nezha/common/types.h"

namespace nezha::hashing {

struct Digest160 {
  std::array<uint8_t, 20> bytes{};

  Digest160& operator^=(const Digest160& o) {
    for (size_t i = 0; i < bytes.size(); ++i) bytes[i] ^= o.bytes[i];
    return *this;
  }
  friend Digest160 operator^(Digest160 a, const Digest160& b) { return a ^= b; }
  friend bool operator==(const Digest160&, const Digest160&) = default;
  friend auto operator<=>(const Digest160&, const Digest160&) = default;

  bool is_zero() const;
  std::string hex() const;
};

using DigestFn = std::function<Digest160(std::span<const uint8_t>)>;

Digest160 sha1(std::span<const uint8_t> data);

// Encodes the tuple as deadline (8 bytes) | client id (4) | request id (4), big-endian.
std::array<uint8_t, 16> encode_entry(Nanos deadline, ClientId client_id, RequestId request_id);

// Digests the tuple encoding. `fn` defaults to SHA-1.
Digest160 entry_digest(Nanos deadline, ClientId client_id, RequestId request_id, const DigestFn& fn = sha1);

inline Digest160 set_hash_apply(Digest160 running, const Digest160& entry) { return running ^ entry; }

// Digest of the counters, each as 8-byte big-endian.
Digest160 crash_vector_digest(std::span<const uint64_t> counters, const DigestFn& fn = sha1);

Digest160 reply_hash(const Digest160& set_hash, std::span<const uint64_t> crash_vector, const DigestFn& fn = sha1);

// Running XOR of write digests per key. Absent keys read as zero.
class KeyHashTable {
 public:
  Digest160 get(const std::string& key) const;
  void apply(const std::string& key, const Digest160& d);
  const std::map<std::string, Digest160>& entries() const { return table_; }
  void clear() { table_.clear(); }

 private:
  std::map<std::string, Digest160> table_;
};

// XOR of table[k] over `keys`, XOR the crash-vector digest.
Digest160 keyed_reply_hash(const KeyHashTable& table, std::span<const std::string> keys,
                           std::span<const uint64_t> crash_vector, const DigestFn& fn = sha1);

}  // namespace nezha::hashing

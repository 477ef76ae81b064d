#include "nezha/hashing/digest.h"

#include <openssl/evp.h>

#include <stdexcept>

namespace nezha::hashing {

namespace {
void put_be(std::vector<uint8_t>& out, uint64_t v, int width) {
  for (int i = width - 1; i >= 0; --i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}
}  // namespace

bool Digest160::is_zero() const {
  for (auto b : bytes) {
    if (b) return false;
  }
  return true;
}

std::string Digest160::hex() const {
  static const char* kHex = "0123456789abcdef";
  std::string s;
  s.reserve(40);
  for (auto b : bytes) {
    s.push_back(kHex[b >> 4]);
    s.push_back(kHex[b & 15]);
  }
  return s;
}

Digest160 sha1(std::span<const uint8_t> data) {
  Digest160 d;
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), d.bytes.data(), &len, EVP_sha1(), nullptr) != 1 || len != 20) {
    throw std::runtime_error("SHA-1 digest failed");
  }
  return d;
}

std::array<uint8_t, 16> encode_entry(Nanos deadline, ClientId client_id, RequestId request_id) {
  std::vector<uint8_t> v;
  v.reserve(16);
  put_be(v, static_cast<uint64_t>(deadline), 8);
  put_be(v, client_id, 4);
  put_be(v, request_id, 4);
  std::array<uint8_t, 16> out{};
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

Digest160 entry_digest(Nanos deadline, ClientId client_id, RequestId request_id, const DigestFn& fn) {
  const auto enc = encode_entry(deadline, client_id, request_id);
  return fn(enc);
}

Digest160 crash_vector_digest(std::span<const uint64_t> counters, const DigestFn& fn) {
  std::vector<uint8_t> v;
  v.reserve(counters.size() * 8);
  for (uint64_t c : counters) put_be(v, c, 8);
  return fn(v);
}

Digest160 reply_hash(const Digest160& set_hash, std::span<const uint64_t> crash_vector, const DigestFn& fn) {
  return set_hash ^ crash_vector_digest(crash_vector, fn);
}

Digest160 KeyHashTable::get(const std::string& key) const {
  auto it = table_.find(key);
  return it == table_.end() ? Digest160{} : it->second;
}

void KeyHashTable::apply(const std::string& key, const Digest160& d) {
  auto& slot = table_[key];
  slot ^= d;
  if (slot.is_zero()) table_.erase(key);
}

Digest160 keyed_reply_hash(const KeyHashTable& table, std::span<const std::string> keys,
                           std::span<const uint64_t> crash_vector, const DigestFn& fn) {
  Digest160 h;
  for (const auto& k : keys) h ^= table.get(k);
  return h ^ crash_vector_digest(crash_vector, fn);
}

}  // namespace nezha::hashing

#include <gtest/gtest.h>

#include <random>

#include "../oracles.h"
#include "nezha/hashing/digest.h"

using namespace nezha;
using namespace nezha::hashing;

TEST(Sha1, KnownVectors) {
  const std::string abc = "abc";
  EXPECT_EQ(sha1({reinterpret_cast<const uint8_t*>(abc.data()), abc.size()}).hex(),
            "a9993e364706816aba3e25717850c26c9cd0d89d");
  EXPECT_EQ(sha1({}).hex(), "da39a3ee5e6b4b0d3255bfef95601890afd80709");
}

TEST(EncodeEntry, FrozenLayout) {
  const auto e = encode_entry(0x0102030405060708LL, 0x0a0b0c0d, 0x11223344);
  const std::array<uint8_t, 16> want{1, 2, 3, 4, 5, 6, 7, 8, 0x0a, 0x0b, 0x0c, 0x0d, 0x11, 0x22, 0x33, 0x44};
  EXPECT_EQ(e, want);
}

TEST(EntryDigest, IsShaOfEncoding) {
  const auto enc = encode_entry(42, 7, 9);
  EXPECT_EQ(entry_digest(42, 7, 9), sha1(enc));
  EXPECT_NE(entry_digest(42, 7, 9), entry_digest(42, 7, 10));
}

TEST(SetHash, OrderIndependentAndSelfInverse) {
  std::mt19937_64 g(1);
  std::vector<DeadlineTuple> v;
  for (uint32_t i = 0; i < 30; ++i) v.push_back({std::uniform_int_distribution<Nanos>(0, 1 << 30)(g), i % 4, i});
  const auto whole = oracle::scratch_hash(v);
  std::shuffle(v.begin(), v.end(), g);
  Digest160 running;
  for (const auto& t : v) running = set_hash_apply(running, entry_digest(t.deadline, t.client_id, t.request_id));
  EXPECT_EQ(running, whole);
  for (const auto& t : v) running = set_hash_apply(running, entry_digest(t.deadline, t.client_id, t.request_id));
  EXPECT_TRUE(running.is_zero());
}

TEST(ReplyHash, CrashVectorChangesHash) {
  const auto s = entry_digest(1, 1, 1);
  const std::vector<uint64_t> a{0, 0, 0}, b{0, 1, 0};
  EXPECT_NE(reply_hash(s, a), reply_hash(s, b));
  EXPECT_EQ(reply_hash(s, a), s ^ crash_vector_digest(a));
}

TEST(CrashVectorDigest, BigEndianCounters) {
  const std::vector<uint64_t> cv{1, 0x0203};
  const std::array<uint8_t, 16> enc{0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 2, 3};
  EXPECT_EQ(crash_vector_digest(cv), sha1(enc));
}

TEST(KeyHashTable, KeyedHashCoversOnlyListedKeys) {
  KeyHashTable t;
  const auto dx = entry_digest(1, 1, 1), dy = entry_digest(2, 1, 2);
  t.apply("x", dx);
  t.apply("y", dy);
  const std::vector<uint64_t> cv{0, 0, 0};
  const std::vector<std::string> x{"x"}, xy{"x", "y"}, z{"z"};
  EXPECT_EQ(keyed_reply_hash(t, x, cv), dx ^ crash_vector_digest(cv));
  EXPECT_EQ(keyed_reply_hash(t, xy, cv), dx ^ dy ^ crash_vector_digest(cv));
  EXPECT_EQ(keyed_reply_hash(t, z, cv), crash_vector_digest(cv));
  t.apply("x", dx);
  EXPECT_TRUE(t.get("x").is_zero());
}

TEST(SetHash, PluggableDigestFunction) {
  const DigestFn fake = [](std::span<const uint8_t> d) {
    Digest160 out;
    out.bytes[0] = d.empty() ? 0 : d.back();
    return out;
  };
  EXPECT_EQ(entry_digest(0, 0, 0x55, fake).bytes[0], 0x55);
}

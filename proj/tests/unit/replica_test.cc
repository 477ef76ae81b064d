#include <gtest/gtest.h>

#include "nezha/harness/cluster.h"
#include "nezha/harness/scenarios.h"
#include "nezha/replica/kv_store.h"

using namespace nezha;
using namespace nezha::harness;

TEST(KvStore, SetReturnsPreviousGetReturnsCurrent) {
  replica::KvStore kv;
  EXPECT_EQ(kv.execute(Command::set("x", 3)), (Result{{std::nullopt}}));
  EXPECT_EQ(kv.execute(Command::set("x", 4)), (Result{{int64_t{3}}}));
  EXPECT_EQ(kv.execute(Command::get("x")), (Result{{int64_t{4}}}));
  EXPECT_EQ(kv.execute(Command::nop()), (Result{{int64_t{0}}}));
}

TEST(KvStore, CountsDuplicateApplication) {
  replica::KvStore kv;
  Request r;
  r.client_id = 1;
  r.request_id = 1;
  r.command = Command::set("x", 1);
  kv.apply(r);
  kv.apply(r);
  EXPECT_EQ(kv.duplicate_executions(), 1u);
}

TEST(Conflicts, ReadsCommuteWritesDoNot) {
  EXPECT_FALSE(conflicts(Command::get("x"), Command::get("x")));
  EXPECT_TRUE(conflicts(Command::get("x"), Command::set("x", 1)));
  EXPECT_FALSE(conflicts(Command::set("x", 1), Command::set("y", 1)));
  EXPECT_TRUE(conflicts(Command::nop(), Command::get("y")));
}

TEST(ParseCommand, RoundTrip) {
  for (const std::string s : {"get x", "set y 5", "nop"}) {
    const auto c = parse_command(s);
    ASSERT_TRUE(c);
    EXPECT_EQ(parse_command(c->to_string()), c);
  }
  EXPECT_FALSE(parse_command("frobnicate"));
}

TEST(Replica, LeaderCrashTriggersViewChangeAndRecovery) {
  auto c = perfect_network(1, false, 200);
  c.workload.mode = proxy::LoopMode::Closed;
  c.protocol.heartbeat = millis(1);
  c.protocol.suspicion_missed = 3;
  c.protocol.client_timeout = millis(1);
  c.crashes.push_back({"leader", millis(5), millis(15)});
  Cluster cl(c);
  cl.run();
  const auto r = cl.finish();
  EXPECT_TRUE(r.ok());
  EXPECT_GE(r.metrics.view_changes, 1u);
  EXPECT_EQ(r.metrics.committed, 200u);
  ASSERT_TRUE(cl.current_leader());
  EXPECT_NE(*cl.current_leader(), 0u);
  // The old leader rejoined as a follower with the same synced log.
  EXPECT_EQ(cl.replica(0).status(), replica::Status::Normal);
  EXPECT_FALSE(cl.replica(0).is_leader());
  EXPECT_GE(cl.replica(0).crash_vector()[0], 1u);
}

TEST(Replica, FollowerRejoinCatchesUp) {
  auto c = perfect_network(2, false, 300);
  c.protocol.heartbeat = millis(1);
  c.crashes.push_back({"r3", millis(2), millis(6)});
  Cluster cl(c);
  cl.run();
  const auto r = cl.finish();
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.metrics.committed, 300u);
  EXPECT_EQ(cl.replica(3).status(), replica::Status::Normal);
  EXPECT_GE(cl.replica(3).stats().state_transfers + cl.replica(0).stats().state_transfers, 1u);
}

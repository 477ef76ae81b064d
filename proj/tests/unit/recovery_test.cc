#include <gtest/gtest.h>

#include <random>

#include "../oracles.h"
#include "nezha/recovery/crash_vector.h"
#include "nezha/recovery/merge_log.h"

using namespace nezha;
using namespace nezha::recovery;

TEST(CrashVector, AggregateIsElementwiseMax) {
  std::mt19937_64 g(1);
  for (int t = 0; t < 200; ++t) {
    std::vector<CrashVector> vs(std::uniform_int_distribution<size_t>(1, 5)(g), CrashVector(5));
    for (auto& v : vs)
      for (auto& x : v) x = std::uniform_int_distribution<uint64_t>(0, 9)(g);
    const auto got = aggregate_cv(vs);
    for (size_t i = 0; i < 5; ++i) {
      uint64_t m = 0;
      for (const auto& v : vs) m = std::max(m, v[i]);
      EXPECT_EQ(got[i], m);
    }
  }
}

TEST(CrashVector, AggregateRejectsBadInput) {
  EXPECT_THROW(aggregate_cv(std::span<const CrashVector>{}), std::invalid_argument);
  EXPECT_THROW(aggregate_cv(CrashVector{1, 2}, CrashVector{1, 2, 3}), std::invalid_argument);
}

TEST(CrashVector, StrayDetection) {
  CrashVector local{0, 2, 0};
  EXPECT_EQ(check_crash_vector(1, {0, 1, 0}, local), CvCheck::Stray);
  EXPECT_EQ(local, (CrashVector{0, 2, 0}));
  EXPECT_EQ(check_crash_vector(1, {3, 2, 0}, local), CvCheck::Accept);
  EXPECT_EQ(local, (CrashVector{3, 2, 0}));
  EXPECT_TRUE(is_stray(0, {2, 2, 0}, local));
}

TEST(Quorums, Sizes) {
  EXPECT_EQ(fast_quorum(1), 3);
  EXPECT_EQ(fast_quorum(2), 4);
  EXPECT_EQ(fast_quorum(3), 6);
  EXPECT_EQ(merge_threshold(1), 2);
  EXPECT_EQ(merge_threshold(2), 2);
  EXPECT_EQ(merge_threshold(3), 3);
}

LogEntry entry(Nanos d, ClientId c, RequestId r, const std::string& key = "x") {
  LogEntry e;
  e.request.deadline = d;
  e.request.client_id = c;
  e.request.request_id = r;
  e.request.command = Command::set(key, 1);
  return e;
}

std::vector<DeadlineTuple> tuples(const std::vector<LogEntry>& l) {
  std::vector<DeadlineTuple> out;
  for (const auto& e : l) out.push_back(e.tuple());
  return out;
}

TEST(MergeLog, HigherLastNormalViewWins) {
  std::vector<ViewChangeLog> m{{0, 3, 1, {entry(1, 1, 1)}, 1}, {1, 3, 2, {entry(2, 1, 2)}, 1}};
  EXPECT_EQ(tuples(merge_log(m, 1)), (std::vector<DeadlineTuple>{{2, 1, 2}}));
}

TEST(MergeLog, UnsyncedEntryNeedsThreshold) {
  // f = 2: an unsynced entry needs 2 of the kept logs.
  std::vector<ViewChangeLog> m{{0, 1, 0, {entry(1, 1, 1), entry(5, 2, 1)}, 1},
                               {1, 1, 0, {entry(1, 1, 1), entry(7, 3, 1)}, 1},
                               {2, 1, 0, {entry(5, 2, 1)}, 0}};
  EXPECT_EQ(tuples(merge_log(m, 2)), (std::vector<DeadlineTuple>{{1, 1, 1}, {5, 2, 1}}));
}

TEST(MergeLog, EntriesBeforeSyncedPrefixAreDropped) {
  std::vector<ViewChangeLog> m{{0, 1, 0, {entry(10, 1, 1)}, 1}, {1, 1, 0, {entry(5, 2, 1), entry(10, 1, 1)}, 0},
                               {2, 1, 0, {entry(5, 2, 1)}, 0}};
  EXPECT_EQ(tuples(merge_log(m, 1)), (std::vector<DeadlineTuple>{{10, 1, 1}}));
}

TEST(MergeLog, CommutativityAdmitsEarlierNonConflictingEntry) {
  std::vector<ViewChangeLog> m{{0, 1, 0, {entry(10, 1, 1, "x")}, 1}, {1, 1, 0, {entry(5, 2, 1, "y")}, 0},
                               {2, 1, 0, {entry(5, 2, 1, "y")}, 0}};
  EXPECT_EQ(tuples(merge_log(m, 1, true)), (std::vector<DeadlineTuple>{{5, 2, 1}, {10, 1, 1}}));
  EXPECT_EQ(tuples(merge_log(m, 1, false)), (std::vector<DeadlineTuple>{{10, 1, 1}}));
}

TEST(MergeLog, EmptyInputThrows) {
  EXPECT_THROW(merge_log(std::span<const ViewChangeLog>{}, 1), std::invalid_argument);
}

TEST(MergeLog, RandomInputsMatchRuleEvaluator) {
  std::mt19937_64 g(5);
  for (int t = 0; t < 3000; ++t) {
    const int f = std::uniform_int_distribution<int>(1, 3)(g);
    std::vector<ViewChangeLog> vcs;
    std::vector<oracle::MergeInput> in;
    for (int i = 0; i <= f; ++i) {
      std::vector<LogEntry> log;
      for (uint32_t r = 1; r <= 6; ++r)
        if (g() % 2) log.push_back(entry(r * 10, r % 3, r));
      const size_t sp = std::uniform_int_distribution<size_t>(0, log.size())(g);
      const ViewId lnv = g() % 2;
      vcs.push_back({static_cast<ReplicaId>(i), 5, lnv, log, sp});
      in.push_back({lnv, tuples(log), sp});
    }
    EXPECT_EQ(tuples(merge_log(vcs, f)), oracle::brute_merge(in, f));
  }
}

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "../oracles.h"
#include "nezha/dom/buffers.h"
#include "nezha/dom/owd.h"
#include "nezha/dom/reorder.h"

using namespace nezha;
using namespace nezha::dom;

TEST(Percentile, MatchesSortOracle) {
  std::mt19937_64 g(1);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Nanos> v(std::uniform_int_distribution<size_t>(1, 40)(g));
    for (auto& x : v) x = std::uniform_int_distribution<Nanos>(-50, 500)(g);
    const double p = std::uniform_real_distribution<double>(0.1, 100)(g);
    auto sorted = v;
    std::sort(sorted.begin(), sorted.end());
    const auto rank = static_cast<size_t>(std::ceil(p / 100 * static_cast<double>(v.size())));
    EXPECT_EQ(percentile_nearest_rank(v, p), sorted[std::max<size_t>(rank, 1) - 1]);
  }
}

TEST(Owd, EstimateAddsBetaTimesSigmas) {
  DomParams p;
  p.percentile = 50;
  p.beta = 3;
  p.clamp = micros(200);
  OwdWindow w(p);
  for (Nanos s : {40, 50, 60}) w.add(micros(s));
  EXPECT_EQ(estimate_owd(w, micros(1), micros(2)), micros(50) + 3 * micros(3));
}

TEST(Owd, EstimateOutsideRangeClampsToW) {
  DomParams p;
  p.clamp = micros(200);
  OwdWindow w(p);
  EXPECT_EQ(estimate_owd(w, 0, 0), micros(200));  // no samples
  w.add(-micros(5));
  EXPECT_EQ(estimate_owd(w, 0, 0), micros(200));  // negative
  w.clear();
  w.add(micros(900));
  EXPECT_EQ(estimate_owd(w, 0, 0), micros(200));  // above W
}

TEST(Owd, WindowKeepsMostRecentSamples) {
  DomParams p;
  p.window = 3;
  OwdWindow w(p);
  for (Nanos s = 1; s <= 10; ++s) w.add(s);
  EXPECT_EQ(std::vector<Nanos>(w.samples().begin(), w.samples().end()), (std::vector<Nanos>{8, 9, 10}));
}

TEST(Owd, DeadlineUsesLargestEstimate) {
  const std::vector<Nanos> est{10, 40, 20};
  EXPECT_EQ(make_deadline(1000, est), 1040);
  EXPECT_THROW(make_deadline(0, std::span<const Nanos>{}), std::invalid_argument);
}

TEST(Lis, MatchesQuadraticOracleOnRandomSequences) {
  std::mt19937_64 g(2);
  for (int t = 0; t < 2000; ++t) {
    std::vector<int64_t> s(std::uniform_int_distribution<size_t>(0, 60)(g));
    for (auto& x : s) x = std::uniform_int_distribution<int64_t>(0, 20)(g);
    EXPECT_EQ(lis_length(s), oracle::lis_quadratic(s));
  }
}

TEST(ReorderScore, IdenticalOrderScoresZero) {
  const std::vector<uint64_t> a{5, 1, 9, 3};
  EXPECT_DOUBLE_EQ(reordering_score(a, a), 0.0);
}

TEST(ReorderScore, ReversedOrder) {
  const std::vector<uint64_t> ref{1, 2, 3, 4};
  const std::vector<uint64_t> obs{4, 3, 2, 1};
  EXPECT_DOUBLE_EQ(reordering_score(ref, obs), 75.0);  // LIS 1 of 4
}

Request req(Nanos deadline, ClientId c, RequestId r, Command cmd = Command::set("x", 1)) {
  Request q;
  q.deadline = deadline;
  q.client_id = c;
  q.request_id = r;
  q.command = std::move(cmd);
  return q;
}

TEST(EarlyBuffer, ReleasesInDeadlineOrderOnlyWhenDue) {
  EarlyBuffer early;
  ReleaseTracker tr;
  std::mt19937_64 g(3);
  std::vector<Request> in;
  for (RequestId i = 1; i <= 50; ++i) in.push_back(req(std::uniform_int_distribution<Nanos>(0, 1000)(g), 1 + i % 3, i));
  for (const auto& r : in) ASSERT_TRUE(early.push(r));
  EXPECT_FALSE(early.push(in[0]));
  std::vector<DeadlineTuple> out;
  for (Nanos clock = 0; clock <= 1000; clock += 37) {
    for (const auto& r : release_ready(early, tr, clock)) {
      EXPECT_LE(r.deadline, clock);
      out.push_back(r.tuple());
    }
  }
  for (const auto& r : release_ready(early, tr, 2000)) out.push_back(r.tuple());
  auto sorted = out;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(out, sorted);
  EXPECT_EQ(out.size(), in.size());
}

TEST(Classify, LateWhenNotAboveLastRelease) {
  ReleaseTracker tr;
  tr.note_released(req(100, 1, 1));
  EXPECT_EQ(classify(req(50, 2, 1), tr, false), Route::Late);
  EXPECT_EQ(classify(req(150, 2, 1), tr, false), Route::Early);
  EXPECT_EQ(classify(req(100, 0, 9), tr, false), Route::Late);  // tuple order breaks the tie
}

TEST(Classify, CommutativityOnlyComparesConflictingKeys) {
  ReleaseTracker tr;
  tr.note_released(req(100, 1, 1, Command::set("x", 1)));
  EXPECT_EQ(classify(req(50, 2, 1, Command::set("y", 1)), tr, true), Route::Early);
  EXPECT_EQ(classify(req(50, 2, 1, Command::get("x")), tr, true), Route::Late);
  EXPECT_EQ(classify(req(50, 2, 1, Command::set("y", 1)), tr, false), Route::Late);
}

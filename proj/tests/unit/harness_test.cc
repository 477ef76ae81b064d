#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "../oracles.h"
#include "nezha/harness/cluster.h"
#include "nezha/harness/config.h"
#include "nezha/harness/history.h"
#include "nezha/harness/scenarios.h"
#include "nezha/harness/workload.h"

using namespace nezha;
using namespace nezha::harness;

// ---------------------------------------------------------------- config

std::string config_error_path(const std::string& yaml) {
  try {
    parse_config(yaml);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "";
}

TEST(Config, DefaultsParse) {
  const auto c = parse_config("");
  EXPECT_EQ(c.f, 1);
  EXPECT_EQ(c.replicas(), 3);
}

TEST(Config, ErrorsCarryFieldPath) {
  EXPECT_EQ(config_error_path("replicas_f: 0"), "replicas_f");
  EXPECT_EQ(config_error_path("dom: {percentile: 150}"), "dom.percentile");
  EXPECT_EQ(config_error_path("links: {client_proxy: {drop: 2}}"), "links.client_proxy.drop");
  EXPECT_EQ(config_error_path("links: {default: {jitter: {kind: weird}}}"), "links.default.jitter.kind");
  EXPECT_EQ(config_error_path("bogus: 1"), "bogus");
  EXPECT_EQ(config_error_path("faults: {crashes: [{node: r9, at_ms: 1}]}"), "faults.crashes[0].node");
  EXPECT_EQ(config_error_path("faults: {crashes: [{node: c0, at_ms: 1}]}"), "faults.crashes[0].node");
}

TEST(Config, FullExampleRoundTrips) {
  const auto c = parse_config(R"(
seed: 9
replicas_f: 2
proxy_mode: true
proxies: 2
clients: 3
commutativity: true
dom: {percentile: 75, beta: 2, window: 100, clamp_us: 300}
links:
  default: {base_us: 40, jitter: {kind: lognormal, median_us: 20, sigma: 0.5}, drop: 0.01}
clocks:
  r0: {kind: normal, mean_us: -300, stddev_us: 30}
workload: {requests_per_client: 7, read_ratio: 0.25, key_space: 4}
faults:
  crashes: [{node: leader, at_ms: 5, rejoin_ms: 9}]
protocol: {bounded_degradation: true, threshold_us: 40}
)");
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.replicas(), 5);
  EXPECT_TRUE(c.proxy_mode);
  EXPECT_DOUBLE_EQ(c.dom.percentile, 75);
  EXPECT_EQ(c.dom.clamp, micros(300));
  EXPECT_EQ(c.proxy_replica.base_delay, micros(40));
  ASSERT_EQ(c.crashes.size(), 1u);
  EXPECT_EQ(c.crashes[0].node, "leader");
  EXPECT_EQ(c.crashes[0].rejoin_at, millis(9));
  EXPECT_EQ(c.protocol.degradation_threshold, micros(40));
  const auto& r0 = std::get<sim::offset::Normal>(c.clocks.at("r0").offset);
  EXPECT_DOUBLE_EQ(r0.mean, -300'000);
}

TEST(CrashSchedule, Parses) {
  const auto ev = parse_crash_schedule("kill r1 at 20ms; rejoin at 40ms; kill leader at 1s");
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_EQ(ev[0].node, "r1");
  EXPECT_EQ(ev[0].at, millis(20));
  EXPECT_EQ(ev[0].rejoin_at, millis(40));
  EXPECT_EQ(ev[1].node, "leader");
  EXPECT_EQ(ev[1].at, kNanosPerSecond);
  EXPECT_FALSE(ev[1].rejoin_at);
  EXPECT_THROW(parse_crash_schedule("rejoin at 5ms"), ConfigError);
  EXPECT_THROW(parse_crash_schedule("kill r1 at soon"), ConfigError);
}

TEST(Skew, Parses) {
  const auto m = parse_skew("r0:normal:-300us:30us; r1:constant:5ms");
  const auto& n = std::get<sim::offset::Normal>(m.at("r0").offset);
  EXPECT_DOUBLE_EQ(n.mean, -300'000);
  EXPECT_DOUBLE_EQ(n.stddev, 30'000);
  EXPECT_EQ(std::get<sim::offset::Constant>(m.at("r1").offset).value, millis(5));
  EXPECT_THROW(parse_skew("r0:banana"), ConfigError);
}

TEST(Duration, Units) {
  EXPECT_EQ(parse_duration("15ns"), 15);
  EXPECT_EQ(parse_duration("2.5us"), 2500);
  EXPECT_EQ(parse_duration("3ms"), millis(3));
  EXPECT_EQ(parse_duration("1s"), kNanosPerSecond);
  EXPECT_THROW(parse_duration("3 parsecs"), ConfigError);
}

// ---------------------------------------------------------------- workload

TEST(Zipf, MatchesInverseCdfOracle) {
  const uint32_t n = 100;
  const int samples = 1'000'000;
  for (double s : {0.0, 0.5, 0.99}) {
    ZipfSampler z(n, s);
    oracle::InverseCdfZipf ref(n, s);
    auto g1 = sim::make_stream(1, "zipf");
    std::mt19937_64 g2(2);
    std::vector<double> p(n), q(n);
    for (int i = 0; i < samples; ++i) {
      p[z(g1)] += 1.0 / samples;
      q[ref(g2)] += 1.0 / samples;
    }
    EXPECT_LT(oracle::total_variation(p, q), 0.01) << "s=" << s;
  }
}

TEST(Workload, ValuesAreUniqueAndReadsFollowRatio) {
  WorkloadConfig w;
  w.read_ratio = 0.3;
  w.key_space = 10;
  CommandGenerator gen(w, 4, sim::make_stream(1, "w"));
  std::set<int64_t> written;
  int reads = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const auto c = gen.next();
    ASSERT_EQ(c.ops.size(), 1u);
    if (c.ops[0].kind == OpKind::Get) {
      ++reads;
    } else {
      EXPECT_TRUE(written.insert(c.ops[0].value).second);
    }
  }
  EXPECT_NEAR(reads, 0.3 * n, 5 * std::sqrt(n * 0.21));
}

TEST(Workload, NullAppIsKeyless) {
  WorkloadConfig w;
  w.app = App::Null;
  CommandGenerator gen(w, 0, sim::make_stream(1, "w"));
  EXPECT_TRUE(gen.next().keys().empty());
}

// ---------------------------------------------------------------- linearizability

OpRecord op(ClientId c, RequestId r, Command cmd, Nanos inv, Nanos resp, std::optional<int64_t> res,
            OpStatus st = OpStatus::Committed) {
  OpRecord o;
  o.client_id = c;
  o.request_id = r;
  o.command = std::move(cmd);
  o.invoke = inv;
  o.response = resp;
  o.status = st;
  if (st == OpStatus::Committed) o.result = Result{{res}};
  return o;
}

TEST(Linearizability, SequentialSingleClientIsOk) {
  History h{op(0, 1, Command::set("x", 1), 0, 10, std::nullopt), op(0, 2, Command::get("x"), 20, 30, 1),
            op(0, 3, Command::set("x", 2), 40, 50, 1), op(0, 4, Command::get("x"), 60, 70, 2)};
  EXPECT_EQ(check_linearizability(h).verdict, LinVerdict::Ok);
}

TEST(Linearizability, StaleReadIsViolation) {
  History h{op(0, 1, Command::set("x", 1), 0, 10, std::nullopt), op(1, 1, Command::get("x"), 20, 30, std::nullopt)};
  const auto r = check_linearizability(h);
  EXPECT_EQ(r.verdict, LinVerdict::Violation);
  ASSERT_TRUE(r.witness);
  EXPECT_EQ(*r.witness, (std::pair<size_t, size_t>{0, 1}));
}

TEST(Linearizability, ConcurrentOpsMayReorder) {
  History h{op(0, 1, Command::set("x", 1), 0, 100, std::nullopt), op(1, 1, Command::get("x"), 10, 20, std::nullopt),
            op(2, 1, Command::get("x"), 30, 40, 1)};
  EXPECT_EQ(check_linearizability(h).verdict, LinVerdict::Ok);
}

TEST(Linearizability, PendingWriteMayTakeEffect) {
  History h{op(0, 1, Command::set("x", 5), 0, 0, std::nullopt, OpStatus::Failed),
            op(1, 1, Command::get("x"), 100, 110, 5)};
  EXPECT_EQ(check_linearizability(h).verdict, LinVerdict::Ok);
}

TEST(Linearizability, OversizeHistoryRefused) {
  History h;
  for (RequestId i = 1; i <= 201; ++i) h.push_back(op(0, i, Command::get("x"), i * 10, i * 10 + 1, std::nullopt));
  EXPECT_EQ(check_linearizability(h, 200).verdict, LinVerdict::Refused);
}

TEST(History, CsvRoundTrip) {
  History h{op(0, 1, Command::set("x", 1), 0, 10, std::nullopt), op(3, 2, Command::get("y"), 5, 9, 42),
            op(1, 1, Command::get("x"), 7, 0, std::nullopt, OpStatus::Failed)};
  std::stringstream s;
  write_history_csv(s, h);
  const auto back = read_history_csv(s);
  ASSERT_EQ(back.size(), h.size());
  for (size_t i = 0; i < h.size(); ++i) {
    EXPECT_EQ(back[i].client_id, h[i].client_id);
    EXPECT_EQ(back[i].command, h[i].command);
    EXPECT_EQ(back[i].result, h[i].result);
    EXPECT_EQ(back[i].status, h[i].status);
  }
}

// ---------------------------------------------------------------- cluster runs

TEST(Cluster, PerfectNetworkHasFcrOne) {
  const auto r = run_scenario(perfect_network(1, false, 100));
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.metrics.committed, 100u);
  EXPECT_DOUBLE_EQ(r.metrics.fcr, 1.0);
  EXPECT_EQ(r.metrics.linearizability, "ok");
}

TEST(Cluster, DropEverythingCommitsNothing) {
  auto c = perfect_network(1, false, 5);
  sim::LinkModel dead;
  dead.drop_prob = 1;
  c.client_proxy = c.proxy_replica = c.replica_replica = dead;
  c.protocol.retry_limit = 2;
  const auto r = run_scenario(c);
  EXPECT_EQ(r.metrics.committed, 0u);
  EXPECT_EQ(r.metrics.failed, r.metrics.submitted);
  EXPECT_GT(r.metrics.submitted, 0u);
}

TEST(Cluster, SameSeedSameOutputs) {
  auto c = random_safety_scenario(21);
  c.run.trace = true;
  auto dump = [&] {
    const auto r = run_scenario(c);
    std::stringstream s;
    write_metrics_csv(s, r);
    write_history_csv(s, r.history);
    write_trace(s, r.trace);
    return s.str();
  };
  EXPECT_EQ(dump(), dump());
}

TEST(Cluster, PathLabelsMatchMetrics) {
  const auto r = run_scenario(random_safety_scenario(8));
  uint64_t fast = 0, slow = 0;
  for (const auto& o : r.history) {
    if (o.status != OpStatus::Committed) continue;
    (o.path == replica::CommitPath::Fast ? fast : slow) += 1;
  }
  EXPECT_EQ(fast, r.metrics.fast);
  EXPECT_EQ(slow, r.metrics.slow);
}

TEST(Cluster, StraySchedulePreventsCommitOnlyWithCrashVector) {
  const auto on = run_stray_schedule(1, true);
  EXPECT_EQ(on.commits, 0u);
  EXPECT_TRUE(on.result.ok());
  const auto off = run_stray_schedule(1, false);
  EXPECT_EQ(off.commits, 1u);
  EXPECT_FALSE(off.result.ok());
}

TEST(Cluster, CheckpointRecoveryStaysSafe) {
  for (uint64_t seed = 1; seed <= 30; ++seed) {
    auto c = random_safety_scenario(seed);
    c.protocol.checkpoint_recovery = true;
    const auto r = run_scenario(c);
    EXPECT_TRUE(r.ok()) << "seed " << seed << ": " << r.violations.front().detail;
  }
}

TEST(OrderOracle, FlagsConflictingInversion) {
  auto rq = [](Nanos d, ClientId c, const std::string& key) {
    Request r;
    r.deadline = d;
    r.client_id = c;
    r.request_id = 1;
    r.command = Command::set(key, 1);
    return r;
  };
  EXPECT_FALSE(first_order_violation({rq(1, 0, "x"), rq(2, 1, "x")}, false));
  EXPECT_EQ(first_order_violation({rq(2, 0, "x"), rq(1, 1, "x")}, false), 1u);
  EXPECT_FALSE(first_order_violation({rq(2, 0, "x"), rq(1, 1, "y")}, true));
}

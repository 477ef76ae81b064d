#include "nezha/harness/scenarios.h"

#include <cmath>
#include <random>

#include "nezha/dom/owd.h"

namespace nezha::harness {

ScenarioConfig perfect_network(int f, bool proxy_mode, uint64_t requests, uint64_t seed) {
  ScenarioConfig c;
  c.seed = seed;
  c.f = f;
  c.proxy_mode = proxy_mode;
  c.proxies = 1;
  c.clients = 1;
  sim::LinkModel fixed;
  fixed.base_delay = micros(50);
  c.client_proxy = c.proxy_replica = c.replica_replica = fixed;
  c.workload.requests_per_client = requests;
  c.workload.key_space = 100;
  c.run.max_time = millis(60000);
  c.validate();
  return c;
}

ScenarioConfig forced_slow_path(int f, bool proxy_mode, uint64_t requests, uint64_t seed) {
  ScenarioConfig c = perfect_network(f, proxy_mode, requests, seed);
  sim::ClockModel behind;
  behind.offset = sim::offset::Constant{-millis(5)};
  for (int r = 1; r < c.replicas(); ++r) c.clocks["r" + std::to_string(r)] = behind;
  c.validate();
  return c;
}

ScenarioConfig random_safety_scenario(uint64_t seed) {
  sim::Engine rng = sim::make_stream(seed, "safety-suite");
  auto uni = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
  auto pick = [&](int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); };
  auto coin = [&](double p) { return uni(0, 1) < p; };

  ScenarioConfig c;
  c.seed = seed;
  c.f = pick(1, 2);
  c.proxy_mode = coin(0.5);
  c.proxies = pick(1, 2);
  c.commutativity = coin(0.5);
  c.clients = pick(2, 4);
  c.workload.requests_per_client = static_cast<uint64_t>(pick(15, 150 / c.clients));
  c.workload.read_ratio = uni(0.2, 0.8);
  const double skews[] = {0.0, 0.5, 0.99};
  c.workload.zipf_s = skews[pick(0, 2)];
  c.workload.key_space = static_cast<uint32_t>(pick(2, 8));

  sim::LinkModel link;
  link.base_delay = micros(uni(30, 80));
  link.jitter = sim::jitter::LogNormal{std::log(uni(10, 60) * kNanosPerMicro), uni(0.3, 1.2)};
  link.drop_prob = uni(0, 0.2);
  link.dup_prob = uni(0, 0.05);
  c.client_proxy = c.proxy_replica = c.replica_replica = link;

  // Offsets drawn from the bad-synchronization families: N(+-10us, 1us) and
  // N(+-300us, 30us), with well-synchronized nodes most common.
  auto clock = [&] {
    sim::ClockModel m;
    m.sigma_send = m.sigma_recv = micros(10);
    const int k = pick(0, 9);
    if (k < 5) {
      m.offset = sim::offset::Normal{0, 1.0 * kNanosPerMicro};
    } else if (k < 8) {
      m.offset = sim::offset::Normal{(k == 5 ? -10.0 : 10.0) * kNanosPerMicro, 1.0 * kNanosPerMicro};
    } else {
      m.offset = sim::offset::Normal{(k == 8 ? -300.0 : 300.0) * kNanosPerMicro, 30.0 * kNanosPerMicro};
    }
    return m;
  };
  for (int r = 0; r < c.replicas(); ++r) c.clocks["r" + std::to_string(r)] = clock();
  for (int p = 0; c.proxy_mode && p < c.proxies; ++p) c.clocks["p" + std::to_string(p)] = clock();
  for (int i = 0; i < c.clients; ++i) c.clocks["c" + std::to_string(i)] = clock();

  const int follower_bounces = pick(0, c.f);
  for (int i = 0; i < follower_bounces; ++i) {
    const Nanos at = millis(uni(1, 30));
    c.crashes.push_back(CrashEvent{"r" + std::to_string(pick(1, c.replicas() - 1)), at, at + millis(uni(2, 15))});
  }
  const Nanos kill = millis(uni(2, 40));
  c.crashes.push_back(CrashEvent{"leader", kill, kill + millis(uni(5, 20))});
  if (coin(0.2)) {
    const Nanos from = millis(uni(1, 30));
    c.partitions.push_back(PartitionEvent{{"r" + std::to_string(pick(0, c.replicas() - 1))}, from,
                                          from + millis(uni(5, 15))});
  }

  c.protocol.heartbeat = millis(1);
  c.protocol.suspicion_missed = 3;
  c.protocol.client_timeout = millis(2);
  c.protocol.retransmit = micros(400);
  c.protocol.checkpoint_recovery = coin(0.5);
  c.protocol.bounded_degradation = coin(0.3);
  c.run.max_time = millis(5000);
  c.validate();
  return c;
}

StrayOutcome run_stray_schedule(int f, bool hash_crash_vector, uint64_t seed) {
  ScenarioConfig c = perfect_network(f, false, 1, seed);
  c.protocol.hash_crash_vector = hash_crash_vector;
  c.protocol.retry_limit = 0;
  c.protocol.client_timeout = millis(200);
  c.protocol.heartbeat = millis(1);
  c.protocol.suspicion_missed = 3;
  c.protocol.retransmit = micros(200);
  c.workload.app = App::Kv;
  c.workload.read_ratio = 0;
  const int n = c.replicas();
  const Nanos gap = millis(2);
  // Followers first, the leader (r0) last.
  for (int r = 1; r < n; ++r) {
    sim::LinkModel m;
    m.base_delay = gap * r;
    c.link_overrides.push_back(LinkOverride{"c0", "r" + std::to_string(r), m});
  }
  sim::LinkModel to_leader;
  to_leader.base_delay = gap * n;
  c.link_overrides.push_back(LinkOverride{"c0", "r0", to_leader});
  c.run.settle = millis(60);

  Cluster cl(c);
  StrayOutcome out;
  std::vector<bool> bounced(static_cast<size_t>(n), false);
  const RequestKey target{0, 1};
  cl.fast_reply_hook = [&](ReplicaId r, const replica::FastReply& fr) {
    if (RequestKey{fr.client_id, fr.request_id} != target || bounced[r]) return;
    bounced[r] = true;
    ++out.bounced;
    const NodeId node = r;
    const bool leader = cl.replica(r).is_leader();
    cl.sim().schedule_after(1, kNoNode, "fault", [&cl, node] { cl.crash_node(node); });
    const Nanos back = leader ? millis(20) : micros(500);
    cl.sim().schedule_after(back, kNoNode, "fault", [&cl, node] { cl.restart_node(node); });
  };
  cl.commit_hook = [&](const CommitRecord& rec) {
    if (rec.key == target) ++out.commits;
  };
  cl.run();
  out.result = cl.finish();
  return out;
}

namespace {

ScenarioConfig skew_base(uint64_t seed) {
  ScenarioConfig c;
  c.seed = seed;
  c.f = 1;
  c.clients = 4;
  sim::LinkModel link;
  link.base_delay = micros(50);
  link.jitter = sim::jitter::LogNormal{std::log(static_cast<double>(micros(10))), 0.5};
  c.client_proxy = c.proxy_replica = c.replica_replica = link;
  c.default_clock.offset = sim::offset::Normal{0, 1.0 * kNanosPerMicro};
  c.default_clock.sigma_send = c.default_clock.sigma_recv = micros(1);
  c.workload.requests_per_client = 250;
  c.workload.read_ratio = 0.5;
  c.workload.zipf_s = 0.5;
  c.workload.key_space = 100;
  c.run.max_time = millis(60000);
  return c;
}

Nanos median_latency(const History& h, std::optional<replica::CommitPath> path) {
  std::vector<Nanos> lat;
  for (const auto& op : h) {
    if (op.status != OpStatus::Committed || (path && op.path != *path)) continue;
    lat.push_back(op.response - op.invoke);
  }
  return lat.empty() ? 0 : dom::percentile_nearest_rank(std::move(lat), 50);
}

}  // namespace

SkewOutcome run_skew_degradation(uint64_t seed) {
  SkewOutcome out;
  ScenarioConfig base = skew_base(seed);
  out.baseline = run_scenario(base);
  out.slow_baseline = median_latency(out.baseline.history, replica::CommitPath::Slow);

  ScenarioConfig skewed = base;
  sim::ClockModel slow_leader = base.default_clock;
  slow_leader.offset = sim::offset::Normal{-300.0 * kNanosPerMicro, 30.0 * kNanosPerMicro};
  skewed.clocks["r0"] = slow_leader;
  out.threshold = skewed.protocol.degradation_threshold;

  skewed.protocol.bounded_degradation = true;
  out.with_bound = run_scenario(skewed);
  out.median_with_bound = median_latency(out.with_bound.history, std::nullopt);

  skewed.protocol.bounded_degradation = false;
  out.without_bound = run_scenario(skewed);
  out.median_without_bound = median_latency(out.without_bound.history, std::nullopt);
  return out;
}

}  // namespace nezha::harness

// Runs acceptance criteria 1-10 and prints one PASS/FAIL line each.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include <unistd.h>

#include "../oracles.h"
#include "nezha/dom/reorder.h"
#include "nezha/harness/cluster.h"
#include "nezha/harness/microbench.h"
#include "nezha/harness/scenarios.h"
#include "nezha/hashing/digest.h"
#include "nezha/proxy/reply_set.h"
#include "nezha/recovery/merge_log.h"

namespace h = nezha::harness;
using nezha::DeadlineTuple;
using nezha::Nanos;
using nezha::replica::CommitPath;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string hops_summary(const h::RunMetrics& m) {
  std::ostringstream s;
  for (const auto& [k, n] : m.message_delays) s << (k.first == CommitPath::Fast ? "F" : "S") << k.second << "x" << n << ' ';
  return s.str();
}

// Every one of `requests` commits on `path` in exactly `hops` delays.
bool exact_hops(const h::RunResult& r, uint64_t requests, CommitPath path, uint32_t hops, std::ostringstream& why) {
  const auto& m = r.metrics;
  why << "committed=" << m.committed << " [" << hops_summary(m) << "] ";
  if (!r.ok() || m.committed != requests || m.submitted != requests) return false;
  for (const auto& op : r.history) {
    if (op.status != h::OpStatus::Committed || op.path != path || op.hops != hops) return false;
  }
  return true;
}

Verdict c1() {
  std::ostringstream why;
  bool ok = true;
  for (bool proxy : {false, true}) {
    const auto r = h::run_scenario(h::perfect_network(1, proxy, 1000));
    why << (proxy ? "proxy: " : "non-proxy: ");
    ok = exact_hops(r, 1000, CommitPath::Fast, proxy ? 4 : 2, why) && r.metrics.fcr == 1.0 && ok;
  }
  return {ok, why.str()};
}

Verdict c2() {
  std::ostringstream why;
  bool ok = true;
  for (bool proxy : {false, true}) {
    const auto r = h::run_scenario(h::forced_slow_path(1, proxy, 1000));
    why << (proxy ? "proxy: " : "non-proxy: ");
    ok = exact_hops(r, 1000, CommitPath::Slow, proxy ? 5 : 3, why) && ok;
  }
  return {ok, why.str()};
}

Verdict c3() {
  uint64_t sets = 0, mismatches = 0;
  for (int f = 1; f <= 3; ++f) {
    const int n = 2 * f + 1;
    // Per replica: fast in {none, match, mismatch} x slow in {no, yes}. The
    // leader's state is none or match (its fast reply carries the result).
    uint64_t total = 1;
    for (int i = 0; i < n; ++i) total *= 6;
    for (uint64_t code = 0; code < total; ++code) {
      std::vector<oracle::ReplyState> rs(static_cast<size_t>(n));
      uint64_t c = code;
      bool skip = false;
      for (int i = 0; i < n; ++i) {
        const int s = static_cast<int>(c % 6);
        c /= 6;
        rs[static_cast<size_t>(i)].fast = static_cast<oracle::ReplyState::Fast>(s % 3);
        rs[static_cast<size_t>(i)].slow = s >= 3;
        if (i == 0 && (s % 3 == oracle::ReplyState::Mismatch || s >= 3)) skip = true;
      }
      if (skip) continue;
      nezha::proxy::ReplySet set;
      const auto good = nezha::hashing::entry_digest(100, 1, 1);
      const auto bad = nezha::hashing::entry_digest(200, 1, 1);
      for (int i = 0; i < n; ++i) {
        const auto& st = rs[static_cast<size_t>(i)];
        const auto rid = static_cast<nezha::ReplicaId>(i);
        if (st.fast != oracle::ReplyState::None) {
          nezha::replica::FastReply fr;
          fr.replica = rid;
          fr.client_id = 1;
          fr.request_id = 1;
          fr.hash = good;
          fr.deadline = 100;
          // Alternate the two ways a fast reply can disagree with the leader.
          if (st.fast == oracle::ReplyState::Mismatch) {
            if (i % 2) fr.hash = bad;
            else fr.deadline = 101;
          }
          if (i == 0) fr.result = nezha::Result{{std::nullopt}};
          set.add_fast(fr, 2);
        }
        if (st.slow) {
          nezha::replica::SlowReply sr;
          sr.replica = rid;
          sr.client_id = 1;
          sr.request_id = 1;
          set.add_slow(sr, 3);
        }
      }
      const bool want_fast = oracle::brute_fast(rs, 0, f);
      const bool want_slow = oracle::brute_slow(rs, 0, f);
      const auto got = nezha::proxy::check_committed(set, f);
      const bool agree = want_fast ? (got && got->path == CommitPath::Fast)
                                   : want_slow ? (got && got->path == CommitPath::Slow) : !got;
      ++sets;
      mismatches += !agree;
    }
  }
  return {mismatches == 0, std::to_string(sets) + " reply sets, " + std::to_string(mismatches) + " disagreements"};
}

Verdict c4() {
  uint64_t bad = 0, lin_checked = 0, runs = 0, commits = 0;
  std::string first;
  for (uint64_t seed = 1; seed <= 1000; ++seed) {
    const auto r = h::run_scenario(h::random_safety_scenario(seed));
    ++runs;
    commits += r.metrics.committed;
    lin_checked += r.metrics.linearizability == "ok";
    if (!r.ok()) {
      ++bad;
      if (first.empty()) first = "seed " + std::to_string(seed) + ": " + r.violations.front().oracle + " " + r.violations.front().detail;
    }
  }
  std::ostringstream why;
  why << runs << " runs, " << commits << " commits, linearizability checked in " << lin_checked << ", " << bad
      << " with violations";
  if (!first.empty()) why << " (first: " << first << ")";
  return {bad == 0 && lin_checked == runs, why.str()};
}

Verdict c5() {
  std::ostringstream why;
  bool ok = true;
  for (int f : {1, 2}) {
    const auto on = h::run_stray_schedule(f, true);
    const auto off = h::run_stray_schedule(f, false);
    const int n = 2 * f + 1;
    why << "f=" << f << ": bounced=" << on.bounced << "/" << n << " commits=" << on.commits
        << " violations=" << on.result.violations.size() << " (control without crash vector: commits=" << off.commits
        << " violations=" << off.result.violations.size() << ") ";
    ok = ok && on.bounced == n && on.commits == 0 && on.result.ok();
    // The control shows the schedule is adversarial: without the crash vector
    // the stray replies form a quorum and the commit is lost.
    ok = ok && off.commits > 0 && !off.result.ok();
  }
  return {ok, why.str()};
}

// All logs over `universe` (sorted subsets).
std::vector<std::vector<DeadlineTuple>> subsets(const std::vector<DeadlineTuple>& universe) {
  std::vector<std::vector<DeadlineTuple>> out;
  for (uint32_t m = 0; m < (1u << universe.size()); ++m) {
    std::vector<DeadlineTuple> s;
    for (size_t i = 0; i < universe.size(); ++i)
      if (m >> i & 1) s.push_back(universe[i]);
    out.push_back(s);
  }
  return out;
}

std::vector<nezha::LogEntry> to_entries(const std::vector<DeadlineTuple>& log) {
  std::vector<nezha::LogEntry> out;
  for (const auto& t : log) {
    nezha::LogEntry e;
    e.request.deadline = t.deadline;
    e.request.client_id = t.client_id;
    e.request.request_id = t.request_id;
    e.request.command = nezha::Command::set("x", 1);
    out.push_back(e);
  }
  return out;
}

Verdict c6() {
  const int f = 1;
  const std::vector<DeadlineTuple> universe{{10, 1, 1}, {20, 2, 1}, {30, 1, 2}};
  const auto all = subsets(universe);
  uint64_t cases = 0, mismatch = 0, lost = 0;

  // Follower logs in the current view: a synced prefix of the leader log,
  // then any unsynced entries ordered after it.
  auto follower_logs = [&](const std::vector<DeadlineTuple>& lead) {
    std::vector<oracle::MergeInput> out;
    for (size_t k = 0; k <= lead.size(); ++k) {
      for (const auto& rest : all) {
        std::vector<DeadlineTuple> log(lead.begin(), lead.begin() + static_cast<long>(k));
        bool fits = true;
        for (const auto& t : rest) {
          if (std::find(log.begin(), log.begin() + static_cast<long>(k), t) != log.begin() + static_cast<long>(k)) {
            fits = false;
            break;
          }
          if (k > 0 && !(t > log[k - 1])) fits = false;
        }
        if (!fits) continue;
        log.insert(log.end(), rest.begin(), rest.end());
        out.push_back({1, log, k});
      }
    }
    return out;
  };
  // Stale replica: any log and any sync point from an older view.
  std::vector<oracle::MergeInput> stale;
  for (const auto& log : all)
    for (size_t k = 0; k <= log.size(); ++k) stale.push_back({0, log, k});

  auto committed = [&](const std::vector<oracle::MergeInput>& reps) {
    // reps[0] is the old leader. Fast: every replica shares the prefix up to
    // and including x. Slow: x is in the leader log and in f follower synced prefixes.
    std::set<DeadlineTuple> out;
    const auto& lead = reps[0].log;
    for (const auto& x : lead) {
      auto upto = [&](const std::vector<DeadlineTuple>& l) {
        std::vector<DeadlineTuple> p;
        for (const auto& t : l)
          if (t <= x) p.push_back(t);
        return p;
      };
      int fast = 0, slow = 0;
      for (size_t i = 1; i < reps.size(); ++i) {
        if (reps[i].last_normal_view != reps[0].last_normal_view) continue;
        fast += upto(reps[i].log) == upto(lead);
        const auto& l = reps[i].log;
        slow += std::find(l.begin(), l.begin() + static_cast<long>(reps[i].sync_point), x) !=
                l.begin() + static_cast<long>(reps[i].sync_point);
      }
      if (fast >= f + (f + 1) / 2 || slow >= f) out.insert(x);
    }
    return out;
  };

  auto check = [&](const std::vector<oracle::MergeInput>& reps) {
    const auto must = committed(reps);
    // Any f+1 of the three, in either message order.
    for (size_t a = 0; a < reps.size(); ++a) {
      for (size_t b = 0; b < reps.size(); ++b) {
        if (a == b) continue;
        const std::vector<oracle::MergeInput> msgs{reps[a], reps[b]};
        std::vector<nezha::recovery::ViewChangeLog> vcs;
        for (size_t i = 0; i < msgs.size(); ++i) {
          vcs.push_back({static_cast<nezha::ReplicaId>(i), 2, msgs[i].last_normal_view, to_entries(msgs[i].log), msgs[i].sync_point});
        }
        const auto got = nezha::recovery::merge_log(vcs, f);
        std::vector<DeadlineTuple> got_t;
        for (const auto& e : got) got_t.push_back(e.tuple());
        ++cases;
        mismatch += got_t != oracle::brute_merge(msgs, f);
        for (const auto& x : must) lost += std::find(got_t.begin(), got_t.end(), x) == got_t.end();
      }
    }
  };

  for (const auto& lead : all) {
    const oracle::MergeInput leader{1, lead, lead.size()};
    const auto fl = follower_logs(lead);
    for (const auto& r1 : fl) {
      for (const auto& r2 : fl) check({leader, r1, r2});
      for (const auto& r2 : stale) check({leader, r1, r2});
    }
  }
  std::ostringstream why;
  why << cases << " merges, " << mismatch << " differ from the rule evaluator, " << lost << " committed entries lost";
  return {mismatch == 0 && lost == 0, why.str()};
}

Verdict c7() {
  std::mt19937_64 rng(7);
  uint64_t bad_running = 0, bad_split = 0;
  for (int seq = 0; seq < 1000; ++seq) {
    std::vector<DeadlineTuple> synced, unsynced;
    nezha::hashing::Digest160 running, s_hash, u_hash;
    const int steps = std::uniform_int_distribution<int>(1, 60)(rng);
    for (int i = 0; i < steps; ++i) {
      const int op = std::uniform_int_distribution<int>(0, 3)(rng);
      if (op <= 1 || unsynced.empty()) {
        const DeadlineTuple t{std::uniform_int_distribution<Nanos>(0, 1 << 20)(rng),
                              std::uniform_int_distribution<uint32_t>(0, 7)(rng), static_cast<uint32_t>(seq * 100 + i)};
        const auto d = nezha::hashing::entry_digest(t.deadline, t.client_id, t.request_id);
        unsynced.push_back(t);
        running = nezha::hashing::set_hash_apply(running, d);
        u_hash = nezha::hashing::set_hash_apply(u_hash, d);
      } else {
        const size_t idx = std::uniform_int_distribution<size_t>(0, unsynced.size() - 1)(rng);
        const auto t = unsynced[idx];
        const auto d = nezha::hashing::entry_digest(t.deadline, t.client_id, t.request_id);
        unsynced.erase(unsynced.begin() + static_cast<long>(idx));
        u_hash = nezha::hashing::set_hash_apply(u_hash, d);
        if (op == 2) {  // removed outright
          running = nezha::hashing::set_hash_apply(running, d);
        } else {  // moved into the synced part
          synced.push_back(t);
          s_hash = nezha::hashing::set_hash_apply(s_hash, d);
        }
      }
      std::vector<DeadlineTuple> whole = synced;
      whole.insert(whole.end(), unsynced.begin(), unsynced.end());
      bad_running += running != oracle::scratch_hash(whole);
      bad_split += (s_hash ^ u_hash) != running || s_hash != oracle::scratch_hash(synced);
    }
  }
  // The same identity on live replicas after a faulty run.
  uint64_t replicas = 0, bad_live = 0;
  for (uint64_t seed : {3, 11, 29}) {
    h::Cluster cl(h::random_safety_scenario(seed));
    cl.run();
    for (int r = 0; r < cl.replica_count(); ++r) {
      auto& rep = cl.replica(static_cast<nezha::ReplicaId>(r));
      std::vector<DeadlineTuple> whole;
      for (const auto& e : rep.log()) whole.push_back(e.tuple());
      ++replicas;
      bad_live += rep.set_hash() != oracle::scratch_hash(whole) ||
                  (rep.synced_hash() ^ rep.unsynced_hash()) != rep.set_hash();
    }
  }
  std::ostringstream why;
  why << "1000 sequences: " << bad_running << " running-hash mismatches, " << bad_split << " split mismatches; "
      << replicas << " live replicas: " << bad_live << " mismatches";
  return {bad_running == 0 && bad_split == 0 && bad_live == 0, why.str()};
}

Verdict c8() {
  std::ostringstream why;
  bool ok = true;
  const std::vector<int> senders{1, 4, 16, 64};
  const std::vector<double> percentiles{50, 75, 90, 95};
  for (uint64_t seed : {1, 2, 3}) {
    h::MicrobenchConfig base;
    base.link = h::MicrobenchConfig::default_link();
    base.seed = seed;
    base.duration = nezha::millis(50);
    base.rate = 5000;
    const auto rows = h::reorder_sweep(base, senders, {}, percentiles);
    std::vector<double> by_senders, by_pct;
    for (const auto& r : rows) (r.sweep == "senders" ? by_senders : by_pct).push_back(r.score);
    why << "seed " << seed << " senders[";
    for (double s : by_senders) why << s << ' ';
    why << "] pct[";
    for (double s : by_pct) why << s << ' ';
    why << "] ";
    for (size_t i = 1; i < by_senders.size(); ++i) ok = ok && by_senders[i] >= by_senders[i - 1];
    for (size_t i = 1; i < by_pct.size(); ++i) ok = ok && by_pct[i] <= by_pct[i - 1];
    ok = ok && by_senders.size() == senders.size() && by_pct.size() == percentiles.size();
  }
  // Exhaustive LIS check.
  uint64_t seqs = 0, lis_bad = 0;
  std::vector<int64_t> s;
  std::function<void()> rec = [&] {
    ++seqs;
    lis_bad += nezha::dom::lis_length(s) != oracle::lis_quadratic(s);
    if (s.size() == 12) return;
    for (int64_t v = 0; v < 4; ++v) {
      s.push_back(v);
      rec();
      s.pop_back();
    }
  };
  rec();
  why << "; LIS: " << seqs << " sequences, " << lis_bad << " mismatches";
  return {ok && lis_bad == 0, why.str()};
}

Verdict c9() {
  const auto out = h::run_skew_degradation();
  const Nanos limit = out.slow_baseline + 2 * out.threshold;
  std::ostringstream why;
  why << "median with bound=" << out.median_with_bound << "ns, limit=" << limit << "ns (slow baseline "
      << out.slow_baseline << " + 2x" << out.threshold << "), without bound=" << out.median_without_bound
      << "ns, violations=" << out.with_bound.violations.size() << '/' << out.without_bound.violations.size() << '/'
      << out.baseline.violations.size() << ", degraded=" << out.with_bound.metrics.degraded;
  const bool ok = out.slow_baseline > 0 && out.with_bound.metrics.committed > 0 && out.median_with_bound <= limit &&
                  out.with_bound.ok() && out.without_bound.ok() && out.baseline.ok();
  return {ok, why.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict c10() {
  const auto root = std::filesystem::temp_directory_path() / ("nezha_accept_" + std::to_string(::getpid()));
  uint64_t files = 0, differ = 0;
  std::vector<h::ScenarioConfig> cfgs{h::random_safety_scenario(5), h::random_safety_scenario(77),
                                      h::perfect_network(1, true, 200)};
  for (size_t i = 0; i < cfgs.size(); ++i) {
    cfgs[i].run.trace = true;
    const auto a = root / std::to_string(i) / "a";
    const auto b = root / std::to_string(i) / "b";
    h::write_outputs(a.string(), h::run_scenario(cfgs[i]));
    h::write_outputs(b.string(), h::run_scenario(cfgs[i]));
    for (const auto& e : std::filesystem::directory_iterator(a)) {
      ++files;
      const auto other = b / e.path().filename();
      differ += !std::filesystem::exists(other) || slurp(e.path()) != slurp(other);
    }
  }
  std::filesystem::remove_all(root);
  return {files > 0 && differ == 0, std::to_string(files) + " output files compared, " + std::to_string(differ) + " differ"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_s;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> all{
      {"C1 fast-path message delays", 5, c1},     {"C2 slow-path message delays", 5, c2},
      {"C3 quorum arithmetic", 30, c3},           {"C4 safety suite", 600, c4},
      {"C5 stray-message schedule", 5, c5},       {"C6 merge_log equivalence", 60, c6},
      {"C7 incremental hash", 5, c7},             {"C8 reordering trends", 60, c8},
      {"C9 bounded skew degradation", 30, c9},    {"C10 determinism", 60, c10},
  };
  int failed = 0;
  for (const auto& c : all) {
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = seconds_since(t0);
    const bool in_time = secs <= c.budget_s;
    const bool pass = v.pass && in_time;
    failed += !pass;
    std::cout << (pass ? "PASS " : "FAIL ") << c.name << " (" << secs << "s, budget " << c.budget_s << "s"
              << (in_time ? "" : ", over budget") << "): " << v.detail << std::endl;
  }
  return failed ? 1 : 0;
}

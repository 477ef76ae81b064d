#include "nezha/harness/config.h"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace nezha::harness {

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void check_keys(const YAML::Node& n, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!n) return;
  if (!n.IsMap()) throw ConfigError(path.empty() ? "<root>" : path, "expected a mapping");
  for (const auto& kv : n) {
    const auto key = kv.first.as<std::string>();
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw ConfigError(join(path, key), "unknown field");
    }
  }
}

template <typename T>
T get(const YAML::Node& n, const std::string& path, const char* key, T def) {
  if (!n || !n[key]) return def;
  try {
    return n[key].as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(join(path, key), "wrong type");
  }
}

Nanos get_us(const YAML::Node& n, const std::string& path, const char* key, Nanos def) {
  return static_cast<Nanos>(std::llround(get<double>(n, path, key, static_cast<double>(def) / kNanosPerMicro) *
                                         kNanosPerMicro));
}

Nanos get_ms(const YAML::Node& n, const std::string& path, const char* key, Nanos def) {
  return static_cast<Nanos>(std::llround(get<double>(n, path, key, static_cast<double>(def) / kNanosPerMilli) *
                                         kNanosPerMilli));
}

sim::Jitter parse_jitter(const YAML::Node& n, const std::string& path) {
  if (!n) return sim::jitter::None{};
  check_keys(n, path, {"kind", "low_us", "high_us", "mean_us", "median_us", "sigma"});
  const auto kind = get<std::string>(n, path, "kind", "none");
  if (kind == "none") return sim::jitter::None{};
  if (kind == "uniform") return sim::jitter::Uniform{get_us(n, path, "low_us", 0), get_us(n, path, "high_us", 0)};
  if (kind == "exponential") return sim::jitter::Exponential{get_us(n, path, "mean_us", 0)};
  if (kind == "lognormal") {
    const Nanos median = get_us(n, path, "median_us", 0);
    if (median <= 0) throw ConfigError(join(path, "median_us"), "must be positive");
    return sim::jitter::LogNormal{std::log(static_cast<double>(median)), get<double>(n, path, "sigma", 0)};
  }
  throw ConfigError(join(path, "kind"), "unknown jitter kind '" + kind + "'");
}

sim::LinkModel parse_link(const YAML::Node& n, const std::string& path, sim::LinkModel m,
                          std::initializer_list<const char*> extra = {}) {
  if (!n) return m;
  std::vector<const char*> allowed{"base_us", "jitter", "drop", "dup"};
  allowed.insert(allowed.end(), extra.begin(), extra.end());
  if (!n.IsMap()) throw ConfigError(path, "expected a mapping");
  for (const auto& kv : n) {
    const auto key = kv.first.as<std::string>();
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw ConfigError(join(path, key), "unknown field");
    }
  }
  m.base_delay = get_us(n, path, "base_us", m.base_delay);
  if (n["jitter"]) m.jitter = parse_jitter(n["jitter"], join(path, "jitter"));
  m.drop_prob = get<double>(n, path, "drop", m.drop_prob);
  m.dup_prob = get<double>(n, path, "dup", m.dup_prob);
  if (m.drop_prob < 0 || m.drop_prob > 1) throw ConfigError(join(path, "drop"), "must be in [0,1]");
  if (m.dup_prob < 0 || m.dup_prob > 1) throw ConfigError(join(path, "dup"), "must be in [0,1]");
  if (m.base_delay < 0) throw ConfigError(join(path, "base_us"), "must be non-negative");
  return m;
}

sim::ClockModel parse_clock(const YAML::Node& n, const std::string& path, sim::ClockModel m) {
  check_keys(n, path,
             {"kind", "offset_us", "base_us", "ppm", "at_ms", "before_us", "after_us", "period_us", "amplitude_us",
              "mean_us", "stddev_us", "sigma_send_us", "sigma_recv_us", "monotonic"});
  if (n["kind"]) {
    const auto kind = get<std::string>(n, path, "kind", "zero");
    if (kind == "zero") {
      m.offset = sim::offset::Zero{};
    } else if (kind == "constant") {
      m.offset = sim::offset::Constant{get_us(n, path, "offset_us", 0)};
    } else if (kind == "drift") {
      m.offset = sim::offset::Drift{get_us(n, path, "base_us", 0), get<double>(n, path, "ppm", 0)};
    } else if (kind == "step") {
      m.offset = sim::offset::Step{get_ms(n, path, "at_ms", 0), get_us(n, path, "before_us", 0),
                                   get_us(n, path, "after_us", 0)};
    } else if (kind == "sawtooth") {
      const Nanos period = get_us(n, path, "period_us", 1000);
      if (period <= 0) throw ConfigError(join(path, "period_us"), "must be positive");
      m.offset = sim::offset::Sawtooth{period, get_us(n, path, "amplitude_us", 0)};
    } else if (kind == "normal") {
      const double sd = get<double>(n, path, "stddev_us", 0);
      if (sd < 0) throw ConfigError(join(path, "stddev_us"), "must be non-negative");
      m.offset = sim::offset::Normal{get<double>(n, path, "mean_us", 0) * kNanosPerMicro, sd * kNanosPerMicro};
    } else {
      throw ConfigError(join(path, "kind"), "unknown clock kind '" + kind + "'");
    }
  }
  m.sigma_send = get_us(n, path, "sigma_send_us", m.sigma_send);
  m.sigma_recv = get_us(n, path, "sigma_recv_us", m.sigma_recv);
  m.monotonic_repair = get<bool>(n, path, "monotonic", m.monotonic_repair);
  return m;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

Nanos parse_duration(const std::string& raw) {
  const std::string text = trim(raw);
  size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw ConfigError("duration", "cannot parse '" + raw + "'");
  }
  const std::string unit = text.substr(pos);
  double scale = 1;
  if (unit == "ns" || unit.empty()) {
    scale = 1;
  } else if (unit == "us") {
    scale = kNanosPerMicro;
  } else if (unit == "ms") {
    scale = kNanosPerMilli;
  } else if (unit == "s") {
    scale = kNanosPerSecond;
  } else {
    throw ConfigError("duration", "unknown unit in '" + raw + "'");
  }
  return static_cast<Nanos>(std::llround(v * scale));
}

void ScenarioConfig::validate() const {
  if (f < 1) throw ConfigError("replicas_f", "must be >= 1");
  if (clients < 1) throw ConfigError("clients", "must be >= 1");
  if (proxy_mode && proxies < 1) throw ConfigError("proxies", "must be >= 1 in proxy mode");
  if (dom.window == 0) throw ConfigError("dom.window", "must be >= 1");
  if (dom.percentile <= 0 || dom.percentile > 100) throw ConfigError("dom.percentile", "must be in (0,100]");
  if (dom.clamp <= 0) throw ConfigError("dom.clamp_us", "must be positive");
  if (workload.read_ratio < 0 || workload.read_ratio > 1) throw ConfigError("workload.read_ratio", "must be in [0,1]");
  if (workload.zipf_s < 0) throw ConfigError("workload.zipf_s", "must be non-negative");
  if (workload.key_space < 1) throw ConfigError("workload.key_space", "must be >= 1");
  if (workload.mode == proxy::LoopMode::Open && workload.rate <= 0) throw ConfigError("workload.rate", "must be positive");
  if (protocol.heartbeat <= 0) throw ConfigError("protocol.heartbeat_us", "must be positive");
  if (protocol.client_timeout <= 0) throw ConfigError("protocol.client_timeout_us", "must be positive");
  if (protocol.retransmit <= 0) throw ConfigError("protocol.retransmit_us", "must be positive");
  if (run.max_time <= 0) throw ConfigError("run.max_time_ms", "must be positive");
  std::set<std::string> names;
  for (int i = 0; i < replicas(); ++i) names.insert("r" + std::to_string(i));
  for (int i = 0; proxy_mode && i < proxies; ++i) names.insert("p" + std::to_string(i));
  for (int i = 0; i < clients; ++i) names.insert("c" + std::to_string(i));
  for (size_t i = 0; i < crashes.size(); ++i) {
    const auto& c = crashes[i];
    const std::string path = "faults.crashes[" + std::to_string(i) + "]";
    if (c.node != "leader" && (!names.count(c.node) || c.node[0] == 'c')) {
      throw ConfigError(path + ".node", "no replica or proxy named '" + c.node + "'");
    }
    if (c.at < 0) throw ConfigError(path + ".at_ms", "must be non-negative");
    if (c.rejoin_at && *c.rejoin_at <= c.at) throw ConfigError(path + ".rejoin_ms", "must be after the kill");
  }
  for (size_t i = 0; i < partitions.size(); ++i) {
    for (const auto& n : partitions[i].side) {
      if (!names.count(n)) throw ConfigError("faults.partitions[" + std::to_string(i) + "].side", "unknown node '" + n + "'");
    }
  }
  for (size_t i = 0; i < link_overrides.size(); ++i) {
    const auto& o = link_overrides[i];
    const std::string path = "link_overrides[" + std::to_string(i) + "]";
    if (!names.count(o.from)) throw ConfigError(path + ".from", "unknown node '" + o.from + "'");
    if (!names.count(o.to)) throw ConfigError(path + ".to", "unknown node '" + o.to + "'");
  }
  for (const auto& [n, _] : clocks) {
    if (!names.count(n)) throw ConfigError("clocks." + n, "unknown node");
  }
}

ScenarioConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("<root>", std::string("YAML syntax: ") + e.what());
  }
  ScenarioConfig c;
  if (!root || root.IsNull()) {
    c.validate();
    return c;
  }
  check_keys(root, "",
             {"seed", "replicas_f", "proxies", "clients", "proxy_mode", "commutativity", "dom", "links",
              "link_overrides", "clocks", "workload", "faults", "protocol", "run"});
  c.seed = get<uint64_t>(root, "", "seed", c.seed);
  c.f = get<int>(root, "", "replicas_f", c.f);
  c.proxies = get<int>(root, "", "proxies", c.proxies);
  c.clients = get<int>(root, "", "clients", c.clients);
  c.proxy_mode = get<bool>(root, "", "proxy_mode", c.proxy_mode);
  c.commutativity = get<bool>(root, "", "commutativity", c.commutativity);

  if (const auto d = root["dom"]) {
    check_keys(d, "dom", {"percentile", "beta", "window", "clamp_us"});
    c.dom.percentile = get<double>(d, "dom", "percentile", c.dom.percentile);
    c.dom.beta = get<double>(d, "dom", "beta", c.dom.beta);
    c.dom.window = get<size_t>(d, "dom", "window", c.dom.window);
    c.dom.clamp = get_us(d, "dom", "clamp_us", c.dom.clamp);
  }

  if (const auto l = root["links"]) {
    check_keys(l, "links", {"default", "client_proxy", "proxy_replica", "replica_replica"});
    sim::LinkModel def = parse_link(l["default"], "links.default", {});
    c.client_proxy = parse_link(l["client_proxy"], "links.client_proxy", def);
    c.proxy_replica = parse_link(l["proxy_replica"], "links.proxy_replica", def);
    c.replica_replica = parse_link(l["replica_replica"], "links.replica_replica", def);
  }

  if (const auto lo = root["link_overrides"]) {
    if (!lo.IsSequence()) throw ConfigError("link_overrides", "expected a list");
    for (size_t i = 0; i < lo.size(); ++i) {
      const std::string path = "link_overrides[" + std::to_string(i) + "]";
      const auto n = lo[i];
      LinkOverride o;
      o.from = get<std::string>(n, path, "from", "");
      o.to = get<std::string>(n, path, "to", "");
      o.model = parse_link(n, path, {}, {"from", "to"});
      c.link_overrides.push_back(o);
    }
  }

  if (const auto cl = root["clocks"]) {
    if (!cl.IsMap()) throw ConfigError("clocks", "expected a mapping");
    if (cl["default"]) c.default_clock = parse_clock(cl["default"], "clocks.default", {});
    for (const auto& kv : cl) {
      const auto name = kv.first.as<std::string>();
      if (name == "default") continue;
      c.clocks[name] = parse_clock(kv.second, "clocks." + name, c.default_clock);
    }
  }

  if (const auto w = root["workload"]) {
    const std::string p = "workload";
    check_keys(w, p,
               {"mode", "requests_per_client", "rate", "read_ratio", "zipf_s", "key_space", "duration_ms", "app",
                "start_stagger_us"});
    const auto mode = get<std::string>(w, p, "mode", "closed");
    if (mode == "closed") {
      c.workload.mode = proxy::LoopMode::Closed;
    } else if (mode == "open") {
      c.workload.mode = proxy::LoopMode::Open;
    } else {
      throw ConfigError("workload.mode", "expected closed|open");
    }
    c.workload.requests_per_client = get<uint64_t>(w, p, "requests_per_client", c.workload.requests_per_client);
    c.workload.rate = get<double>(w, p, "rate", c.workload.rate);
    c.workload.read_ratio = get<double>(w, p, "read_ratio", c.workload.read_ratio);
    c.workload.zipf_s = get<double>(w, p, "zipf_s", c.workload.zipf_s);
    c.workload.key_space = get<uint32_t>(w, p, "key_space", c.workload.key_space);
    c.workload.duration = get_ms(w, p, "duration_ms", c.workload.duration);
    c.workload.start_stagger = get_us(w, p, "start_stagger_us", c.workload.start_stagger);
    const auto app = get<std::string>(w, p, "app", "kv");
    if (app == "kv") {
      c.workload.app = App::Kv;
    } else if (app == "null") {
      c.workload.app = App::Null;
    } else {
      throw ConfigError("workload.app", "expected kv|null");
    }
  }

  if (const auto fl = root["faults"]) {
    check_keys(fl, "faults", {"crashes", "partitions"});
    if (const auto cr = fl["crashes"]) {
      if (!cr.IsSequence()) throw ConfigError("faults.crashes", "expected a list");
      for (size_t i = 0; i < cr.size(); ++i) {
        const std::string path = "faults.crashes[" + std::to_string(i) + "]";
        check_keys(cr[i], path, {"node", "at_ms", "rejoin_ms"});
        CrashEvent e;
        e.node = get<std::string>(cr[i], path, "node", "");
        if (e.node.empty()) throw ConfigError(path + ".node", "required");
        e.at = get_ms(cr[i], path, "at_ms", 0);
        if (cr[i]["rejoin_ms"]) e.rejoin_at = get_ms(cr[i], path, "rejoin_ms", 0);
        c.crashes.push_back(e);
      }
    }
    if (const auto pa = fl["partitions"]) {
      if (!pa.IsSequence()) throw ConfigError("faults.partitions", "expected a list");
      for (size_t i = 0; i < pa.size(); ++i) {
        const std::string path = "faults.partitions[" + std::to_string(i) + "]";
        check_keys(pa[i], path, {"side", "from_ms", "until_ms"});
        PartitionEvent e;
        e.side = get<std::vector<std::string>>(pa[i], path, "side", {});
        e.from = get_ms(pa[i], path, "from_ms", 0);
        e.until = get_ms(pa[i], path, "until_ms", 0);
        if (e.until <= e.from) throw ConfigError(path + ".until_ms", "must be after from_ms");
        c.partitions.push_back(e);
      }
    }
  }

  if (const auto pr = root["protocol"]) {
    const std::string p = "protocol";
    check_keys(pr, p,
               {"heartbeat_us", "suspicion_missed", "bounded_degradation", "threshold_us", "retransmit_us",
                "client_timeout_us", "retry_limit", "checkpoint_recovery", "hash_crash_vector"});
    auto& q = c.protocol;
    q.heartbeat = get_us(pr, p, "heartbeat_us", q.heartbeat);
    q.suspicion_missed = get<int>(pr, p, "suspicion_missed", q.suspicion_missed);
    q.bounded_degradation = get<bool>(pr, p, "bounded_degradation", q.bounded_degradation);
    q.degradation_threshold = get_us(pr, p, "threshold_us", q.degradation_threshold);
    q.retransmit = get_us(pr, p, "retransmit_us", q.retransmit);
    q.client_timeout = get_us(pr, p, "client_timeout_us", q.client_timeout);
    q.retry_limit = get<int>(pr, p, "retry_limit", q.retry_limit);
    q.checkpoint_recovery = get<bool>(pr, p, "checkpoint_recovery", q.checkpoint_recovery);
    q.hash_crash_vector = get<bool>(pr, p, "hash_crash_vector", q.hash_crash_vector);
  }

  if (const auto r = root["run"]) {
    check_keys(r, "run", {"max_time_ms", "trace", "oracle_every", "lin_bound", "settle_ms"});
    c.run.max_time = get_ms(r, "run", "max_time_ms", c.run.max_time);
    c.run.trace = get<bool>(r, "run", "trace", c.run.trace);
    c.run.oracle_every = get<uint64_t>(r, "run", "oracle_every", c.run.oracle_every);
    c.run.lin_bound = get<size_t>(r, "run", "lin_bound", c.run.lin_bound);
    c.run.settle = get_ms(r, "run", "settle_ms", c.run.settle);
  }

  c.validate();
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::vector<CrashEvent> parse_crash_schedule(const std::string& spec) {
  std::vector<CrashEvent> out;
  for (const auto& raw : split(spec, ';')) {
    const std::string stmt = trim(raw);
    if (stmt.empty()) continue;
    std::istringstream in(stmt);
    std::string verb, a, b, c;
    in >> verb;
    if (verb == "kill") {
      in >> a >> b >> c;
      if (b != "at" || c.empty()) throw ConfigError("crash-schedule", "expected 'kill <node> at <time>' in '" + stmt + "'");
      out.push_back(CrashEvent{a, parse_duration(c), std::nullopt});
    } else if (verb == "rejoin") {
      in >> a >> b;
      if (a != "at" || b.empty()) throw ConfigError("crash-schedule", "expected 'rejoin at <time>' in '" + stmt + "'");
      if (out.empty()) throw ConfigError("crash-schedule", "rejoin without a preceding kill");
      out.back().rejoin_at = parse_duration(b);
    } else {
      throw ConfigError("crash-schedule", "unknown statement '" + stmt + "'");
    }
    std::string rest;
    if (in >> rest) throw ConfigError("crash-schedule", "trailing text in '" + stmt + "'");
  }
  return out;
}

std::map<std::string, sim::ClockModel> parse_skew(const std::string& spec) {
  std::map<std::string, sim::ClockModel> out;
  for (const auto& raw : split(spec, ';')) {
    const std::string stmt = trim(raw);
    if (stmt.empty()) continue;
    auto parts = split(stmt, ':');
    for (auto& p : parts) p = trim(p);
    if (parts.size() < 2) throw ConfigError("skew", "expected 'node:kind:params' in '" + stmt + "'");
    const auto& kind = parts[1];
    auto arg = [&](size_t i) -> Nanos {
      if (parts.size() <= i) throw ConfigError("skew", "missing parameter in '" + stmt + "'");
      return parse_duration(parts[i]);
    };
    sim::ClockModel m;
    if (kind == "zero") {
      m.offset = sim::offset::Zero{};
    } else if (kind == "constant") {
      m.offset = sim::offset::Constant{arg(2)};
    } else if (kind == "normal") {
      m.offset = sim::offset::Normal{static_cast<double>(arg(2)), static_cast<double>(arg(3))};
    } else if (kind == "drift") {
      if (parts.size() < 4) throw ConfigError("skew", "missing ppm in '" + stmt + "'");
      m.offset = sim::offset::Drift{arg(2), std::stod(parts[3])};
    } else if (kind == "step") {
      m.offset = sim::offset::Step{arg(2), arg(3), arg(4)};
    } else if (kind == "sawtooth") {
      m.offset = sim::offset::Sawtooth{arg(2), arg(3)};
    } else {
      throw ConfigError("skew", "unknown distribution '" + kind + "'");
    }
    out[parts[0]] = m;
  }
  return out;
}

}  // namespace nezha::harness

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "nezha/dom/reorder.h"
#include "nezha/harness/cluster.h"
#include "nezha/harness/config.h"
#include "nezha/harness/history.h"
#include "nezha/harness/microbench.h"
#include "nezha/harness/scenarios.h"

namespace py = pybind11;
namespace h = nezha::harness;

namespace {

const char* path_name(nezha::replica::CommitPath p) { return p == nezha::replica::CommitPath::Fast ? "fast" : "slow"; }

const char* status_name(h::OpStatus s) {
  switch (s) {
    case h::OpStatus::Committed:
      return "committed";
    case h::OpStatus::Failed:
      return "failed";
    default:
      return "pending";
  }
}

py::dict metrics_dict(const h::RunMetrics& m) {
  py::dict d;
  d["submitted"] = m.submitted;
  d["committed"] = m.committed;
  d["failed"] = m.failed;
  d["in_flight"] = m.in_flight;
  d["fast"] = m.fast;
  d["slow"] = m.slow;
  d["fcr"] = m.fcr;
  d["latency_p50_ns"] = m.latency_p50;
  d["latency_p90_ns"] = m.latency_p90;
  d["latency_p99_ns"] = m.latency_p99;
  d["retries"] = m.retries;
  d["view_changes"] = m.view_changes;
  d["state_transfers"] = m.state_transfers;
  d["late_arrivals"] = m.late_arrivals;
  d["deadline_rewrites"] = m.deadline_rewrites;
  d["degraded"] = m.degraded;
  d["crashes"] = m.crashes;
  d["events"] = m.events;
  d["sim_end_ns"] = m.sim_end;
  d["linearizability"] = m.linearizability;
  d["violations"] = m.violations;
  py::dict hops;
  for (const auto& [k, n] : m.message_delays) hops[py::make_tuple(path_name(k.first), k.second)] = n;
  d["message_delays"] = hops;
  return d;
}

py::list history_list(const h::History& hist) {
  py::list out;
  for (const auto& op : hist) {
    py::dict d;
    d["client_id"] = op.client_id;
    d["request_id"] = op.request_id;
    d["command"] = op.command.to_string();
    d["invoke_ns"] = op.invoke;
    d["response_ns"] = op.response;
    d["status"] = status_name(op.status);
    d["result"] = op.result ? py::cast(op.result->to_string()) : py::none();
    d["path"] = path_name(op.path);
    d["view"] = op.view;
    d["hops"] = op.hops;
    d["attempts"] = op.attempts;
    out.append(d);
  }
  return out;
}

py::dict lin_dict(const h::LinResult& r) {
  py::dict d;
  d["verdict"] = r.verdict == h::LinVerdict::Ok ? "ok" : r.verdict == h::LinVerdict::Violation ? "violation" : "refused";
  d["witness"] = r.witness ? py::cast(*r.witness) : py::none();
  d["message"] = r.message;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Deterministic simulator for Nezha consensus with deadline-ordered multicast";

  py::register_exception<h::ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<h::ScenarioConfig>(m, "ScenarioConfig")
      .def_readwrite("seed", &h::ScenarioConfig::seed)
      .def_readwrite("f", &h::ScenarioConfig::f)
      .def_readwrite("clients", &h::ScenarioConfig::clients)
      .def_readwrite("proxy_mode", &h::ScenarioConfig::proxy_mode)
      .def_readwrite("commutativity", &h::ScenarioConfig::commutativity)
      .def_property(
          "requests_per_client", [](const h::ScenarioConfig& c) { return c.workload.requests_per_client; },
          [](h::ScenarioConfig& c, uint64_t n) { c.workload.requests_per_client = n; })
      .def_property(
          "trace", [](const h::ScenarioConfig& c) { return c.run.trace; },
          [](h::ScenarioConfig& c, bool t) { c.run.trace = t; })
      .def("replicas", &h::ScenarioConfig::replicas)
      .def("validate", &h::ScenarioConfig::validate);

  py::class_<h::RunResult>(m, "RunResult")
      .def_readonly("seed", &h::RunResult::seed)
      .def_readonly("diagnostic", &h::RunResult::diagnostic)
      .def("ok", &h::RunResult::ok)
      .def_property_readonly("metrics", [](const h::RunResult& r) { return metrics_dict(r.metrics); })
      .def_property_readonly("history", [](const h::RunResult& r) { return history_list(r.history); })
      .def_property_readonly("violations",
                             [](const h::RunResult& r) {
                               py::list out;
                               for (const auto& v : r.violations) out.append(py::make_tuple(v.oracle, v.time, v.detail));
                               return out;
                             })
      .def("history_csv",
           [](const h::RunResult& r) {
             std::ostringstream s;
             h::write_history_csv(s, r.history);
             return s.str();
           })
      .def("metrics_csv",
           [](const h::RunResult& r) {
             std::ostringstream s;
             h::write_metrics_csv(s, r);
             return s.str();
           })
      .def("trace_tsv",
           [](const h::RunResult& r) {
             std::ostringstream s;
             h::write_trace(s, r.trace);
             return s.str();
           })
      .def("write_outputs", [](const h::RunResult& r, const std::string& dir) { h::write_outputs(dir, r); });

  m.def("parse_config", &h::parse_config, py::arg("yaml"));
  m.def("load_config", &h::load_config, py::arg("path"));
  m.def("run_scenario", &h::run_scenario, py::arg("config"), py::call_guard<py::gil_scoped_release>());

  m.def("perfect_network", &h::perfect_network, py::arg("f") = 1, py::arg("proxy_mode") = false,
        py::arg("requests") = 1000, py::arg("seed") = 1);
  m.def("forced_slow_path", &h::forced_slow_path, py::arg("f") = 1, py::arg("proxy_mode") = false,
        py::arg("requests") = 1000, py::arg("seed") = 1);
  m.def("random_safety_scenario", &h::random_safety_scenario, py::arg("seed"));
  m.def(
      "run_stray_schedule",
      [](int f, bool hash_crash_vector, uint64_t seed) {
        const auto o = h::run_stray_schedule(f, hash_crash_vector, seed);
        py::dict d;
        d["commits"] = o.commits;
        d["bounced"] = o.bounced;
        d["ok"] = o.result.ok();
        return d;
      },
      py::arg("f") = 1, py::arg("hash_crash_vector") = true, py::arg("seed") = 1);

  m.def(
      "check_linearizability",
      [](const std::string& history_csv, size_t bound) {
        std::istringstream in(history_csv);
        return lin_dict(h::check_linearizability(h::read_history_csv(in), bound));
      },
      py::arg("history_csv"), py::arg("bound") = 200);

  m.def(
      "reorder_microbench",
      [](int senders, double rate, double duration_ms, bool dom, double percentile, uint64_t seed) {
        h::MicrobenchConfig c;
        c.senders = senders;
        c.rate = rate;
        c.duration = nezha::millis(duration_ms);
        c.link = h::MicrobenchConfig::default_link();
        c.dom = dom;
        c.params.percentile = percentile;
        c.seed = seed;
        const auto r = h::run_reorder_microbench(c);
        py::dict d;
        d["score"] = r.score;
        d["sent"] = r.sent;
        d["received0"] = r.received0;
        d["received1"] = r.received1;
        d["rewritten"] = r.rewritten;
        return d;
      },
      py::arg("senders") = 10, py::arg("rate") = 10000.0, py::arg("duration_ms") = 20.0, py::arg("dom") = false,
      py::arg("percentile") = 50.0, py::arg("seed") = 1);

  m.def(
      "lis_length", [](const std::vector<int64_t>& s) { return nezha::dom::lis_length(s); }, py::arg("seq"));
  m.def(
      "reordering_score",
      [](const std::vector<uint64_t>& ref, const std::vector<uint64_t>& obs) {
        return nezha::dom::reordering_score(ref, obs);
      },
      py::arg("reference"), py::arg("observed"));
}

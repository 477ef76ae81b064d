#include "nezha/harness/microbench.h"

#include <cmath>
#include <memory>
#include <random>

#include "nezha/dom/buffers.h"
#include "nezha/dom/reorder.h"
#include "nezha/sim/simulator.h"

namespace nezha::harness {

sim::LinkModel MicrobenchConfig::default_link() {
  sim::LinkModel m;
  m.base_delay = micros(50);
  m.jitter = sim::jitter::LogNormal{std::log(static_cast<double>(micros(30))), 0.8};
  return m;
}

namespace {

struct Sender {
  NodeId node = 0;
  sim::Engine rng;
  std::vector<dom::OwdWindow> windows;
  RequestId seq = 0;
};

struct Receiver {
  NodeId node = 0;
  dom::EarlyBuffer early;
  DeadlineTuple last = kMinTuple;
  std::vector<uint64_t> order;
  uint64_t gen = 0;
};

class Bench {
 public:
  explicit Bench(const MicrobenchConfig& cfg) : cfg_(cfg), sim_(cfg.seed) {
    for (int i = 0; i < cfg_.senders; ++i) {
      auto s = std::make_unique<Sender>();
      s->node = sim_.add_node("s" + std::to_string(i), cfg_.sender_clock);
      s->rng = sim::make_stream(cfg_.seed, "arrivals/s" + std::to_string(i));
      s->windows.assign(2, dom::OwdWindow(cfg_.params));
      senders_.push_back(std::move(s));
    }
    for (int j = 0; j < 2; ++j) {
      auto r = std::make_unique<Receiver>();
      r->node = sim_.add_node("r" + std::to_string(j), cfg_.receiver_clock);
      receivers_.push_back(std::move(r));
    }
    sim_.set_default_link(cfg_.link);
  }

  MicrobenchResult run() {
    for (auto& s : senders_) next_arrival(*s);
    while (sim_.step()) {
    }
    MicrobenchResult out;
    out.sent = sent_;
    out.received0 = receivers_[0]->order.size();
    out.received1 = receivers_[1]->order.size();
    out.rewritten = rewritten_;
    out.score = dom::reordering_score(receivers_[0]->order, receivers_[1]->order);
    return out;
  }

 private:
  void next_arrival(Sender& s) {
    std::exponential_distribution<double> gap(cfg_.rate / static_cast<double>(kNanosPerSecond));
    const Nanos d = std::max<Nanos>(1, static_cast<Nanos>(gap(s.rng)));
    if (sim_.now() + d >= cfg_.duration) return;
    sim_.schedule_after(d, s.node, "arrival", [this, &s] {
      multicast(s);
      next_arrival(s);
    });
  }

  void multicast(Sender& s) {
    Request r;
    r.client_id = static_cast<ClientId>(s.node);
    r.request_id = ++s.seq;
    r.command = Command::nop();
    r.send_time = sim_.read_clock(s.node);
    if (cfg_.dom) {
      std::vector<Nanos> est;
      for (const auto& w : s.windows) {
        est.push_back(dom::estimate_owd(w, cfg_.sender_clock.sigma_send, cfg_.receiver_clock.sigma_recv));
      }
      r.deadline = dom::make_deadline(r.send_time, est);
    }
    ++sent_;
    for (size_t j = 0; j < receivers_.size(); ++j) {
      Receiver& rcv = *receivers_[j];
      sim_.send(s.node, rcv.node, "msg", [this, &rcv, &s, j, r] { arrive(rcv, s, j, r); });
    }
  }

  void arrive(Receiver& rcv, Sender& s, size_t j, Request r) {
    const uint64_t id = (uint64_t{r.client_id} << 32) | r.request_id;
    if (!cfg_.dom) {
      rcv.order.push_back(id);
      return;
    }
    const Nanos now = sim_.read_clock(rcv.node);
    const Nanos owd = now - r.send_time;
    sim_.send(rcv.node, s.node, "owd", [&s, j, owd] { dom::record_owd_sample(s.windows[j], owd, 0); });
    if (!(rcv.last < r.tuple())) {
      r.deadline = std::max(now, rcv.last.deadline + micros(1));
      ++rewritten_;
    }
    rcv.early.push(r);
    pump(rcv);
  }

  void pump(Receiver& rcv) {
    const Nanos now = sim_.read_clock(rcv.node);
    while (!rcv.early.empty() && rcv.early.top().deadline <= now) {
      const Request r = rcv.early.pop();
      rcv.last = r.tuple();
      rcv.order.push_back((uint64_t{r.client_id} << 32) | r.request_id);
    }
    if (rcv.early.empty()) return;
    const uint64_t gen = ++rcv.gen;
    const Nanos wait = std::max<Nanos>(1, rcv.early.top().deadline - now);
    sim_.schedule_timer(rcv.node, wait, "release", [this, &rcv, gen] {
      if (gen == rcv.gen) pump(rcv);
    });
  }

  MicrobenchConfig cfg_;
  sim::Simulator sim_;
  std::vector<std::unique_ptr<Sender>> senders_;
  std::vector<std::unique_ptr<Receiver>> receivers_;
  uint64_t sent_ = 0;
  uint64_t rewritten_ = 0;
};

}  // namespace

MicrobenchResult run_reorder_microbench(const MicrobenchConfig& cfg) {
  if (cfg.senders < 1) throw std::invalid_argument("microbench needs at least one sender");
  return Bench(cfg).run();
}

std::vector<MicrobenchRow> reorder_sweep(const MicrobenchConfig& base, const std::vector<int>& senders,
                                         const std::vector<double>& rates, const std::vector<double>& percentiles) {
  std::vector<MicrobenchRow> rows;
  for (int n : senders) {
    auto c = base;
    c.senders = n;
    c.dom = false;
    rows.push_back({"senders", static_cast<double>(n), run_reorder_microbench(c).score});
  }
  for (double r : rates) {
    auto c = base;
    c.rate = r;
    c.dom = false;
    rows.push_back({"rate", r, run_reorder_microbench(c).score});
  }
  for (double p : percentiles) {
    auto c = base;
    c.dom = true;
    c.params.percentile = p;
    rows.push_back({"percentile", p, run_reorder_microbench(c).score});
  }
  return rows;
}

}  // namespace nezha::harness

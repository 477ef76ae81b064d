#pragma once

#include <string>
#include <vector>

#include "nezha/dom/owd.h"
#include "nezha/sim/clock.h"
#include "nezha/sim/link.h"

namespace nezha::harness {

// Two receivers, N open-loop Poisson senders multicasting to both.
struct MicrobenchConfig {
  int senders = 10;
  double rate = 10000;  // per sender, msgs/s
  Nanos duration = millis(20);
  sim::LinkModel link;  // every sender -> receiver and feedback link
  // Receivers hold messages until their deadline and rewrite late ones past
  // the last release, as a leader does.
  bool dom = false;
  dom::DomParams params;
  sim::ClockModel sender_clock;
  sim::ClockModel receiver_clock;
  uint64_t seed = 1;

  // 50us base plus lognormal jitter with a 30us median.
  static sim::LinkModel default_link();
};

struct MicrobenchResult {
  // Receiver 1's order scored against receiver 0's.
  double score = 0;
  uint64_t sent = 0;
  uint64_t received0 = 0;
  uint64_t received1 = 0;
  uint64_t rewritten = 0;
};

MicrobenchResult run_reorder_microbench(const MicrobenchConfig& cfg);

struct MicrobenchRow {
  std::string sweep;  // senders | rate | percentile
  double x = 0;
  double score = 0;
};

// Score vs sender count and vs rate without DOM, then vs percentile with DOM.
std::vector<MicrobenchRow> reorder_sweep(const MicrobenchConfig& base, const std::vector<int>& senders,
                                         const std::vector<double>& rates, const std::vector<double>& percentiles);

}  // namespace nezha::harness

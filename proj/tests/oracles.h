#pragma once
// Reference implementations used as test oracles. Each is written directly
// from the rule it checks, independent of the production code path.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "nezha/common/request.h"
#include "nezha/hashing/digest.h"

namespace oracle {

// O(n^2) DP for the longest strictly increasing subsequence.
inline size_t lis_quadratic(const std::vector<int64_t>& s) {
  std::vector<size_t> best(s.size(), 1);
  size_t out = 0;
  for (size_t i = 0; i < s.size(); ++i) {
    for (size_t j = 0; j < i; ++j) {
      if (s[j] < s[i]) best[i] = std::max(best[i], best[j] + 1);
    }
    out = std::max(out, best[i]);
  }
  return out;
}

// Zipf over ranks 0..n-1 drawn by inverting the CDF with a uniform variate.
class InverseCdfZipf {
 public:
  InverseCdfZipf(uint32_t n, double s) : cdf_(n) {
    double acc = 0;
    for (uint32_t k = 0; k < n; ++k) {
      acc += 1.0 / std::pow(static_cast<double>(k + 1), s);
      cdf_[k] = acc;
    }
    for (auto& c : cdf_) c /= acc;
  }
  template <class G>
  uint32_t operator()(G& g) {
    const double u = std::uniform_real_distribution<double>(0, 1)(g);
    return static_cast<uint32_t>(std::lower_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
  }

 private:
  std::vector<double> cdf_;
};

inline double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  double d = 0;
  for (size_t i = 0; i < p.size(); ++i) d += std::abs(p[i] - q[i]);
  return d / 2;
}

// Per-replica state for the quorum evaluator.
struct ReplyState {
  enum Fast { None, Match, Mismatch } fast = None;
  bool slow = false;
};

// Fast fires iff the leader has a fast reply and some set of followers of size
// f + ceil(f/2) all carry a matching fast reply or a slow reply.
inline bool brute_fast(const std::vector<ReplyState>& rs, size_t leader, int f) {
  if (rs[leader].fast == ReplyState::None) return false;
  std::vector<size_t> followers;
  for (size_t i = 0; i < rs.size(); ++i)
    if (i != leader) followers.push_back(i);
  const int need = f + (f + 1) / 2;
  for (uint32_t mask = 0; mask < (1u << followers.size()); ++mask) {
    if (std::popcount(mask) != need) continue;
    bool all = true;
    for (size_t b = 0; b < followers.size(); ++b) {
      if (!(mask >> b & 1)) continue;
      const auto& r = rs[followers[b]];
      all = all && (r.slow || r.fast == ReplyState::Match);
    }
    if (all) return true;
  }
  return false;
}

inline bool brute_slow(const std::vector<ReplyState>& rs, size_t leader, int f) {
  if (rs[leader].fast == ReplyState::None) return false;
  int slow = 0;
  for (size_t i = 0; i < rs.size(); ++i) slow += (i != leader && rs[i].slow);
  return slow >= f;
}

struct MergeInput {
  uint64_t last_normal_view = 0;
  std::vector<nezha::DeadlineTuple> log;
  size_t sync_point = 0;
};

// Rule evaluator for the log merge without commutativity.
inline std::vector<nezha::DeadlineTuple> brute_merge(const std::vector<MergeInput>& msgs, int f) {
  uint64_t top = 0;
  for (const auto& m : msgs) top = std::max(top, m.last_normal_view);
  std::vector<const MergeInput*> kept;
  for (const auto& m : msgs)
    if (m.last_normal_view == top) kept.push_back(&m);
  const MergeInput* base = kept[0];
  for (const auto* m : kept)
    if (m->sync_point > base->sync_point) base = m;
  std::vector<nezha::DeadlineTuple> prefix(base->log.begin(), base->log.begin() + static_cast<long>(base->sync_point));
  std::set<nezha::DeadlineTuple> out(prefix.begin(), prefix.end());
  const int need = (f + 1) / 2 + 1;
  std::set<nezha::DeadlineTuple> all;
  for (const auto* m : kept) all.insert(m->log.begin(), m->log.end());
  for (const auto& t : all) {
    if (out.count(t) || (!prefix.empty() && !(t > prefix.back()))) continue;
    int n = 0;
    for (const auto* m : kept) n += std::count(m->log.begin(), m->log.end(), t) > 0;
    if (n >= need) out.insert(t);
  }
  return {out.begin(), out.end()};
}

// From-scratch XOR of entry digests.
inline nezha::hashing::Digest160 scratch_hash(const std::vector<nezha::DeadlineTuple>& entries) {
  nezha::hashing::Digest160 d;
  for (const auto& t : entries) d ^= nezha::hashing::entry_digest(t.deadline, t.client_id, t.request_id);
  return d;
}

}  // namespace oracle

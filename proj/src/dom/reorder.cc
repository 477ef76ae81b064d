#include "nezha/dom/reorder.h"

#include <algorithm>
#include <unordered_map>
#include <vector>

namespace nezha::dom {

size_t lis_length(std::span<const int64_t> seq) {
  // Patience sorting; tails[i] is the smallest tail of an increasing run of length i+1.
  std::vector<int64_t> tails;
  for (int64_t x : seq) {
    auto it = std::lower_bound(tails.begin(), tails.end(), x);
    if (it == tails.end()) tails.push_back(x);
    else *it = x;
  }
  return tails.size();
}

double reordering_score(std::span<const uint64_t> reference, std::span<const uint64_t> observed) {
  if (observed.empty()) return 0.0;
  std::unordered_map<uint64_t, int64_t> rank;
  rank.reserve(reference.size());
  for (size_t i = 0; i < reference.size(); ++i) rank.try_emplace(reference[i], static_cast<int64_t>(i));
  std::vector<int64_t> ranked;
  ranked.reserve(observed.size());
  for (uint64_t id : observed) {
    auto it = rank.find(id);
    if (it != rank.end()) ranked.push_back(it->second);
  }
  const double lis = static_cast<double>(lis_length(ranked));
  return (1.0 - lis / static_cast<double>(observed.size())) * 100.0;
}

}  // namespace nezha::dom

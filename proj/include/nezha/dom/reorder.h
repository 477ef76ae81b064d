#pragma once

#include <cstdint>
#include <span>

namespace nezha::dom {

// Length of the longest strictly increasing subsequence.
size_t lis_length(std::span<const int64_t> seq);

// (1 - LIS/len) * 100 over `observed` ranked by position in `reference`.
// Ids missing from the reference count toward the length only.
double reordering_score(std::span<const uint64_t> reference, std::span<const uint64_t> observed);

}  // namespace nezha::dom

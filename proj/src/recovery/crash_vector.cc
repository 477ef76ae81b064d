#include "nezha/recovery/crash_vector.h"

#include <algorithm>
#include <stdexcept>

namespace nezha::recovery {

CrashVector aggregate_cv(std::span<const CrashVector> vectors) {
  if (vectors.empty()) throw std::invalid_argument("aggregate_cv of an empty set");
  CrashVector out(vectors.front().size(), 0);
  for (const auto& v : vectors) {
    if (v.size() != out.size()) throw std::invalid_argument("crash-vector length mismatch");
    for (size_t i = 0; i < v.size(); ++i) out[i] = std::max(out[i], v[i]);
  }
  return out;
}

CrashVector aggregate_cv(const CrashVector& a, const CrashVector& b) {
  const CrashVector both[] = {a, b};
  return aggregate_cv(both);
}

CvCheck check_crash_vector(ReplicaId sender, const CrashVector& msg_cv, CrashVector& local) {
  if (msg_cv.size() != local.size()) throw std::invalid_argument("crash-vector length mismatch");
  if (is_stray(sender, msg_cv, local)) return CvCheck::Stray;
  local = aggregate_cv(local, msg_cv);
  return CvCheck::Accept;
}

}  // namespace nezha::recovery

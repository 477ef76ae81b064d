#include "nezha/replica/messages.h"

#include <sstream>

namespace nezha::replica {

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string cv_str(const CrashVector& cv) {
  std::string s = "[";
  for (size_t i = 0; i < cv.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(cv[i]);
  }
  return s + "]";
}
}  // namespace

const char* message_kind(const Message& m) {
  static const char* kNames[] = {"client_request",   "client_reply",     "request",       "fast_reply",
                                 "slow_reply",       "sync",             "log_status",    "sync_request",
                                 "fetch_req",        "fetch_rep",        "crash_vector_req", "crash_vector_rep",
                                 "recovery_req",     "recovery_rep",     "state_transfer_req", "state_transfer_rep",
                                 "view_change_req",  "view_change",      "start_view"};
  return kNames[m.index()];
}

std::string describe(const Message& m) {
  std::ostringstream s;
  std::visit(overloaded{
                 [&](const ClientRequest& x) { s << "c=" << x.client_id << " r=" << x.request_id << " cmd=" << x.command.to_string(); },
                 [&](const ClientReply& x) {
                   s << "c=" << x.client_id << " r=" << x.request_id << " path=" << (x.path == CommitPath::Fast ? "fast" : "slow")
                     << " view=" << x.view << " result=" << x.result.to_string();
                 },
                 [&](const RequestMsg& x) {
                   s << "c=" << x.request.client_id << " r=" << x.request.request_id << " s=" << x.request.send_time
                     << " d=" << x.request.deadline;
                 },
                 [&](const FastReply& x) {
                   s << "view=" << x.view << " rep=" << x.replica << " c=" << x.client_id << " r=" << x.request_id
                     << " d=" << x.deadline << " hash=" << x.hash.hex().substr(0, 12) << (x.result ? " leader" : "");
                 },
                 [&](const SlowReply& x) { s << "view=" << x.view << " rep=" << x.replica << " c=" << x.client_id << " r=" << x.request_id; },
                 [&](const SyncMsg& x) {
                   s << "view=" << x.view << " cp=" << x.commit_point << " len=" << x.leader_log_len << " n=" << x.entries.size();
                   if (!x.entries.empty()) s << " first=" << x.entries.front().log_id;
                 },
                 [&](const LogStatus& x) { s << "view=" << x.view << " rep=" << x.replica << " sp=" << x.sync_point; },
                 [&](const SyncRequest& x) { s << "view=" << x.view << " rep=" << x.replica << " from=" << x.from; },
                 [&](const FetchReq& x) { s << "view=" << x.view << " rep=" << x.replica << " id=" << x.log_id; },
                 [&](const FetchRep& x) { s << "view=" << x.view << " id=" << x.log_id; },
                 [&](const CrashVectorReq& x) { s << "rep=" << x.replica; },
                 [&](const CrashVectorRep& x) { s << "rep=" << x.replica << " cv=" << cv_str(x.cv); },
                 [&](const RecoveryReq& x) { s << "rep=" << x.replica << " cv=" << cv_str(x.cv); },
                 [&](const RecoveryRep& x) { s << "rep=" << x.replica << " view=" << x.view << " cv=" << cv_str(x.cv); },
                 [&](const StateTransferReq& x) { s << "rep=" << x.replica << " keep=" << x.keep << " cv=" << cv_str(x.cv); },
                 [&](const StateTransferRep& x) {
                   s << "rep=" << x.replica << " view=" << x.view << " keep=" << x.keep << " n=" << x.log.size() << " sp=" << x.sync_point;
                 },
                 [&](const ViewChangeReq& x) { s << "rep=" << x.replica << " view=" << x.view << " cv=" << cv_str(x.cv); },
                 [&](const ViewChange& x) {
                   s << "rep=" << x.replica << " view=" << x.view << " lnv=" << x.last_normal_view << " n=" << x.log.size()
                     << " sp=" << x.sync_point;
                 },
                 [&](const StartView& x) { s << "rep=" << x.replica << " view=" << x.view << " n=" << x.log.size(); },
             },
             m);
  return s.str();
}

}  // namespace nezha::replica

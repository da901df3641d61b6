#include "eovsim/world_state.hpp"

#include <stdexcept>

namespace eovsim {

const char* to_string(TxStatus s) {
  switch (s) {
    case TxStatus::kUnset: return "UNSET";
    case TxStatus::kSuccess: return "SUCCESS";
    case TxStatus::kEndorsementPolicyFailure: return "ENDORSEMENT_POLICY_FAILURE";
    case TxStatus::kMvccIntraBlock: return "MVCC_INTRA_BLOCK";
    case TxStatus::kMvccInterBlock: return "MVCC_INTER_BLOCK";
    case TxStatus::kPhantomRead: return "PHANTOM_READ";
    case TxStatus::kEarlyAbortReorder: return "EARLY_ABORT_REORDER";
  }
  return "UNSET";
}

TxStatus tx_status_from_string(const std::string& s) {
  if (s == "UNSET") return TxStatus::kUnset;
  if (s == "SUCCESS") return TxStatus::kSuccess;
  if (s == "ENDORSEMENT_POLICY_FAILURE") return TxStatus::kEndorsementPolicyFailure;
  if (s == "MVCC_INTRA_BLOCK") return TxStatus::kMvccIntraBlock;
  if (s == "MVCC_INTER_BLOCK") return TxStatus::kMvccInterBlock;
  if (s == "PHANTOM_READ") return TxStatus::kPhantomRead;
  if (s == "EARLY_ABORT_REORDER") return TxStatus::kEarlyAbortReorder;
  throw std::invalid_argument("unknown tx status: " + s);
}

const char* to_string(CutReason r) {
  switch (r) {
    case CutReason::kCount: return "COUNT";
    case CutReason::kTimeout: return "TIMEOUT";
    case CutReason::kBytes: return "BYTES";
    case CutReason::kStream: return "STREAM";
  }
  return "COUNT";
}

CutReason cut_reason_from_string(const std::string& s) {
  if (s == "COUNT") return CutReason::kCount;
  if (s == "TIMEOUT") return CutReason::kTimeout;
  if (s == "BYTES") return CutReason::kBytes;
  if (s == "STREAM") return CutReason::kStream;
  throw std::invalid_argument("unknown cut reason: " + s);
}

uint64_t tx_byte_size(const Transaction& tx, const SizeModel& m) {
  if (tx.endorsements.empty())
    throw std::invalid_argument("tx_byte_size: transaction has no endorsements");
  const Endorsement& e = tx.endorsements.front();
  uint64_t observed = 0;
  for (const RangeRead& rr : e.range_reads) observed += rr.observed.size();
  return m.header_bytes + uint64_t{m.per_read_bytes} * e.read_set.size() +
         uint64_t{m.per_write_bytes} * e.write_set.size() +
         uint64_t{m.per_range_observed_bytes} * observed;
}

void WorldState::init_put(const Key& key, std::string value) {
  entries_[key] = VersionedEntry{1, std::move(value), std::nullopt};
}

std::optional<VersionedEntry> WorldState::read(const Key& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::vector<ReadEntry> WorldState::range(const Key& start, const Key& end) const {
  if (start > end) throw std::invalid_argument("MALFORMED_RANGE: start > end");
  std::vector<ReadEntry> out;
  for (auto it = entries_.lower_bound(start); it != entries_.end() && it->first <= end; ++it)
    out.push_back(ReadEntry{it->first, it->second.version});
  return out;
}

void WorldState::apply(const WriteSet& ws, const WriterLoc& writer) {
  for (const WriteEntry& w : ws) {
    if (w.is_delete) {
      entries_.erase(w.key);
      tombstones_[w.key] = writer;
      continue;
    }
    auto it = entries_.find(w.key);
    if (it == entries_.end()) {
      entries_[w.key] = VersionedEntry{1, w.value, writer};
      tombstones_.erase(w.key);
    } else {
      it->second.version += 1;
      it->second.value = w.value;
      it->second.last_writer = writer;
    }
  }
}

std::optional<WriterLoc> WorldState::tombstone(const Key& key) const {
  auto it = tombstones_.find(key);
  if (it == tombstones_.end()) return std::nullopt;
  return it->second;
}

}  // namespace eovsim

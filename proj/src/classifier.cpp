#include "eovsim/classifier.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace eovsim {

using json = nlohmann::ordered_json;

FailureRecord classify_endorsement(uint64_t tx_id,
                                   const std::vector<Endorsement>& endorsements) {
  FailureRecord rec;
  rec.tx_id = tx_id;
  rec.status = TxStatus::kEndorsementPolicyFailure;
  // Scan org pairs in ascending order; within a pair walk the first
  // endorsement's read set and report the first version disagreement.
  std::vector<size_t> idx(endorsements.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
    return endorsements[a].org < endorsements[b].org;
  });
  for (size_t a = 0; a < idx.size(); ++a) {
    for (size_t b = a + 1; b < idx.size(); ++b) {
      const Endorsement& ea = endorsements[idx[a]];
      const Endorsement& eb = endorsements[idx[b]];
      for (const ReadEntry& r : ea.read_set) {
        for (const ReadEntry& s : eb.read_set) {
          if (s.key == r.key && s.version != r.version) {
            rec.key = r.key;
            rec.endorser_orgs = {ea.org, eb.org};
            return rec;
          }
        }
      }
    }
  }
  return rec;  // non-version cause; key stays empty
}

std::optional<StaleRead> first_stale_read(const ReadSet& reads, const WorldState& state) {
  for (const ReadEntry& r : reads) {
    auto cur = state.read(r.key);
    uint64_t cur_version = cur ? cur->version : 0;
    if (cur_version == r.version) continue;
    StaleRead out;
    out.key = r.key;
    out.writer = cur ? cur->last_writer : state.tombstone(r.key);
    return out;
  }
  return std::nullopt;
}

std::optional<StaleRead> first_phantom(const std::vector<RangeRead>& ranges,
                                       const WorldState& state) {
  for (const RangeRead& rr : ranges) {
    if (!rr.phantom_detected) continue;
    std::vector<ReadEntry> now = state.range(rr.start_key, rr.end_key);
    size_t i = 0, j = 0;
    while (i < rr.observed.size() || j < now.size()) {
      if (i < rr.observed.size() && j < now.size()) {
        const ReadEntry& a = rr.observed[i];
        const ReadEntry& b = now[j];
        if (a.key == b.key) {
          if (a.version != b.version) {
            StaleRead out;
            out.key = a.key;
            auto cur = state.read(a.key);
            out.writer = cur ? cur->last_writer : std::nullopt;
            return out;
          }
          ++i;
          ++j;
          continue;
        }
        if (a.key < b.key) {
          // observed key vanished from the range
          StaleRead out;
          out.key = a.key;
          out.writer = state.tombstone(a.key);
          return out;
        }
        // new key appeared inside the range
        StaleRead out;
        out.key = b.key;
        auto cur = state.read(b.key);
        out.writer = cur ? cur->last_writer : std::nullopt;
        return out;
      }
      if (i < rr.observed.size()) {
        StaleRead out;
        out.key = rr.observed[i].key;
        out.writer = state.tombstone(rr.observed[i].key);
        return out;
      }
      StaleRead out;
      out.key = now[j].key;
      auto cur = state.read(now[j].key);
      out.writer = cur ? cur->last_writer : std::nullopt;
      return out;
    }
  }
  return std::nullopt;
}

// ---- trace io ----

namespace {

json tx_to_json(const Transaction& tx) {
  json j;
  j["id"] = tx.id;
  j["fn"] = tx.chaincode_function;
  j["status"] = to_string(tx.final_status);
  if (!tx.conflict_key.empty()) j["conflict_key"] = tx.conflict_key;
  if (tx.conflict_writer)
    j["writer"] = json{{"h", tx.conflict_writer->block_height},
                       {"i", tx.conflict_writer->tx_index}};
  j["submit_ms"] = tx.submit_ms;
  j["commit_ms"] = tx.commit_ms;
  return j;
}

}  // namespace

void write_trace(std::ostream& os, const std::vector<Block>& ledger) {
  for (const Block& b : ledger) {
    json j;
    j["height"] = b.height;
    j["cut_reason"] = to_string(b.cut_reason);
    j["cut_time_ms"] = b.cut_time_ms;
    json txs = json::array();
    for (const Transaction& tx : b.txs) txs.push_back(tx_to_json(tx));
    j["txs"] = std::move(txs);
    os << j.dump() << "\n";
  }
}

std::string trace_to_string(const std::vector<Block>& ledger) {
  std::ostringstream os;
  write_trace(os, ledger);
  return os.str();
}

std::vector<Block> parse_trace(std::istream& is) {
  std::vector<Block> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw TraceError(line_no, e.what());
    }
    try {
      if (!j.contains("height") || !j.contains("cut_reason") || !j.contains("cut_time_ms") ||
          !j.contains("txs"))
        throw TraceError(line_no, "missing block field");
      Block b;
      b.height = j["height"].get<uint64_t>();
      b.cut_reason = cut_reason_from_string(j["cut_reason"].get<std::string>());
      b.cut_time_ms = j["cut_time_ms"].get<double>();
      for (const json& t : j["txs"]) {
        if (!t.contains("id") || !t.contains("fn") || !t.contains("status") ||
            !t.contains("submit_ms") || !t.contains("commit_ms"))
          throw TraceError(line_no, "missing tx field");
        Transaction tx;
        tx.id = t["id"].get<uint64_t>();
        tx.chaincode_function = t["fn"].get<std::string>();
        tx.final_status = tx_status_from_string(t["status"].get<std::string>());
        if (t.contains("conflict_key")) tx.conflict_key = t["conflict_key"].get<std::string>();
        if (t.contains("writer"))
          tx.conflict_writer =
              WriterLoc{t["writer"]["h"].get<uint64_t>(), t["writer"]["i"].get<uint32_t>()};
        tx.submit_ms = t["submit_ms"].get<double>();
        tx.commit_ms = t["commit_ms"].get<double>();
        b.txs.push_back(std::move(tx));
      }
      out.push_back(std::move(b));
    } catch (const TraceError&) {
      throw;
    } catch (const std::exception& e) {
      throw TraceError(line_no, e.what());
    }
  }
  return out;
}

LedgerStats compute_stats(const std::vector<Block>& ledger) {
  LedgerStats s;
  for (const Block& b : ledger) {
    ++s.blocks;
    ++s.by_cut_reason[to_string(b.cut_reason)];
    for (const Transaction& tx : b.txs) {
      ++s.total_txs;
      switch (tx.final_status) {
        case TxStatus::kSuccess: ++s.success; break;
        case TxStatus::kEndorsementPolicyFailure: ++s.endorsement_failures; break;
        case TxStatus::kMvccIntraBlock: ++s.mvcc_intra; break;
        case TxStatus::kMvccInterBlock: ++s.mvcc_inter; break;
        case TxStatus::kPhantomRead: ++s.phantom; break;
        case TxStatus::kEarlyAbortReorder: ++s.early_aborts; break;
        case TxStatus::kUnset: break;
      }
    }
  }
  return s;
}

LedgerStats parse_ledger(std::istream& is) { return compute_stats(parse_trace(is)); }

}  // namespace eovsim

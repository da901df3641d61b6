#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eovsim/types.hpp"
#include "eovsim/world_state.hpp"

namespace eovsim {

// One classified abort. Endorsement failures carry the first diverging
// endorser pair; MVCC and phantom failures carry the conflicting key and,
// when attributable, the committed writer's location.
struct FailureRecord {
  uint64_t tx_id = 0;
  TxStatus status = TxStatus::kUnset;
  Key key;  // empty when no single key is responsible
  std::optional<WriterLoc> writer;
  std::optional<std::pair<uint32_t, uint32_t>> endorser_orgs;
  double detected_ms = 0.0;
};

// Builds the record for a transaction whose endorsements satisfy no policy
// subset: the first read key two endorsing orgs version-disagree on, in
// (org pair, read-set order) scan order. Key stays empty when the failure
// has a non-version cause (e.g. too few orgs).
FailureRecord classify_endorsement(uint64_t tx_id,
                                   const std::vector<Endorsement>& endorsements);

// First point read whose endorsed version differs from the live state;
// returns the key plus the committed writer (from the entry or the delete
// tombstone). The caller labels intra vs inter by the writer's height.
struct StaleRead {
  Key key;
  std::optional<WriterLoc> writer;
};
std::optional<StaleRead> first_stale_read(const ReadSet& reads, const WorldState& state);

// Re-executes phantom-detected ranges and reports the first key whose
// membership or version changed, with the responsible writer if known.
std::optional<StaleRead> first_phantom(const std::vector<RangeRead>& ranges,
                                       const WorldState& state);

// ---- ledger trace (line-delimited, one JSON object per block) ----

struct TraceError : std::runtime_error {
  TraceError(size_t line_no, const std::string& what)
      : std::runtime_error("MALFORMED_TRACE at line " + std::to_string(line_no) + ": " +
                           what),
        line(line_no) {}
  size_t line;
};

void write_trace(std::ostream& os, const std::vector<Block>& ledger);
std::string trace_to_string(const std::vector<Block>& ledger);

// Parses a trace; transactions carry id/fn/status/conflict info/timestamps
// only (no endorsements). Throws TraceError with the offending line.
std::vector<Block> parse_trace(std::istream& is);

struct LedgerStats {
  uint64_t blocks = 0;
  uint64_t total_txs = 0;  // transactions recorded in the ledger
  uint64_t success = 0;
  uint64_t endorsement_failures = 0;
  uint64_t mvcc_intra = 0;
  uint64_t mvcc_inter = 0;
  uint64_t phantom = 0;
  uint64_t early_aborts = 0;  // reorder aborts recorded in blocks
  std::map<std::string, uint64_t> by_cut_reason;

  double pct(uint64_t count) const {
    return total_txs == 0 ? 0.0 : 100.0 * static_cast<double>(count) /
                                       static_cast<double>(total_txs);
  }
  double failure_pct() const { return pct(total_txs - success); }
};

LedgerStats compute_stats(const std::vector<Block>& ledger);
LedgerStats parse_ledger(std::istream& is);

}  // namespace eovsim

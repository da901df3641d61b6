#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Core value types shared across the simulator: versioned world-state entries,
// read/write sets, endorsements, transactions and blocks.

namespace eovsim {

using Key = std::string;  // ordered lexicographically everywhere

// Location of the committed transaction that last wrote a key.
struct WriterLoc {
  uint64_t block_height = 0;
  uint32_t tx_index = 0;

  bool operator==(const WriterLoc&) const = default;
};

struct VersionedEntry {
  uint64_t version = 0;  // starts at 1 on first commit, +1 per committed write
  std::string value;
  std::optional<WriterLoc> last_writer;  // nullopt only for genesis population
};

// A read observed at endorsement time. version == 0 encodes "key was absent".
struct ReadEntry {
  Key key;
  uint64_t version = 0;

  bool operator==(const ReadEntry&) const = default;
};

using ReadSet = std::vector<ReadEntry>;

struct WriteEntry {
  Key key;
  std::string value;
  bool is_delete = false;

  bool operator==(const WriteEntry&) const = default;
};

using WriteSet = std::vector<WriteEntry>;

// A range scan [start_key, end_key] (inclusive) observed at endorsement time.
// phantom_detected mirrors chaincodes that skip result re-validation: when
// false the commit-time re-execution is skipped and the range can never fail.
struct RangeRead {
  Key start_key;
  Key end_key;
  std::vector<ReadEntry> observed;
  bool phantom_detected = true;

  bool operator==(const RangeRead&) const = default;
};

enum class OpKind { kRead, kWrite, kDelete, kRange };

// One operation of a transaction intent, with concrete keys chosen by the
// workload generator. Ranges carry [key, end_key]; writes carry a value.
struct IntentOp {
  OpKind kind = OpKind::kRead;
  Key key;
  Key end_key;        // kRange only
  std::string value;  // kWrite only
  bool phantom_detected = true;  // kRange only
};

enum class TxStatus {
  kUnset,
  kSuccess,
  kEndorsementPolicyFailure,
  kMvccIntraBlock,
  kMvccInterBlock,
  kPhantomRead,
  kEarlyAbortReorder,
};

const char* to_string(TxStatus s);
TxStatus tx_status_from_string(const std::string& s);

struct Endorsement {
  uint32_t org = 0;
  uint32_t peer = 0;  // peer index within the org
  ReadSet read_set;
  std::vector<RangeRead> range_reads;
  WriteSet write_set;
  double endorse_ms = 0.0;  // when the endorsing peer finished simulating
};

struct Transaction {
  uint64_t id = 0;
  double submit_ms = 0.0;
  std::string chaincode_function;
  std::vector<IntentOp> intent;
  std::vector<Endorsement> endorsements;
  TxStatus final_status = TxStatus::kUnset;
  double commit_ms = 0.0;  // ledger append at the reference peer
  Key conflict_key;        // first key that explains a failure, if any
  std::optional<WriterLoc> conflict_writer;
};

enum class CutReason { kCount, kTimeout, kBytes, kStream };

const char* to_string(CutReason r);
CutReason cut_reason_from_string(const std::string& s);

struct Block {
  uint64_t height = 0;  // genesis is 0, first real block is 1
  CutReason cut_reason = CutReason::kCount;
  double cut_time_ms = 0.0;
  std::vector<Transaction> txs;
};

// Byte-size model used for BYTES block cutting.
struct SizeModel {
  uint32_t header_bytes = 256;
  uint32_t per_read_bytes = 64;
  uint32_t per_write_bytes = 128;
  uint32_t per_range_observed_bytes = 64;
};

// Serialized size of a transaction under the size model. Uses the first
// endorsement as the canonical payload; requires at least one endorsement.
uint64_t tx_byte_size(const Transaction& tx, const SizeModel& m);

// Raised for rejected run configurations (exit code 2 at the CLI).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace eovsim

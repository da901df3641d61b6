#pragma once

#include <map>
#include <optional>

#include "eovsim/types.hpp"

namespace eovsim {

// One peer's versioned key-value store. Reads and range scans return what a
// chaincode would observe at endorsement time; apply() commits a validated
// write set. Deleted keys leave a tombstone so later conflicts can still be
// attributed to the deleting transaction.
class WorldState {
 public:
  // Genesis population: version 1, no last_writer.
  void init_put(const Key& key, std::string value);

  std::optional<VersionedEntry> read(const Key& key) const;

  // Inclusive scan of live keys in [start, end]. Throws std::invalid_argument
  // ("MALFORMED_RANGE") if start > end. Empty result is fine.
  std::vector<ReadEntry> range(const Key& start, const Key& end) const;

  // Commits a write set in order. New keys start at version 1, existing keys
  // bump by exactly 1, deletes remove the key and record the writer.
  void apply(const WriteSet& ws, const WriterLoc& writer);

  // Writer of the transaction that deleted the key, if it is gone.
  std::optional<WriterLoc> tombstone(const Key& key) const;

  size_t size() const { return entries_.size(); }
  const std::map<Key, VersionedEntry>& entries() const { return entries_; }

 private:
  std::map<Key, VersionedEntry> entries_;
  std::map<Key, WriterLoc> tombstones_;
};

}  // namespace eovsim

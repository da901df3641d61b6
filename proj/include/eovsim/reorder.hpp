#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "eovsim/types.hpp"
#include "eovsim/world_state.hpp"

namespace eovsim {

// Read/write key footprint of one transaction, as used for dependency
// analysis. Ranges conflict with any write inside [start, end], and their
// observed size contributes to the reorder cost estimate.
struct TxFootprint {
  uint64_t tx_id = 0;
  std::vector<Key> reads;   // point-read keys
  std::vector<Key> writes;  // written or deleted keys
  std::vector<std::pair<Key, Key>> read_ranges;  // inclusive [start, end]
  size_t expanded_keys = 0;  // reads + writes + observed range sizes

  bool reads_key(const Key& k) const;
  bool writes_key(const Key& k) const;
};

TxFootprint footprint_of(uint64_t tx_id, const ReadSet& rs,
                         const std::vector<RangeRead>& ranges, const WriteSet& ws);

// Dependency graph over one block. adj[w] holds the readers of keys written
// by w; each such edge means the reader endorsed against pre-block state and
// must be scheduled before that writer.
struct ConflictGraph {
  size_t n = 0;
  std::vector<std::vector<uint32_t>> adj;  // writer -> readers
  size_t edge_count = 0;

  bool has_edge(uint32_t writer, uint32_t reader) const;
};

ConflictGraph build_conflict_graph(const std::vector<TxFootprint>& txs);

// Strongly connected components with more than one node (there are no
// self-edges). Each component is sorted ascending; components are returned
// in a deterministic order.
std::vector<std::vector<uint32_t>> find_cycles(const ConflictGraph& g);

// Greedy minimum-feedback-vertex-set approximation: repeatedly remove the
// node with the largest in-degree * out-degree inside a still-cyclic SCC
// (ties: lowest tx id) until the graph is acyclic. Returns removed nodes.
std::vector<uint32_t> greedy_mfvs(const ConflictGraph& g,
                                  const std::vector<uint64_t>& tx_ids);

struct ReorderOutcome {
  std::vector<uint32_t> order;    // surviving tx indices, serialized
  std::vector<uint32_t> aborted;  // removed to break cycles
  double cost_ms = 0.0;
};

struct ReorderCostModel {
  double graph_coeff_ms = 4.0e-5;  // * n^2 * mean keys per tx
  double sort_coeff_ms = 1.0e-3;   // * (n + edges)
};

// Block reordering: breaks cycles via greedy_mfvs, then serializes survivors
// so every reader precedes the writers of its keys (topological order, ties
// by ascending tx id).
ReorderOutcome reorder_block(const std::vector<TxFootprint>& txs,
                             const ReorderCostModel& cost);

// Orderer-side admission control that only lets a transaction into the
// pending batch when it is still serializable: its read versions must match
// the post-last-block state, and its dependency edges against the pending
// batch must not close a cycle. Admitted batches serialize cleanly, so
// validation can only fail on endorsement policy checks.
class SharpAdmission {
 public:
  struct Rejection {
    Key key;  // stale or cycle-closing key (may be empty for cycles)
    std::optional<WriterLoc> writer;
    bool stale = false;  // true: version behind committed state; false: cycle
  };

  // committed must outlive the tracker and reflect all cut blocks.
  explicit SharpAdmission(const WorldState& committed) : committed_(&committed) {}

  // nullopt = admitted (footprint joins the pending batch).
  std::optional<Rejection> admit(const TxFootprint& fp, const ReadSet& reads);

  // Serialized order of the pending batch (readers first); clears the batch.
  std::vector<uint32_t> cut();

  size_t pending() const { return batch_.size(); }

 private:
  const WorldState* committed_;
  std::vector<TxFootprint> batch_;
  std::vector<std::vector<uint32_t>> succ_;  // precedence edges (a before b)
};

}  // namespace eovsim

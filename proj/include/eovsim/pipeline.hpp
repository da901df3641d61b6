#pragma once

#include <cstdint>
#include <vector>

#include "eovsim/chaincode.hpp"
#include "eovsim/classifier.hpp"
#include "eovsim/sim_config.hpp"
#include "eovsim/workload.hpp"

namespace eovsim {

// End-of-run counters and rates. The six status counters cover every
// submitted transaction: ledger statuses plus FABRICSHARP admission rejects
// (which never reach a block) always sum to total_submitted.
struct Metrics {
  uint64_t total_submitted = 0;
  uint64_t blocks = 0;
  uint64_t success = 0;
  uint64_t endorsement_failures = 0;
  uint64_t mvcc_intra = 0;
  uint64_t mvcc_inter = 0;
  uint64_t phantom = 0;
  uint64_t early_aborts = 0;          // reorder aborts plus admission rejects
  double avg_total_latency_ms = 0.0;  // submit to reference-peer commit
  double committed_tps = 0.0;         // ledger txs per simulated second
  uint64_t orderer_queue_at_end = 0;  // pending txs when the run's duration elapsed
};

struct SimulationResult {
  std::vector<Block> ledger;  // full transactions, endorsements included
  Metrics metrics;
  std::vector<FailureRecord> failures;  // one per non-SUCCESS transaction
  uint64_t event_count = 0;
  uint64_t seed = 0;
};

// Runs the execute-order-validate simulation over a fixed intent list.
// duration_ms bounds submissions and places the queue-length sample; events
// already in flight drain past it so every transaction reaches a terminal
// status. Deterministic for fixed (config, profile, intents). Throws
// ConfigError with a CONFIG_INVALID message for rejected configurations,
// e.g. FABRICSHARP with a range-reading workload.
SimulationResult run(const SimConfig& cfg, const ChaincodeProfile& profile,
                     const std::vector<TxIntent>& intents, double duration_ms);

// Generates the intent stream from the workload spec, then runs.
SimulationResult run(const SimConfig& cfg, const ChaincodeProfile& profile,
                     const WorkloadSpec& wl);
SimulationResult run(const SimConfig& cfg, const WorkloadSpec& wl);

}  // namespace eovsim

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eovsim/policy.hpp"
#include "eovsim/reorder.hpp"
#include "eovsim/types.hpp"
#include "eovsim/workload.hpp"

namespace eovsim {

enum class Mode { kBaseline, kFabricpp, kStreamchain, kFabricsharp };
enum class DbKind { kLevelDb, kCouchDb };

const char* to_string(Mode m);
Mode mode_from_string(const std::string& s);
const char* to_string(DbKind k);
DbKind db_kind_from_string(const std::string& s);

// Measured per-call state database latencies.
struct DbCostModel {
  double get_ms = 0.0;
  double put_ms = 0.0;
  double get_range_ms = 0.0;  // flat per scan
  double delete_ms = 0.0;
};

DbCostModel couchdb_costs();  // 8.3 / 0.8 / 88 / 1.2
DbCostModel leveldb_costs();  // 0.6 / 0.5 / 1.4 / 0.6

struct OrgDelay {
  double mean_ms = 0.0;
  double jitter_ms = 0.0;  // uniform in [mean - jitter, mean + jitter]
};

struct NetworkModel {
  double client_peer_ms = 1.0;
  double client_orderer_ms = 1.0;
  double orderer_peer_ms = 1.0;
  std::vector<OrgDelay> org_extra;  // indexed by org; missing entries are 0
};

// Delay between a peer finishing validation and its world state reflecting
// the block's writes. Scaled by the database's put cost (LevelDB reference)
// and halved when the ledger sits on a RAM disk.
struct CommitLagModel {
  bool enabled = true;
  double min_ms = 2.0;
  double max_ms = 20.0;
};

struct SimConfig {
  Mode mode = Mode::kBaseline;
  uint32_t block_size = 100;
  double block_timeout_ms = 2000.0;
  uint64_t block_max_bytes = 2000000;
  uint32_t num_orgs = 2;
  uint32_t peers_per_org = 2;
  PolicyId policy_id = PolicyId::kP0;
  std::string custom_policy_text;  // used when policy_id == kCustom
  DbKind db_kind = DbKind::kCouchDb;
  std::optional<DbCostModel> db_cost_override;
  NetworkModel net;
  CommitLagModel commit_lag;
  bool ramdisk = false;
  double ramdisk_factor = 0.5;
  uint64_t seed = 42;
  double endorse_overhead_ms = 1.0;
  VsccCostModel vscc;
  SizeModel size_model;
  double stream_overhead_ms = 5.0;        // STREAMCHAIN per-tx ordering cost
  ReorderCostModel reorder_cost;          // FABRICPP
  uint32_t fabricsharp_window_blocks = 16;
  double snapshot_staleness_ms = 0.0;     // FABRICSHARP extra visibility lag

  PolicyNode policy() const;
  DbCostModel db_costs() const;
};

// JSON round trip. Parsing starts from defaults and applies present fields;
// unknown fields raise ConfigError.
std::string config_to_json(const SimConfig& cfg);
SimConfig config_from_json(const std::string& text);

std::string workload_to_json(const WorkloadSpec& wl);
WorkloadSpec workload_from_json(const std::string& text);

}  // namespace eovsim

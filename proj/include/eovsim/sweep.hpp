#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "eovsim/pipeline.hpp"
#include "eovsim/sim_config.hpp"

namespace eovsim {

// Axis lists for the cartesian sweep. An empty list pins that axis to the
// base config's value.
struct SweepAxes {
  std::vector<uint32_t> block_sizes;
  std::vector<double> rates_tps;
  std::vector<PolicyId> policies;
  std::vector<Mode> modes;
  std::vector<double> skews;
  std::vector<std::string> workloads;  // preset names
};

struct SweepSpec {
  SimConfig base;
  WorkloadSpec workload;
  SweepAxes axes;
  uint32_t repetitions = 1;
  uint64_t seed_base = 1;
  uint64_t max_runs = 10000;  // cartesian product x repetitions cap
};

SweepSpec sweep_from_json(const std::string& text);

// One sweep point. key() is the canonical coordinate string; the cell seed
// is seed_base ^ fnv1a(key()), so any cell can be reproduced in isolation.
struct CellCoord {
  Mode mode = Mode::kBaseline;
  uint32_t block_size = 100;
  double rate_tps = 100.0;
  PolicyId policy = PolicyId::kP0;
  double skew = 1.0;
  std::string workload = "uniform";
  uint32_t rep = 0;

  std::string key() const;
};

std::vector<CellCoord> enumerate_cells(const SweepSpec& spec);

// One CSV row. Metric columns are doubles so averaged rows (rep = "avg")
// can carry fractional means; raw rows hold exact integers.
struct SweepRow {
  std::string mode;
  uint32_t block_size = 0;
  double rate_tps = 0.0;
  std::string policy;
  double skew = 0.0;
  std::string workload;
  std::string rep;
  double total_tx = 0.0;
  double success = 0.0;
  double endorse_fail = 0.0;
  double mvcc_intra = 0.0;
  double mvcc_inter = 0.0;
  double phantom = 0.0;
  double early_abort = 0.0;
  double avg_latency_ms = 0.0;
  double committed_tps = 0.0;
};

std::string csv_header();
std::string to_csv(const SweepRow& row);
std::vector<SweepRow> rows_from_csv(const std::string& text);  // skips the header

// Runs a single cell to completion. Throws on invalid cell configs.
SweepRow run_cell(const SweepSpec& spec, const CellCoord& coord);

struct SweepOutcome {
  std::vector<SweepRow> rows;  // per axis point: repetition rows, then "avg"
  std::vector<std::string> errors;  // "cell <key>: <what>" for failed cells
  std::string csv;             // header + rows
  size_t cells_run = 0;        // freshly computed (not loaded from out_dir)
};

// Executes every cell, skipping cells whose result file already exists under
// out_dir/cells (cell-level resume; pass "" to keep everything in memory).
// parallelism <= 1 runs the plain serial loop; higher values run cells
// concurrently with OpenMP. Both produce byte-identical CSV.
SweepOutcome run_sweep(const SweepSpec& spec, const std::string& out_dir,
                       int parallelism);

struct InsufficientData : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TrendEntry {
  std::string workload;
  double rate_tps = 0.0;
  uint32_t best_block_size = 0;  // lowest mean failure percentage
  uint32_t worst_block_size = 0;
  double min_failure_pct = 0.0;
  double max_failure_pct = 0.0;
  std::string intra_verdict;  // INCREASING | DECREASING | FLAT vs block size
  std::string inter_verdict;
};

struct TrendReport {
  std::vector<TrendEntry> entries;

  std::string text() const;
};

// Derives best/worst block size and conflict-count monotonicity verdicts
// (Spearman rank correlation sign) per (workload, rate) group, averaging
// over any other axes. Throws InsufficientData when the CSV holds fewer
// than 3 distinct block sizes.
TrendReport trend_report(const std::string& csv_text);

}  // namespace eovsim

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "eovsim/classifier.hpp"
#include "eovsim/pipeline.hpp"
#include "eovsim/sweep.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace eovsim;

namespace {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("IO_ERROR: cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("IO_ERROR: cannot write " + path.string());
  out << text;
  if (!out) throw IoError("IO_ERROR: short write to " + path.string());
}

std::string default_out_dir() {
  const char* env = std::getenv("EOVSIM_OUT_DIR");
  return env && *env ? env : ".";
}

// Applies one "a.b.c=value" override onto a JSON document. The value is
// parsed as JSON when possible, otherwise taken as a string.
void apply_set(json& doc, const std::string& expr) {
  size_t eq = expr.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("CONFIG_INVALID: --set expects key=value, got '" + expr + "'");
  std::string path = expr.substr(0, eq);
  std::string raw = expr.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }
  json* cur = &doc;
  size_t pos = 0;
  while (true) {
    size_t dot = path.find('.', pos);
    std::string part = path.substr(pos, dot == std::string::npos ? dot : dot - pos);
    if (part.empty()) throw ConfigError("CONFIG_INVALID: bad --set path '" + path + "'");
    if (dot == std::string::npos) {
      (*cur)[part] = value;
      return;
    }
    cur = &(*cur)[part];
    pos = dot + 1;
  }
}

// Splits --set overrides between the run config and the workload: keys with
// a "workload." prefix go to the workload, a "config." prefix is stripped,
// everything else targets the config.
void apply_sets(json& cfg, json& wl, const std::vector<std::string>& sets) {
  for (const std::string& s : sets) {
    if (s.rfind("workload.", 0) == 0)
      apply_set(wl, s.substr(9));
    else if (s.rfind("config.", 0) == 0)
      apply_set(cfg, s.substr(7));
    else
      apply_set(cfg, s);
  }
}

json metrics_json(const SimulationResult& res) {
  const Metrics& m = res.metrics;
  json j;
  j["total_submitted"] = m.total_submitted;
  j["blocks"] = m.blocks;
  j["success"] = m.success;
  j["endorsement_failures"] = m.endorsement_failures;
  j["mvcc_intra"] = m.mvcc_intra;
  j["mvcc_inter"] = m.mvcc_inter;
  j["phantom"] = m.phantom;
  j["early_aborts"] = m.early_aborts;
  j["avg_total_latency_ms"] = m.avg_total_latency_ms;
  j["committed_tps"] = m.committed_tps;
  j["orderer_queue_at_end"] = m.orderer_queue_at_end;
  j["event_count"] = res.event_count;
  j["seed"] = res.seed;
  json pct;
  double n = m.total_submitted > 0 ? static_cast<double>(m.total_submitted) : 1.0;
  pct["success"] = 100.0 * static_cast<double>(m.success) / n;
  pct["endorsement_failures"] = 100.0 * static_cast<double>(m.endorsement_failures) / n;
  pct["mvcc_intra"] = 100.0 * static_cast<double>(m.mvcc_intra) / n;
  pct["mvcc_inter"] = 100.0 * static_cast<double>(m.mvcc_inter) / n;
  pct["phantom"] = 100.0 * static_cast<double>(m.phantom) / n;
  pct["early_aborts"] = 100.0 * static_cast<double>(m.early_aborts) / n;
  pct["failed_total"] =
      100.0 * static_cast<double>(m.total_submitted - m.success) / n;
  j["pct"] = std::move(pct);
  return j;
}

std::string failures_csv(const std::vector<FailureRecord>& failures) {
  std::string s =
      "tx_id,status,key,writer_height,writer_index,endorser_org_a,endorser_org_b,"
      "detected_ms\n";
  char buf[64];
  for (const FailureRecord& f : failures) {
    s += std::to_string(f.tx_id);
    s += ',';
    s += to_string(f.status);
    s += ',';
    s += f.key;
    s += ',';
    if (f.writer) {
      s += std::to_string(f.writer->block_height);
      s += ',';
      s += std::to_string(f.writer->tx_index);
    } else {
      s += ',';
    }
    s += ',';
    if (f.endorser_orgs) {
      s += std::to_string(f.endorser_orgs->first);
      s += ',';
      s += std::to_string(f.endorser_orgs->second);
    } else {
      s += ',';
    }
    std::snprintf(buf, sizeof(buf), ",%.17g", f.detected_ms);
    s += buf;
    s += '\n';
  }
  return s;
}

json stats_json(const LedgerStats& s) {
  json j;
  j["blocks"] = s.blocks;
  j["total_txs"] = s.total_txs;
  j["success"] = s.success;
  j["endorsement_failures"] = s.endorsement_failures;
  j["mvcc_intra"] = s.mvcc_intra;
  j["mvcc_inter"] = s.mvcc_inter;
  j["phantom"] = s.phantom;
  j["early_aborts"] = s.early_aborts;
  json cuts;
  for (const auto& [k, v] : s.by_cut_reason) cuts[k] = v;
  j["by_cut_reason"] = std::move(cuts);
  json pct;
  pct["success"] = s.pct(s.success);
  pct["endorsement_failures"] = s.pct(s.endorsement_failures);
  pct["mvcc_intra"] = s.pct(s.mvcc_intra);
  pct["mvcc_inter"] = s.pct(s.mvcc_inter);
  pct["phantom"] = s.pct(s.phantom);
  pct["early_aborts"] = s.pct(s.early_aborts);
  pct["failed_total"] = s.failure_pct();
  j["pct"] = std::move(pct);
  return j;
}

int cmd_run(const std::string& config_path, const std::string& workload_path,
            const std::string& out_dir, const std::vector<std::string>& sets) {
  json cfg_json = json::parse(config_to_json(SimConfig{}));
  json wl_json = json::parse(workload_to_json(WorkloadSpec{}));
  if (!config_path.empty()) cfg_json = json::parse(read_file(config_path));
  if (!workload_path.empty()) wl_json = json::parse(read_file(workload_path));
  apply_sets(cfg_json, wl_json, sets);
  SimConfig cfg = config_from_json(cfg_json.dump());
  WorkloadSpec wl = workload_from_json(wl_json.dump());

  SimulationResult res = run(cfg, wl);

  fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("IO_ERROR: cannot create " + dir.string());
  write_file(dir / "trace.jsonl", trace_to_string(res.ledger));
  write_file(dir / "metrics.json", metrics_json(res).dump(2) + "\n");
  write_file(dir / "failures.csv", failures_csv(res.failures));

  const Metrics& m = res.metrics;
  std::cout << "txs=" << m.total_submitted << " blocks=" << m.blocks
            << " success=" << m.success << " endorse_fail=" << m.endorsement_failures
            << " mvcc_intra=" << m.mvcc_intra << " mvcc_inter=" << m.mvcc_inter
            << " phantom=" << m.phantom << " early_abort=" << m.early_aborts
            << " avg_latency_ms=" << m.avg_total_latency_ms
            << " committed_tps=" << m.committed_tps << "\n";
  return 0;
}

int cmd_sweep(const std::string& spec_path, const std::string& out_dir, int parallelism,
              const std::vector<std::string>& sets) {
  json spec_json = json::parse(read_file(spec_path));
  for (const std::string& s : sets) apply_set(spec_json, s);
  SweepSpec spec = sweep_from_json(spec_json.dump());

  fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("IO_ERROR: cannot create " + dir.string());

  SweepOutcome outcome = run_sweep(spec, out_dir, parallelism);
  write_file(dir / "sweep.csv", outcome.csv);
  for (const std::string& e : outcome.errors) std::cerr << e << "\n";
  std::cout << "cells=" << enumerate_cells(spec).size() << " ran=" << outcome.cells_run
            << " rows=" << outcome.rows.size() << " errors=" << outcome.errors.size()
            << " -> " << (dir / "sweep.csv").string() << "\n";
  return 0;
}

int cmd_classify(const std::string& trace_path) {
  std::ifstream in(trace_path, std::ios::binary);
  if (!in) throw IoError("IO_ERROR: cannot read " + trace_path);
  LedgerStats stats = parse_ledger(in);
  std::cout << stats_json(stats).dump(2) << "\n";
  return 0;
}

int cmd_report(const std::string& csv_path) {
  TrendReport rep = trend_report(read_file(csv_path));
  std::cout << rep.text();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"execute-order-validate blockchain pipeline simulator"};
  app.require_subcommand(1);

  std::string config_path, workload_path, spec_path, trace_path, csv_path;
  std::string out_dir = default_out_dir();
  std::vector<std::string> sets;
  int parallelism = -1;

  CLI::App* c_run = app.add_subcommand("run", "single simulation run");
  c_run->add_option("--config", config_path, "config JSON (defaults when omitted)");
  c_run->add_option("--workload", workload_path, "workload JSON (defaults when omitted)");
  c_run->add_option("--out", out_dir, "output directory (or $EOVSIM_OUT_DIR)");
  c_run->add_option("--set", sets,
                    "field override, key=value; prefix workload. targets the workload");

  CLI::App* c_sweep = app.add_subcommand("sweep", "cartesian parameter sweep");
  c_sweep->add_option("--spec", spec_path, "sweep spec JSON")->required();
  c_sweep->add_option("--out", out_dir, "output directory (or $EOVSIM_OUT_DIR)");
  c_sweep->add_option("--parallelism", parallelism,
                      "cells in flight; 1 = serial, default all cores");
  c_sweep->add_option("--set", sets, "sweep spec override, key=value");

  CLI::App* c_classify = app.add_subcommand("classify", "offline stats from a ledger trace");
  c_classify->add_option("trace", trace_path, "trace.jsonl path")->required();

  CLI::App* c_report = app.add_subcommand("report", "block size trends from a sweep CSV");
  c_report->add_option("csv", csv_path, "sweep.csv path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_run->parsed()) return cmd_run(config_path, workload_path, out_dir, sets);
    if (c_sweep->parsed()) return cmd_sweep(spec_path, out_dir, parallelism, sets);
    if (c_classify->parsed()) return cmd_classify(trace_path);
    if (c_report->parsed()) return cmd_report(csv_path);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << e.what() << "\n";
    return 3;
  } catch (const TraceError& e) {
    std::cerr << e.what() << "\n";
    return 4;
  } catch (const InsufficientData& e) {
    std::cerr << e.what() << "\n";
    return 4;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "CONFIG_INVALID: " << e.what() << "\n";
    return 2;
  } catch (const std::runtime_error& e) {
    std::string what = e.what();
    std::cerr << what << "\n";
    return what.rfind("MALFORMED_CSV", 0) == 0 ? 4 : 3;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 0;
}

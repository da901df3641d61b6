#include "eovsim/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <json.hpp>

#include "eovsim/util.hpp"

namespace eovsim {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void check_keys(const json& j, const std::set<std::string>& known, const char* where) {
  for (const auto& [k, v] : j.items())
    if (!known.count(k))
      throw ConfigError(std::string("CONFIG_INVALID: unknown field '") + k + "' in " + where);
}

SweepRow row_from(const CellCoord& c, const Metrics& m) {
  SweepRow r;
  r.mode = to_string(c.mode);
  r.block_size = c.block_size;
  r.rate_tps = c.rate_tps;
  r.policy = to_string(c.policy);
  r.skew = c.skew;
  r.workload = c.workload;
  r.rep = std::to_string(c.rep);
  r.total_tx = static_cast<double>(m.total_submitted);
  r.success = static_cast<double>(m.success);
  r.endorse_fail = static_cast<double>(m.endorsement_failures);
  r.mvcc_intra = static_cast<double>(m.mvcc_intra);
  r.mvcc_inter = static_cast<double>(m.mvcc_inter);
  r.phantom = static_cast<double>(m.phantom);
  r.early_abort = static_cast<double>(m.early_aborts);
  r.avg_latency_ms = m.avg_total_latency_ms;
  r.committed_tps = m.committed_tps;
  return r;
}

json row_to_json(const SweepRow& r) {
  json j;
  j["mode"] = r.mode;
  j["block_size"] = r.block_size;
  j["rate_tps"] = r.rate_tps;
  j["policy"] = r.policy;
  j["skew"] = r.skew;
  j["workload"] = r.workload;
  j["rep"] = r.rep;
  j["total_tx"] = r.total_tx;
  j["success"] = r.success;
  j["endorse_fail"] = r.endorse_fail;
  j["mvcc_intra"] = r.mvcc_intra;
  j["mvcc_inter"] = r.mvcc_inter;
  j["phantom"] = r.phantom;
  j["early_abort"] = r.early_abort;
  j["avg_latency_ms"] = r.avg_latency_ms;
  j["committed_tps"] = r.committed_tps;
  return j;
}

SweepRow row_from_json(const json& j) {
  SweepRow r;
  r.mode = j.at("mode").get<std::string>();
  r.block_size = j.at("block_size").get<uint32_t>();
  r.rate_tps = j.at("rate_tps").get<double>();
  r.policy = j.at("policy").get<std::string>();
  r.skew = j.at("skew").get<double>();
  r.workload = j.at("workload").get<std::string>();
  r.rep = j.at("rep").get<std::string>();
  r.total_tx = j.at("total_tx").get<double>();
  r.success = j.at("success").get<double>();
  r.endorse_fail = j.at("endorse_fail").get<double>();
  r.mvcc_intra = j.at("mvcc_intra").get<double>();
  r.mvcc_inter = j.at("mvcc_inter").get<double>();
  r.phantom = j.at("phantom").get<double>();
  r.early_abort = j.at("early_abort").get<double>();
  r.avg_latency_ms = j.at("avg_latency_ms").get<double>();
  r.committed_tps = j.at("committed_tps").get<double>();
  return r;
}

std::string sanitize(const std::string& key) {
  std::string s = key;
  for (char& c : s) {
    if (c == '=') c = '-';
    if (c == ',') c = '_';
  }
  return s;
}

// Average ranks for ties, 1-based.
std::vector<double> ranks(const std::vector<double>& v) {
  size_t n = v.size();
  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), size_t{0});
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
  std::vector<double> r(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    double avg = static_cast<double>(i + j) / 2.0 + 1.0;
    for (size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
  std::vector<double> rx = ranks(xs), ry = ranks(ys);
  size_t n = rx.size();
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

const char* verdict(double rho) {
  if (rho > 1e-9) return "INCREASING";
  if (rho < -1e-9) return "DECREASING";
  return "FLAT";
}

}  // namespace

std::string CellCoord::key() const {
  std::string s = "mode=";
  s += to_string(mode);
  s += ",block_size=" + std::to_string(block_size);
  s += ",rate_tps=" + fmt_g(rate_tps);
  s += ",policy=";
  s += to_string(policy);
  s += ",skew=" + fmt_g(skew);
  s += ",workload=" + workload;
  s += ",rep=" + std::to_string(rep);
  return s;
}

SweepSpec sweep_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("CONFIG_INVALID: sweep file: ") + e.what());
  }
  check_keys(j, {"config", "workload", "axes", "repetitions", "seed_base", "max_runs"},
             "sweep");
  SweepSpec s;
  try {
    if (j.contains("config")) s.base = config_from_json(j["config"].dump());
    if (j.contains("workload")) s.workload = workload_from_json(j["workload"].dump());
    if (j.contains("axes")) {
      const json& a = j["axes"];
      check_keys(a, {"block_sizes", "rates_tps", "policies", "modes", "skews", "workloads"},
                 "axes");
      if (a.contains("block_sizes"))
        for (const json& v : a["block_sizes"]) s.axes.block_sizes.push_back(v.get<uint32_t>());
      if (a.contains("rates_tps"))
        for (const json& v : a["rates_tps"]) s.axes.rates_tps.push_back(v.get<double>());
      if (a.contains("policies"))
        for (const json& v : a["policies"])
          s.axes.policies.push_back(policy_id_from_string(v.get<std::string>()));
      if (a.contains("modes"))
        for (const json& v : a["modes"])
          s.axes.modes.push_back(mode_from_string(v.get<std::string>()));
      if (a.contains("skews"))
        for (const json& v : a["skews"]) s.axes.skews.push_back(v.get<double>());
      if (a.contains("workloads"))
        for (const json& v : a["workloads"]) s.axes.workloads.push_back(v.get<std::string>());
    }
    if (j.contains("repetitions")) s.repetitions = j["repetitions"].get<uint32_t>();
    if (j.contains("seed_base")) s.seed_base = j["seed_base"].get<uint64_t>();
    if (j.contains("max_runs")) s.max_runs = j["max_runs"].get<uint64_t>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("CONFIG_INVALID: sweep file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("CONFIG_INVALID: ") + e.what());
  }
  if (s.repetitions < 1)
    throw ConfigError("CONFIG_INVALID: repetitions must be at least 1");
  return s;
}

std::vector<CellCoord> enumerate_cells(const SweepSpec& spec) {
  std::vector<Mode> modes =
      spec.axes.modes.empty() ? std::vector<Mode>{spec.base.mode} : spec.axes.modes;
  std::vector<uint32_t> blocks = spec.axes.block_sizes.empty()
                                     ? std::vector<uint32_t>{spec.base.block_size}
                                     : spec.axes.block_sizes;
  std::vector<double> rates = spec.axes.rates_tps.empty()
                                  ? std::vector<double>{spec.workload.rate_tps}
                                  : spec.axes.rates_tps;
  std::vector<PolicyId> policies = spec.axes.policies.empty()
                                       ? std::vector<PolicyId>{spec.base.policy_id}
                                       : spec.axes.policies;
  std::vector<double> skews = spec.axes.skews.empty()
                                  ? std::vector<double>{spec.workload.zipf_skew}
                                  : spec.axes.skews;
  std::vector<std::string> wls = spec.axes.workloads.empty()
                                     ? std::vector<std::string>{spec.workload.preset}
                                     : spec.axes.workloads;
  std::vector<CellCoord> out;
  for (Mode m : modes)
    for (uint32_t b : blocks)
      for (double r : rates)
        for (PolicyId p : policies)
          for (double sk : skews)
            for (const std::string& w : wls)
              for (uint32_t rep = 0; rep < spec.repetitions; ++rep)
                out.push_back(CellCoord{m, b, r, p, sk, w, rep});
  return out;
}

std::string csv_header() {
  return "mode,block_size,rate_tps,policy,skew,workload,rep,total_tx,success,"
         "endorse_fail,mvcc_intra,mvcc_inter,phantom,early_abort,avg_latency_ms,"
         "committed_tps";
}

std::string to_csv(const SweepRow& r) {
  std::string s;
  s += r.mode;
  s += ',';
  s += std::to_string(r.block_size);
  s += ',';
  s += fmt_g(r.rate_tps);
  s += ',';
  s += r.policy;
  s += ',';
  s += fmt_g(r.skew);
  s += ',';
  s += r.workload;
  s += ',';
  s += r.rep;
  for (double v : {r.total_tx, r.success, r.endorse_fail, r.mvcc_intra, r.mvcc_inter,
                   r.phantom, r.early_abort, r.avg_latency_ms, r.committed_tps}) {
    s += ',';
    s += fmt_g(v);
  }
  return s;
}

std::vector<SweepRow> rows_from_csv(const std::string& text) {
  std::vector<SweepRow> out;
  std::istringstream is(text);
  std::string line;
  size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.rfind("mode,", 0) == 0) continue;  // header
    std::vector<std::string> f;
    std::string cur;
    for (char c : line) {
      if (c == ',') {
        f.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    f.push_back(cur);
    if (f.size() != 16)
      throw std::runtime_error("MALFORMED_CSV at line " + std::to_string(line_no) +
                               ": expected 16 fields, got " + std::to_string(f.size()));
    try {
      SweepRow r;
      r.mode = f[0];
      r.block_size = static_cast<uint32_t>(std::stoul(f[1]));
      r.rate_tps = std::stod(f[2]);
      r.policy = f[3];
      r.skew = std::stod(f[4]);
      r.workload = f[5];
      r.rep = f[6];
      r.total_tx = std::stod(f[7]);
      r.success = std::stod(f[8]);
      r.endorse_fail = std::stod(f[9]);
      r.mvcc_intra = std::stod(f[10]);
      r.mvcc_inter = std::stod(f[11]);
      r.phantom = std::stod(f[12]);
      r.early_abort = std::stod(f[13]);
      r.avg_latency_ms = std::stod(f[14]);
      r.committed_tps = std::stod(f[15]);
      out.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw std::runtime_error("MALFORMED_CSV at line " + std::to_string(line_no) + ": " +
                               e.what());
    }
  }
  return out;
}

SweepRow run_cell(const SweepSpec& spec, const CellCoord& coord) {
  SimConfig cfg = spec.base;
  cfg.mode = coord.mode;
  cfg.block_size = coord.block_size;
  cfg.policy_id = coord.policy;
  WorkloadSpec wl = spec.workload;
  wl.rate_tps = coord.rate_tps;
  wl.zipf_skew = coord.skew;
  wl.preset = coord.workload;
  if (!spec.axes.workloads.empty()) wl.mix.clear();  // the axis decides the mix
  uint64_t seed = spec.seed_base ^ fnv1a(coord.key());
  cfg.seed = seed;
  wl.seed = seed;
  SimulationResult res = run(cfg, wl);
  return row_from(coord, res.metrics);
}

SweepOutcome run_sweep(const SweepSpec& spec, const std::string& out_dir, int parallelism) {
  std::vector<CellCoord> cells = enumerate_cells(spec);
  if (cells.size() > spec.max_runs)
    throw ConfigError("CONFIG_INVALID: sweep has " + std::to_string(cells.size()) +
                      " cells, max_runs is " + std::to_string(spec.max_runs));

  fs::path cell_dir;
  if (!out_dir.empty()) {
    cell_dir = fs::path(out_dir) / "cells";
    fs::create_directories(cell_dir);
  }

  struct CellOut {
    std::optional<SweepRow> row;
    std::string error;
    bool fresh = false;
  };
  std::vector<CellOut> outs(cells.size());

  auto work = [&](size_t i) {
    const CellCoord& c = cells[i];
    CellOut& o = outs[i];
    fs::path file;
    if (!out_dir.empty()) {
      file = cell_dir / (sanitize(c.key()) + ".json");
      std::ifstream in(file);
      if (in) {
        try {
          json j = json::parse(in);
          if (j.contains("error"))
            o.error = j["error"].get<std::string>();
          else
            o.row = row_from_json(j.at("row"));
          return;
        } catch (const std::exception&) {
          // unreadable cell file: recompute it below
        }
      }
    }
    o.fresh = true;
    try {
      o.row = run_cell(spec, c);
    } catch (const std::exception& e) {
      o.error = e.what();
    }
    if (!out_dir.empty()) {
      json j;
      j["key"] = c.key();
      if (o.row)
        j["row"] = row_to_json(*o.row);
      else
        j["error"] = o.error;
      fs::path tmp = file;
      tmp += ".tmp";
      std::ofstream out(tmp);
      out << j.dump(2) << "\n";
      out.close();
      fs::rename(tmp, file);
    }
  };

  if (parallelism <= 1) {
    for (size_t i = 0; i < cells.size(); ++i) work(i);
  } else {
#ifdef _OPENMP
    omp_set_num_threads(parallelism);
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < static_cast<long>(cells.size()); ++i)
      work(static_cast<size_t>(i));
#else
    for (size_t i = 0; i < cells.size(); ++i) work(i);
#endif
  }

  SweepOutcome outcome;
  std::string csv = csv_header();
  csv += '\n';
  size_t reps = spec.repetitions;
  for (size_t base = 0; base < cells.size(); base += reps) {
    std::vector<const SweepRow*> got;
    for (size_t k = 0; k < reps; ++k) {
      const CellOut& o = outs[base + k];
      if (o.fresh) ++outcome.cells_run;
      if (!o.error.empty())
        outcome.errors.push_back("cell " + cells[base + k].key() + ": " + o.error);
      if (o.row) {
        outcome.rows.push_back(*o.row);
        csv += to_csv(*o.row);
        csv += '\n';
        got.push_back(&*o.row);
      }
    }
    if (got.empty()) continue;
    SweepRow avg = *got.front();
    avg.rep = "avg";
    avg.total_tx = avg.success = avg.endorse_fail = avg.mvcc_intra = avg.mvcc_inter =
        avg.phantom = avg.early_abort = avg.avg_latency_ms = avg.committed_tps = 0.0;
    for (const SweepRow* r : got) {
      avg.total_tx += r->total_tx;
      avg.success += r->success;
      avg.endorse_fail += r->endorse_fail;
      avg.mvcc_intra += r->mvcc_intra;
      avg.mvcc_inter += r->mvcc_inter;
      avg.phantom += r->phantom;
      avg.early_abort += r->early_abort;
      avg.avg_latency_ms += r->avg_latency_ms;
      avg.committed_tps += r->committed_tps;
    }
    double n = static_cast<double>(got.size());
    avg.total_tx /= n;
    avg.success /= n;
    avg.endorse_fail /= n;
    avg.mvcc_intra /= n;
    avg.mvcc_inter /= n;
    avg.phantom /= n;
    avg.early_abort /= n;
    avg.avg_latency_ms /= n;
    avg.committed_tps /= n;
    outcome.rows.push_back(avg);
    csv += to_csv(avg);
    csv += '\n';
  }
  outcome.csv = std::move(csv);
  return outcome;
}

std::string TrendReport::text() const {
  std::string s;
  char buf[64];
  for (const TrendEntry& e : entries) {
    s += "workload=" + e.workload + " rate_tps=" + fmt_g(e.rate_tps) + "\n";
    std::snprintf(buf, sizeof(buf), "  best_block_size=%u failure_pct=%.3f\n",
                  e.best_block_size, e.min_failure_pct);
    s += buf;
    std::snprintf(buf, sizeof(buf), "  worst_block_size=%u failure_pct=%.3f\n",
                  e.worst_block_size, e.max_failure_pct);
    s += buf;
    s += "  mvcc_intra_vs_block_size=" + e.intra_verdict + "\n";
    s += "  mvcc_inter_vs_block_size=" + e.inter_verdict + "\n";
  }
  return s;
}

TrendReport trend_report(const std::string& csv_text) {
  std::vector<SweepRow> all = rows_from_csv(csv_text);
  std::vector<const SweepRow*> use;
  for (const SweepRow& r : all)
    if (r.rep == "avg") use.push_back(&r);
  if (use.empty())
    for (const SweepRow& r : all) use.push_back(&r);

  std::set<uint32_t> distinct;
  for (const SweepRow* r : use) distinct.insert(r->block_size);
  if (distinct.size() < 3)
    throw InsufficientData("INSUFFICIENT_DATA: need at least 3 block sizes, have " +
                           std::to_string(distinct.size()));

  struct Acc {
    double fail_pct = 0.0, intra = 0.0, inter = 0.0;
    size_t n = 0;
  };
  std::map<std::pair<std::string, double>, std::map<uint32_t, Acc>> groups;
  for (const SweepRow* r : use) {
    Acc& a = groups[{r->workload, r->rate_tps}][r->block_size];
    if (r->total_tx > 0.0) a.fail_pct += 100.0 * (r->total_tx - r->success) / r->total_tx;
    a.intra += r->mvcc_intra;
    a.inter += r->mvcc_inter;
    ++a.n;
  }

  TrendReport report;
  for (const auto& [gk, by_block] : groups) {
    if (by_block.size() < 3) continue;  // block size not varied for this group
    TrendEntry e;
    e.workload = gk.first;
    e.rate_tps = gk.second;
    std::vector<double> xs, intra, inter;
    bool first = true;
    for (const auto& [bs, acc] : by_block) {
      double n = static_cast<double>(acc.n);
      double fail = acc.fail_pct / n;
      if (first || fail < e.min_failure_pct) {
        e.min_failure_pct = fail;
        e.best_block_size = bs;
      }
      if (first || fail > e.max_failure_pct) {
        e.max_failure_pct = fail;
        e.worst_block_size = bs;
      }
      first = false;
      xs.push_back(static_cast<double>(bs));
      intra.push_back(acc.intra / n);
      inter.push_back(acc.inter / n);
    }
    e.intra_verdict = verdict(spearman(xs, intra));
    e.inter_verdict = verdict(spearman(xs, inter));
    report.entries.push_back(std::move(e));
  }
  if (report.entries.empty())
    throw InsufficientData(
        "INSUFFICIENT_DATA: no (workload, rate) group spans 3 block sizes");
  return report;
}

}  // namespace eovsim

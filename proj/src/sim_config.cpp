#include "eovsim/sim_config.hpp"

#include <set>

#include <json.hpp>

namespace eovsim {

using json = nlohmann::ordered_json;

const char* to_string(Mode m) {
  switch (m) {
    case Mode::kBaseline: return "BASELINE";
    case Mode::kFabricpp: return "FABRICPP";
    case Mode::kStreamchain: return "STREAMCHAIN";
    case Mode::kFabricsharp: return "FABRICSHARP";
  }
  return "BASELINE";
}

Mode mode_from_string(const std::string& s) {
  if (s == "BASELINE") return Mode::kBaseline;
  if (s == "FABRICPP") return Mode::kFabricpp;
  if (s == "STREAMCHAIN") return Mode::kStreamchain;
  if (s == "FABRICSHARP") return Mode::kFabricsharp;
  throw ConfigError("CONFIG_INVALID: unknown mode '" + s + "'");
}

const char* to_string(DbKind k) {
  return k == DbKind::kLevelDb ? "LEVELDB" : "COUCHDB";
}

DbKind db_kind_from_string(const std::string& s) {
  if (s == "LEVELDB") return DbKind::kLevelDb;
  if (s == "COUCHDB") return DbKind::kCouchDb;
  throw ConfigError("CONFIG_INVALID: unknown db kind '" + s + "'");
}

DbCostModel couchdb_costs() { return {8.3, 0.8, 88.0, 1.2}; }
DbCostModel leveldb_costs() { return {0.6, 0.5, 1.4, 0.6}; }

PolicyNode SimConfig::policy() const {
  if (policy_id == PolicyId::kCustom) return parse_policy(custom_policy_text);
  return expand_builtin(policy_id, static_cast<int>(num_orgs));
}

DbCostModel SimConfig::db_costs() const {
  if (db_cost_override) return *db_cost_override;
  return db_kind == DbKind::kCouchDb ? couchdb_costs() : leveldb_costs();
}

namespace {

void check_keys(const json& j, const std::set<std::string>& known, const char* where) {
  for (const auto& [k, v] : j.items())
    if (!known.count(k))
      throw ConfigError(std::string("CONFIG_INVALID: unknown field '") + k + "' in " + where);
}

json db_costs_json(const DbCostModel& m) {
  return json{{"get_ms", m.get_ms},
              {"put_ms", m.put_ms},
              {"get_range_ms", m.get_range_ms},
              {"delete_ms", m.delete_ms}};
}

DbCostModel db_costs_from(const json& j, DbCostModel base) {
  check_keys(j, {"get_ms", "put_ms", "get_range_ms", "delete_ms"}, "db_costs");
  if (j.contains("get_ms")) base.get_ms = j["get_ms"].get<double>();
  if (j.contains("put_ms")) base.put_ms = j["put_ms"].get<double>();
  if (j.contains("get_range_ms")) base.get_range_ms = j["get_range_ms"].get<double>();
  if (j.contains("delete_ms")) base.delete_ms = j["delete_ms"].get<double>();
  return base;
}

}  // namespace

std::string config_to_json(const SimConfig& c) {
  json j;
  j["mode"] = to_string(c.mode);
  j["block_size"] = c.block_size;
  j["block_timeout_ms"] = c.block_timeout_ms;
  j["block_max_bytes"] = c.block_max_bytes;
  j["num_orgs"] = c.num_orgs;
  j["peers_per_org"] = c.peers_per_org;
  j["policy"] = to_string(c.policy_id);
  if (c.policy_id == PolicyId::kCustom) j["custom_policy"] = c.custom_policy_text;
  j["db_kind"] = to_string(c.db_kind);
  if (c.db_cost_override) j["db_costs"] = db_costs_json(*c.db_cost_override);
  j["net"] = json{{"client_peer_ms", c.net.client_peer_ms},
                  {"client_orderer_ms", c.net.client_orderer_ms},
                  {"orderer_peer_ms", c.net.orderer_peer_ms}};
  if (!c.net.org_extra.empty()) {
    json arr = json::array();
    for (const OrgDelay& d : c.net.org_extra)
      arr.push_back(json{{"mean_ms", d.mean_ms}, {"jitter_ms", d.jitter_ms}});
    j["net"]["org_extra"] = arr;
  }
  j["commit_lag"] = json{{"enabled", c.commit_lag.enabled},
                         {"min_ms", c.commit_lag.min_ms},
                         {"max_ms", c.commit_lag.max_ms}};
  j["ramdisk"] = c.ramdisk;
  j["ramdisk_factor"] = c.ramdisk_factor;
  j["seed"] = c.seed;
  j["endorse_overhead_ms"] = c.endorse_overhead_ms;
  j["vscc"] = json{{"base_ms", c.vscc.base_ms},
                   {"per_subpolicy_ms", c.vscc.per_subpolicy_ms},
                   {"per_signature_ms", c.vscc.per_signature_ms}};
  j["size_model"] = json{{"header_bytes", c.size_model.header_bytes},
                         {"per_read_bytes", c.size_model.per_read_bytes},
                         {"per_write_bytes", c.size_model.per_write_bytes},
                         {"per_range_observed_bytes", c.size_model.per_range_observed_bytes}};
  j["stream_overhead_ms"] = c.stream_overhead_ms;
  j["reorder_cost"] = json{{"graph_coeff_ms", c.reorder_cost.graph_coeff_ms},
                           {"sort_coeff_ms", c.reorder_cost.sort_coeff_ms}};
  j["fabricsharp_window_blocks"] = c.fabricsharp_window_blocks;
  j["snapshot_staleness_ms"] = c.snapshot_staleness_ms;
  return j.dump(2) + "\n";
}

SimConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("CONFIG_INVALID: bad config JSON: ") + e.what());
  }
  SimConfig c;
  check_keys(j,
             {"mode", "block_size", "block_timeout_ms", "block_max_bytes", "num_orgs",
              "peers_per_org", "policy", "custom_policy", "db_kind", "db_costs", "net",
              "commit_lag", "ramdisk", "ramdisk_factor", "seed", "endorse_overhead_ms",
              "vscc", "size_model", "stream_overhead_ms", "reorder_cost",
              "fabricsharp_window_blocks", "snapshot_staleness_ms"},
             "config");
  try {
    if (j.contains("mode")) c.mode = mode_from_string(j["mode"].get<std::string>());
    if (j.contains("block_size")) c.block_size = j["block_size"].get<uint32_t>();
    if (j.contains("block_timeout_ms")) c.block_timeout_ms = j["block_timeout_ms"].get<double>();
    if (j.contains("block_max_bytes")) c.block_max_bytes = j["block_max_bytes"].get<uint64_t>();
    if (j.contains("num_orgs")) c.num_orgs = j["num_orgs"].get<uint32_t>();
    if (j.contains("peers_per_org")) c.peers_per_org = j["peers_per_org"].get<uint32_t>();
    if (j.contains("policy")) c.policy_id = policy_id_from_string(j["policy"].get<std::string>());
    if (j.contains("custom_policy")) c.custom_policy_text = j["custom_policy"].get<std::string>();
    if (j.contains("db_kind")) c.db_kind = db_kind_from_string(j["db_kind"].get<std::string>());
    if (j.contains("db_costs"))
      c.db_cost_override = db_costs_from(j["db_costs"], c.db_costs());
    if (j.contains("net")) {
      const json& n = j["net"];
      check_keys(n, {"client_peer_ms", "client_orderer_ms", "orderer_peer_ms", "org_extra"},
                 "net");
      if (n.contains("client_peer_ms")) c.net.client_peer_ms = n["client_peer_ms"].get<double>();
      if (n.contains("client_orderer_ms"))
        c.net.client_orderer_ms = n["client_orderer_ms"].get<double>();
      if (n.contains("orderer_peer_ms"))
        c.net.orderer_peer_ms = n["orderer_peer_ms"].get<double>();
      if (n.contains("org_extra")) {
        for (const json& d : n["org_extra"]) {
          check_keys(d, {"mean_ms", "jitter_ms"}, "org_extra");
          OrgDelay od;
          if (d.contains("mean_ms")) od.mean_ms = d["mean_ms"].get<double>();
          if (d.contains("jitter_ms")) od.jitter_ms = d["jitter_ms"].get<double>();
          c.net.org_extra.push_back(od);
        }
      }
    }
    if (j.contains("commit_lag")) {
      const json& l = j["commit_lag"];
      check_keys(l, {"enabled", "min_ms", "max_ms"}, "commit_lag");
      if (l.contains("enabled")) c.commit_lag.enabled = l["enabled"].get<bool>();
      if (l.contains("min_ms")) c.commit_lag.min_ms = l["min_ms"].get<double>();
      if (l.contains("max_ms")) c.commit_lag.max_ms = l["max_ms"].get<double>();
    }
    if (j.contains("ramdisk")) c.ramdisk = j["ramdisk"].get<bool>();
    if (j.contains("ramdisk_factor")) c.ramdisk_factor = j["ramdisk_factor"].get<double>();
    if (j.contains("seed")) c.seed = j["seed"].get<uint64_t>();
    if (j.contains("endorse_overhead_ms"))
      c.endorse_overhead_ms = j["endorse_overhead_ms"].get<double>();
    if (j.contains("vscc")) {
      const json& v = j["vscc"];
      check_keys(v, {"base_ms", "per_subpolicy_ms", "per_signature_ms"}, "vscc");
      if (v.contains("base_ms")) c.vscc.base_ms = v["base_ms"].get<double>();
      if (v.contains("per_subpolicy_ms"))
        c.vscc.per_subpolicy_ms = v["per_subpolicy_ms"].get<double>();
      if (v.contains("per_signature_ms"))
        c.vscc.per_signature_ms = v["per_signature_ms"].get<double>();
    }
    if (j.contains("size_model")) {
      const json& s = j["size_model"];
      check_keys(s,
                 {"header_bytes", "per_read_bytes", "per_write_bytes",
                  "per_range_observed_bytes"},
                 "size_model");
      if (s.contains("header_bytes")) c.size_model.header_bytes = s["header_bytes"].get<uint32_t>();
      if (s.contains("per_read_bytes"))
        c.size_model.per_read_bytes = s["per_read_bytes"].get<uint32_t>();
      if (s.contains("per_write_bytes"))
        c.size_model.per_write_bytes = s["per_write_bytes"].get<uint32_t>();
      if (s.contains("per_range_observed_bytes"))
        c.size_model.per_range_observed_bytes = s["per_range_observed_bytes"].get<uint32_t>();
    }
    if (j.contains("stream_overhead_ms"))
      c.stream_overhead_ms = j["stream_overhead_ms"].get<double>();
    if (j.contains("reorder_cost")) {
      const json& r = j["reorder_cost"];
      check_keys(r, {"graph_coeff_ms", "sort_coeff_ms"}, "reorder_cost");
      if (r.contains("graph_coeff_ms"))
        c.reorder_cost.graph_coeff_ms = r["graph_coeff_ms"].get<double>();
      if (r.contains("sort_coeff_ms"))
        c.reorder_cost.sort_coeff_ms = r["sort_coeff_ms"].get<double>();
    }
    if (j.contains("fabricsharp_window_blocks"))
      c.fabricsharp_window_blocks = j["fabricsharp_window_blocks"].get<uint32_t>();
    if (j.contains("snapshot_staleness_ms"))
      c.snapshot_staleness_ms = j["snapshot_staleness_ms"].get<double>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("CONFIG_INVALID: bad field type: ") + e.what());
  }
  return c;
}

std::string workload_to_json(const WorkloadSpec& w) {
  json j;
  j["chaincode"] = w.chaincode;
  j["preset"] = w.preset;
  if (!w.mix.empty()) {
    json m;
    for (const auto& [k, v] : w.mix) m[k] = v;
    j["mix"] = m;
  }
  j["rate_tps"] = w.rate_tps;
  j["duration_s"] = w.duration_s;
  j["zipf_skew"] = w.zipf_skew;
  j["seed"] = w.seed;
  j["poisson"] = w.poisson;
  j["gen_key_count"] = w.gen_key_count;
  return j.dump(2) + "\n";
}

WorkloadSpec workload_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("CONFIG_INVALID: bad workload JSON: ") + e.what());
  }
  check_keys(j,
             {"chaincode", "preset", "mix", "rate_tps", "duration_s", "zipf_skew", "seed",
              "poisson", "gen_key_count"},
             "workload");
  WorkloadSpec w;
  try {
    if (j.contains("chaincode")) w.chaincode = j["chaincode"].get<std::string>();
    if (j.contains("preset")) w.preset = j["preset"].get<std::string>();
    if (j.contains("mix"))
      for (const auto& [k, v] : j["mix"].items()) w.mix[k] = v.get<double>();
    if (j.contains("rate_tps")) w.rate_tps = j["rate_tps"].get<double>();
    if (j.contains("duration_s")) w.duration_s = j["duration_s"].get<double>();
    if (j.contains("zipf_skew")) w.zipf_skew = j["zipf_skew"].get<double>();
    if (j.contains("seed")) w.seed = j["seed"].get<uint64_t>();
    if (j.contains("poisson")) w.poisson = j["poisson"].get<bool>();
    if (j.contains("gen_key_count")) w.gen_key_count = j["gen_key_count"].get<size_t>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("CONFIG_INVALID: bad workload field: ") + e.what());
  }
  return w;
}

}  // namespace eovsim

#include "eovsim/chaincode.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace eovsim {

const FunctionProfile* ChaincodeProfile::find(const std::string& fn) const {
  for (const auto& f : functions)
    if (f.name == fn) return &f;
  return nullptr;
}

const KeySpace* ChaincodeProfile::space(const std::string& n) const {
  for (const auto& s : spaces)
    if (s.name == n) return &s;
  return nullptr;
}

std::vector<std::string> ChaincodeProfile::invocable_functions() const {
  std::vector<std::string> out;
  for (const auto& f : functions)
    if (f.invocable) out.push_back(f.name);
  return out;
}

std::string make_key(const std::string& space, size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%06zu", index);
  return space + "-" + buf;
}

std::string fresh_key(const std::string& space, uint64_t counter) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%010llu", static_cast<unsigned long long>(counter));
  // '+' sorts before '-', keeping inserts outside base-key ranges
  return space + "+ins-" + buf;
}

namespace {

SlotSpec sampled(std::string space) { return {{std::move(space)}, SlotMode::kSampled}; }

OpTemplate read_op(int slot) {
  OpTemplate t;
  t.kind = OpKind::kRead;
  t.slot = slot;
  return t;
}

OpTemplate write_op(int slot) {
  OpTemplate t;
  t.kind = OpKind::kWrite;
  t.slot = slot;
  return t;
}

OpTemplate delete_op(int slot) {
  OpTemplate t;
  t.kind = OpKind::kDelete;
  t.slot = slot;
  return t;
}

OpTemplate range_op(std::vector<std::string> spaces, std::vector<uint32_t> widths,
                    bool phantom) {
  OpTemplate t;
  t.kind = OpKind::kRange;
  t.range = RangeTemplate{std::move(spaces), std::move(widths), phantom};
  return t;
}

FunctionProfile fn(std::string name, std::vector<SlotSpec> slots,
                   std::vector<OpTemplate> ops, bool invocable = true) {
  FunctionProfile f;
  f.name = std::move(name);
  f.invocable = invocable;
  f.slots = std::move(slots);
  f.ops = std::move(ops);
  return f;
}

ChaincodeProfile ehr_profile() {
  ChaincodeProfile p;
  p.name = "EHR";
  p.spaces = {{"prof", 100}, {"ehr", 100}};
  p.functions = {
      fn("initLedger", {sampled("prof"), sampled("ehr")}, {write_op(0), write_op(1)}, false),
      fn("grantProfileAccess", {sampled("prof")}, {read_op(0), write_op(0)}),
      fn("revokeProfileAccess", {sampled("prof")}, {read_op(0), write_op(0)}),
      fn("revokeEhrAccess", {sampled("prof"), sampled("ehr")},
         {read_op(0), read_op(1), write_op(0), write_op(1)}),
      fn("grantEhrAccess", {sampled("prof"), sampled("ehr")},
         {read_op(0), read_op(1), write_op(0), write_op(1)}),
      fn("addEhr", {sampled("prof"), sampled("ehr")},
         {read_op(0), read_op(1), write_op(0), write_op(1)}),
      fn("readProfile", {sampled("prof")}, {read_op(0)}),
      fn("viewPartialProfile", {sampled("prof")}, {read_op(0)}),
      fn("viewEHR", {sampled("ehr")}, {read_op(0)}),
      fn("queryEHR", {sampled("ehr")}, {read_op(0)}),
  };
  return p;
}

ChaincodeProfile dv_profile() {
  ChaincodeProfile p;
  p.name = "DV";
  p.spaces = {{"voter", 1000}, {"party", 12}, {"election", 1}};
  p.functions = {
      fn("initLedger", {sampled("voter"), sampled("party"), sampled("election")},
         {write_op(0), write_op(1), write_op(2)}, false),
      // vote scans every party and every voter before marking the ballot
      fn("vote", {sampled("voter"), sampled("party")},
         {read_op(0), range_op({"party"}, {}, true), range_op({"voter"}, {}, true),
          write_op(0), write_op(1)}),
  };
  p.functions[1].write_once = true;  // a second vote is blocked, not failed
  std::vector<FunctionProfile> rest = {
      fn("closeElctn", {sampled("election")}, {read_op(0), write_op(0)}),
      fn("qryParties", {sampled("party")}, {read_op(0), range_op({"party"}, {}, true)}),
      fn("seeResults", {sampled("election")}, {read_op(0), range_op({"party"}, {}, true)}),
  };
  for (auto& f : rest) p.functions.push_back(std::move(f));
  return p;
}

ChaincodeProfile scm_profile() {
  ChaincodeProfile p;
  p.name = "SCM";
  p.spaces = {{"lsp0", 400}, {"lsp1", 400}, {"lsp2", 400}, {"lsp3", 400},
              {"lsp4", 800}, {"asn", 0}};
  std::vector<std::string> units = {"lsp0", "lsp1", "lsp2", "lsp3", "lsp4"};
  p.functions = {
      fn("initLedger", {sampled("lsp0"), sampled("lsp4")}, {write_op(0), write_op(1)},
         false),
      fn("pushASN", {{{"asn"}, SlotMode::kFresh}}, {write_op(0)}),
      fn("Ship", {{units, SlotMode::kSampled}, {units, SlotMode::kSampled}},
         {read_op(0), read_op(1), write_op(0), write_op(1)}),
      fn("Unload", {{units, SlotMode::kSampled}, {units, SlotMode::kSampled}},
         {read_op(0), read_op(1), write_op(0), write_op(1)}),
      // all units of one randomly chosen LSP
      fn("queryASN", {}, {range_op(units, {}, true)}),
      fn("queryStock", {}, {range_op(units, {}, false)}),
  };
  return p;
}

ChaincodeProfile drm_profile() {
  ChaincodeProfile p;
  p.name = "DRM";
  p.spaces = {{"art", 200}, {"holder", 200}};
  p.functions = {
      fn("initLedger", {sampled("art"), sampled("holder")}, {write_op(0), write_op(1)},
         false),
      fn("create", {sampled("holder"), {{"art"}, SlotMode::kFresh}},
         {read_op(0), write_op(1), write_op(0)}),
      fn("play", {sampled("art"), sampled("holder")},
         {read_op(0), read_op(1), write_op(0)}),
      fn("queryRghts", {sampled("art"), sampled("holder")}, {read_op(0), read_op(1)}),
      fn("viewMetaData", {sampled("art")}, {read_op(0)}),
      fn("calcRevenue", {}, {range_op({"art"}, {}, false)}),
  };
  return p;
}

}  // namespace

ChaincodeProfile genchain_profile(size_t key_count) {
  if (key_count == 0) throw std::invalid_argument("genChain: key_count must be positive");
  ChaincodeProfile p;
  p.name = "genChain";
  p.spaces = {{"gen", key_count}, {"del", key_count / 2}};
  p.functions = {
      fn("read", {sampled("gen")}, {read_op(0)}),
      fn("insert", {{{"gen"}, SlotMode::kFresh}}, {write_op(0)}),
      fn("update", {sampled("gen")}, {read_op(0), write_op(0)}),
      fn("delete", {{{"del"}, SlotMode::kDeletePool}}, {delete_op(0)}),
      fn("range", {}, {range_op({"gen"}, {2, 4, 8}, true)}),
  };
  return p;
}

ChaincodeProfile builtin_chaincode(const std::string& name) {
  if (name == "EHR") return ehr_profile();
  if (name == "DV") return dv_profile();
  if (name == "SCM") return scm_profile();
  if (name == "DRM") return drm_profile();
  if (name == "genChain") return genchain_profile(100000);
  throw std::invalid_argument("unknown chaincode: " + name);
}

ChaincodeProfile gen_chaincode(const std::map<std::string, FunctionSpec>& spec,
                               size_t key_count) {
  if (spec.empty()) throw std::invalid_argument("EMPTY_SPEC: no functions given");
  ChaincodeProfile p;
  p.name = "generated";
  p.spaces = {{"gen", key_count}, {"del", key_count / 2}};
  for (const auto& [name, fs] : spec) {
    if (fs.reads + fs.writes + fs.fresh_inserts + fs.deletes + fs.ranges == 0)
      throw std::invalid_argument("EMPTY_SPEC: function '" + name + "' has no operations");
    FunctionProfile f;
    f.name = name;
    uint32_t shared = std::max(fs.reads, fs.writes);
    for (uint32_t i = 0; i < shared; ++i) f.slots.push_back(sampled("gen"));
    for (uint32_t i = 0; i < fs.reads; ++i) f.ops.push_back(read_op(static_cast<int>(i)));
    for (uint32_t i = 0; i < fs.writes; ++i) f.ops.push_back(write_op(static_cast<int>(i)));
    for (uint32_t i = 0; i < fs.fresh_inserts; ++i) {
      f.slots.push_back({{"gen"}, SlotMode::kFresh});
      f.ops.push_back(write_op(static_cast<int>(f.slots.size() - 1)));
    }
    for (uint32_t i = 0; i < fs.deletes; ++i) {
      f.slots.push_back({{"del"}, SlotMode::kDeletePool});
      f.ops.push_back(delete_op(static_cast<int>(f.slots.size() - 1)));
    }
    for (uint32_t i = 0; i < fs.ranges; ++i)
      f.ops.push_back(range_op({"gen"}, {2, 4, 8}, true));
    p.functions.push_back(std::move(f));
  }
  return p;
}

}  // namespace eovsim

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "eovsim/types.hpp"

namespace eovsim {

// How a function picks the key bound to one of its slots.
enum class SlotMode {
  kSampled,     // zipf/uniform draw from the space, per the workload skew
  kFresh,       // brand-new key from a per-stream counter (inserts)
  kDeletePool,  // next live not-yet-deleted key from a reserved pool
};

struct SlotSpec {
  std::vector<std::string> spaces;  // one chosen uniformly when several
  SlotMode mode = SlotMode::kSampled;
};

// A range scan template. Empty widths means the whole space is scanned;
// otherwise a width is drawn uniformly and anchored at a sampled index.
struct RangeTemplate {
  std::vector<std::string> spaces;
  std::vector<uint32_t> widths;
  bool phantom_detected = true;
};

struct OpTemplate {
  OpKind kind = OpKind::kRead;
  int slot = -1;        // read/write/delete
  RangeTemplate range;  // kind == kRange
};

struct FunctionProfile {
  std::string name;
  bool invocable = true;  // ledger-population functions are not
  // Re-invocation guard (DV vote): when the first point read shows the key
  // was already written after genesis, the endorsement carries no writes.
  bool write_once = false;
  std::vector<SlotSpec> slots;
  std::vector<OpTemplate> ops;

  bool has_range() const {
    for (const auto& op : ops)
      if (op.kind == OpKind::kRange) return true;
    return false;
  }
};

struct KeySpace {
  std::string name;
  size_t count = 0;  // genesis population
};

struct ChaincodeProfile {
  std::string name;
  std::vector<KeySpace> spaces;
  std::vector<FunctionProfile> functions;

  const FunctionProfile* find(const std::string& fn) const;
  const KeySpace* space(const std::string& name) const;
  std::vector<std::string> invocable_functions() const;
};

// "prof" + index 17 -> "prof-000017"; lexicographic order matches numeric.
std::string make_key(const std::string& space, size_t index);

// Insert-namespace keys sort before every make_key() of the same space, so
// fresh inserts never land inside a scanned range of the base population.
std::string fresh_key(const std::string& space, uint64_t counter);

// The four application profiles (EHR, DV, SCM, DRM) with their genesis
// populations, plus the synthetic "genChain" profile (one function per op
// kind over `key_count` keys and a reserved delete pool of half that size).
ChaincodeProfile builtin_chaincode(const std::string& name);
ChaincodeProfile genchain_profile(size_t key_count);

// Per-function op counts for building custom profiles.
struct FunctionSpec {
  uint32_t reads = 0;
  uint32_t writes = 0;         // paired with reads (read-modify-write prefix)
  uint32_t fresh_inserts = 0;  // writes to fresh keys
  uint32_t deletes = 0;
  uint32_t ranges = 0;
};

// Builds a profile over a single "gen" key space from per-function op
// counts. Throws std::invalid_argument ("EMPTY_SPEC") when no functions are
// given or a function has all-zero counts.
ChaincodeProfile gen_chaincode(const std::map<std::string, FunctionSpec>& spec,
                               size_t key_count);

}  // namespace eovsim

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>

#include "eovsim/chaincode.hpp"
#include "eovsim/types.hpp"
#include "eovsim/util.hpp"
#include "eovsim/zipf.hpp"

namespace eovsim {

struct WorkloadSpec {
  std::string chaincode = "EHR";  // EHR | DV | SCM | DRM | genChain
  std::string preset = "uniform";
  std::map<std::string, double> mix;  // explicit mix overrides the preset
  double rate_tps = 100.0;
  double duration_s = 180.0;
  double zipf_skew = 1.0;
  uint64_t seed = 1;
  bool poisson = false;           // default: evenly spaced submissions
  size_t gen_key_count = 100000;  // genChain population
};

struct TxIntent {
  uint64_t id = 0;
  double submit_ms = 0.0;
  std::string fn;
  std::vector<IntentOp> ops;
};

// Resolves the preset name into a concrete mix for the given profile.
// "uniform" spreads evenly over invocable functions; genChain additionally
// offers "<op>-heavy" (0.80 on one function, 0.05 on each other) and
// "read-update" (0.50 / 0.50). Explicit mixes are validated: probabilities
// must sum to 1 and every name must be an invocable function
// (UNKNOWN_FUNCTION otherwise).
std::map<std::string, double> resolve_mix(const ChaincodeProfile& profile,
                                          const WorkloadSpec& spec);

// Deterministic lazy stream of transaction intents. Submit times are
// non-decreasing; identical (profile, spec) pairs yield identical streams.
class TxIntentStream {
 public:
  TxIntentStream(const ChaincodeProfile& profile, const WorkloadSpec& spec);

  std::optional<TxIntent> next();

  double duration_ms() const { return spec_.duration_s * 1000.0; }
  const ChaincodeProfile& profile() const { return profile_; }
  const WorkloadSpec& spec() const { return spec_; }

  // True if any function with positive mix probability performs a range scan.
  bool has_range_ops() const;

 private:
  size_t sample_space_index(const std::string& space);
  const ZipfSampler& sampler_for(const std::string& space);

  const ChaincodeProfile& profile_;
  WorkloadSpec spec_;
  std::map<std::string, double> mix_;
  std::vector<std::pair<const FunctionProfile*, double>> cum_;  // fn cdf
  Rng rng_;
  double next_submit_ms_ = 0.0;
  uint64_t next_id_ = 0;
  std::map<std::string, std::unique_ptr<ZipfSampler>> samplers_;
  std::map<std::string, uint64_t> fresh_counters_;
  std::map<std::string, uint64_t> delete_counters_;
};

// Convenience: profile for a workload spec (builtin chaincodes only).
ChaincodeProfile profile_for(const WorkloadSpec& spec);

}  // namespace eovsim

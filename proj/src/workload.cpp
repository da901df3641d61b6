#include "eovsim/workload.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eovsim {

ChaincodeProfile profile_for(const WorkloadSpec& spec) {
  if (spec.chaincode == "genChain") return genchain_profile(spec.gen_key_count);
  return builtin_chaincode(spec.chaincode);
}

std::map<std::string, double> resolve_mix(const ChaincodeProfile& profile,
                                          const WorkloadSpec& spec) {
  std::map<std::string, double> mix = spec.mix;
  if (mix.empty()) {
    std::vector<std::string> fns = profile.invocable_functions();
    if (fns.empty()) throw std::invalid_argument("profile has no invocable functions");
    if (spec.preset == "uniform") {
      for (const auto& f : fns) mix[f] = 1.0 / static_cast<double>(fns.size());
    } else if (spec.preset.size() > 6 &&
               spec.preset.substr(spec.preset.size() - 6) == "-heavy") {
      std::string heavy = spec.preset.substr(0, spec.preset.size() - 6);
      if (!profile.find(heavy))
        throw std::invalid_argument("UNKNOWN_FUNCTION: preset names '" + heavy + "'");
      for (const auto& f : fns) mix[f] = f == heavy ? 0.80 : 0.05;
    } else if (spec.preset == "read-update") {
      mix["read"] = 0.5;
      mix["update"] = 0.5;
    } else {
      throw std::invalid_argument("unknown workload preset: " + spec.preset);
    }
  }
  double sum = 0.0;
  for (const auto& [name, p] : mix) {
    const FunctionProfile* f = profile.find(name);
    if (!f || !f->invocable)
      throw std::invalid_argument("UNKNOWN_FUNCTION: '" + name + "' not invocable in " +
                                  profile.name);
    if (p < 0) throw std::invalid_argument("negative mix probability for " + name);
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("workload mix must sum to 1");
  return mix;
}

TxIntentStream::TxIntentStream(const ChaincodeProfile& profile, const WorkloadSpec& spec)
    : profile_(profile), spec_(spec), rng_(derive_seed(spec.seed, 0x776c6f6164ULL)) {
  if (spec.rate_tps <= 0) throw std::invalid_argument("rate_tps must be positive");
  if (spec.duration_s <= 0) throw std::invalid_argument("duration_s must be positive");
  mix_ = resolve_mix(profile, spec);
  double acc = 0.0;
  for (const auto& [name, p] : mix_) {
    if (p == 0.0) continue;
    acc += p;
    cum_.emplace_back(profile.find(name), acc);
  }
  if (!cum_.empty()) cum_.back().second = 1.0;
}

bool TxIntentStream::has_range_ops() const {
  for (const auto& [fp, _] : cum_)
    if (fp->has_range()) return true;
  return false;
}

const ZipfSampler& TxIntentStream::sampler_for(const std::string& space) {
  auto it = samplers_.find(space);
  if (it == samplers_.end()) {
    const KeySpace* ks = profile_.space(space);
    if (!ks || ks->count == 0)
      throw std::invalid_argument("cannot sample from empty key space: " + space);
    it = samplers_.emplace(space, std::make_unique<ZipfSampler>(ks->count, spec_.zipf_skew))
             .first;
  }
  return *it->second;
}

std::optional<TxIntent> TxIntentStream::next() {
  if (next_submit_ms_ > spec_.duration_s * 1000.0) return std::nullopt;

  TxIntent intent;
  intent.id = next_id_++;
  intent.submit_ms = next_submit_ms_;
  double gap = 1000.0 / spec_.rate_tps;
  next_submit_ms_ += spec_.poisson ? rng_.exponential(gap) : gap;

  double u = rng_.uniform();
  const FunctionProfile* f = cum_.back().first;
  for (const auto& [fp, c] : cum_)
    if (u < c) {
      f = fp;
      break;
    }
  intent.fn = f->name;

  // Bind slots to concrete keys, then expand op templates in order.
  std::vector<Key> bound(f->slots.size());
  for (size_t s = 0; s < f->slots.size(); ++s) {
    const SlotSpec& slot = f->slots[s];
    const std::string& space =
        slot.spaces.size() == 1 ? slot.spaces.front()
                                : slot.spaces[rng_.index(slot.spaces.size())];
    switch (slot.mode) {
      case SlotMode::kSampled:
        bound[s] = make_key(space, sampler_for(space).sample_index(rng_));
        break;
      case SlotMode::kFresh:
        bound[s] = fresh_key(space, fresh_counters_[space]++);
        break;
      case SlotMode::kDeletePool: {
        const KeySpace* ks = profile_.space(space);
        if (!ks || ks->count == 0)
          throw std::invalid_argument("delete pool space missing: " + space);
        uint64_t& ctr = delete_counters_[space];
        bound[s] = make_key(space, ctr % ks->count);  // wraps if exhausted
        ++ctr;
        break;
      }
    }
  }

  size_t op_idx = 0;
  for (const OpTemplate& op : f->ops) {
    IntentOp out;
    out.kind = op.kind;
    switch (op.kind) {
      case OpKind::kRead:
        out.key = bound[static_cast<size_t>(op.slot)];
        break;
      case OpKind::kWrite:
        out.key = bound[static_cast<size_t>(op.slot)];
        out.value = "v" + std::to_string(intent.id) + "." + std::to_string(op_idx);
        break;
      case OpKind::kDelete:
        out.key = bound[static_cast<size_t>(op.slot)];
        break;
      case OpKind::kRange: {
        const std::string& space =
            op.range.spaces.size() == 1
                ? op.range.spaces.front()
                : op.range.spaces[rng_.index(op.range.spaces.size())];
        const KeySpace* ks = profile_.space(space);
        if (!ks || ks->count == 0)
          throw std::invalid_argument("range over empty key space: " + space);
        size_t lo = 0, hi = ks->count - 1;
        if (!op.range.widths.empty()) {
          size_t w = op.range.widths[rng_.index(op.range.widths.size())];
          w = std::min<size_t>(std::max<size_t>(w, 1), ks->count);
          size_t anchor = sampler_for(space).sample_index(rng_);
          lo = std::min(anchor, ks->count - w);
          hi = lo + w - 1;
        }
        out.key = make_key(space, lo);
        out.end_key = make_key(space, hi);
        out.phantom_detected = op.range.phantom_detected;
        break;
      }
    }
    intent.ops.push_back(std::move(out));
    ++op_idx;
  }
  return intent;
}

}  // namespace eovsim

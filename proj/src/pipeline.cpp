#include "eovsim/pipeline.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>

#include "eovsim/policy.hpp"
#include "eovsim/reorder.hpp"
#include "eovsim/util.hpp"
#include "eovsim/world_state.hpp"

namespace eovsim {
namespace {

enum class EvKind : uint8_t {
  kSubmit,
  kEndorse,
  kOrdererArrive,
  kBlockTimeout,
  kStreamEmit,
  kDeliver,
  kApply,
  kSample,
};

struct Ev {
  double t = 0.0;
  uint64_t seq = 0;  // tie break, assigned at push
  EvKind kind = EvKind::kSubmit;
  uint64_t a = 0;  // tx id, block height or timer generation
  uint32_t b = 0;  // endorse: org slot; deliver/apply: global peer
};

struct EvLater {
  bool operator()(const Ev& x, const Ev& y) const {
    if (x.t != y.t) return x.t > y.t;
    return x.seq > y.seq;
  }
};

struct TxRuntime {
  Transaction tx;
  uint32_t awaiting = 0;    // endorsements still outstanding
  double max_resp_ms = 0.0;  // latest endorsement response at the client
};

struct Peer {
  WorldState replica;
  double ready_ms = 0.0;  // validate/commit pipeline free time
  uint64_t next_height = 1;
  std::map<uint64_t, double> holdback;  // deliveries that arrived early
  Rng lag_rng;

  explicit Peer(uint64_t lag_seed) : lag_rng(lag_seed) {}
};

// What the commit path needs once a block is cut: the validation compute
// time (identical on every peer), the write sets to apply, and which failure
// records take their detection time from the reference peer's validation.
struct BlockRt {
  double validate_ms = 0.0;
  double reorder_cost_ms = 0.0;
  std::vector<std::pair<WriteSet, WriterLoc>> applies;
  std::vector<size_t> patch_failures;
};

class Sim {
 public:
  Sim(const SimConfig& cfg, const ChaincodeProfile& profile,
      const std::vector<TxIntent>& intents, double duration_ms)
      : cfg_(cfg),
        profile_(profile),
        db_(cfg.db_costs()),
        duration_ms_(duration_ms),
        net_rng_(derive_seed(cfg.seed, 0x6e6574)) {
    policy_ = cfg_.policy();
    endorse_orgs_ = policy_orgs(policy_);
    vscc_ms_ = vscc_cost_ms(policy_, cfg_.vscc);

    size_t num_peers =
        static_cast<size_t>(cfg_.num_orgs) * static_cast<size_t>(cfg_.peers_per_org);
    peers_.reserve(num_peers);
    for (size_t g = 0; g < num_peers; ++g)
      peers_.emplace_back(derive_seed(derive_seed(cfg_.seed, 0x6c6167), g));
    for (const KeySpace& sp : profile_.spaces)
      for (size_t i = 0; i < sp.count; ++i) {
        Key k = make_key(sp.name, i);
        validator_.init_put(k, "g");
        for (Peer& p : peers_) p.replica.init_put(k, "g");
      }
    org_rr_.assign(cfg_.num_orgs, 0);

    if (cfg_.mode == Mode::kFabricsharp) sharp_.emplace(validator_);

    for (const TxIntent& in : intents) {
      TxRuntime rt;
      rt.tx.id = in.id;
      rt.tx.submit_ms = in.submit_ms;
      rt.tx.chaincode_function = in.fn;
      rt.tx.intent = in.ops;
      rt.awaiting = static_cast<uint32_t>(endorse_orgs_.size());
      rt.tx.endorsements.resize(endorse_orgs_.size());
      push(in.submit_ms, EvKind::kSubmit, in.id, 0);
      inflight_.emplace(in.id, std::move(rt));
    }
    metrics_.total_submitted = intents.size();
    push(duration_ms_, EvKind::kSample, 0, 0);
  }

  SimulationResult finish() && {
    while (!q_.empty()) {
      Ev ev = q_.top();
      q_.pop();
      ++event_count_;
      dispatch(ev);
    }
    return summarize();
  }

 private:
  void push(double t, EvKind k, uint64_t a, uint32_t b) {
    q_.push(Ev{t, seq_++, k, a, b});
  }

  uint32_t org_of(uint32_t global_peer) const { return global_peer / cfg_.peers_per_org; }

  // Per-org extra link delay, fresh draw per hop, clamped at zero.
  double org_extra(uint32_t org) {
    if (org >= cfg_.net.org_extra.size()) return 0.0;
    const OrgDelay& d = cfg_.net.org_extra[org];
    if (d.mean_ms == 0.0 && d.jitter_ms == 0.0) return 0.0;
    double v = d.mean_ms;
    if (d.jitter_ms > 0.0) v += net_rng_.uniform(-d.jitter_ms, d.jitter_ms);
    return std::max(0.0, v);
  }

  void dispatch(const Ev& ev) {
    switch (ev.kind) {
      case EvKind::kSubmit: on_submit(ev); break;
      case EvKind::kEndorse: on_endorse(ev); break;
      case EvKind::kOrdererArrive: on_orderer_arrive(ev); break;
      case EvKind::kBlockTimeout:
        if (ev.a == batch_gen_ && !pending_.empty()) cut_block(CutReason::kTimeout, ev.t);
        break;
      case EvKind::kStreamEmit: on_stream_emit(ev); break;
      case EvKind::kDeliver: on_deliver(ev); break;
      case EvKind::kApply: on_apply(ev); break;
      case EvKind::kSample:
        metrics_.orderer_queue_at_end = cfg_.mode == Mode::kStreamchain
                                            ? stream_arrived_ - stream_emitted_
                                            : pending_.size();
        break;
    }
  }

  void on_submit(const Ev& ev) {
    for (size_t slot = 0; slot < endorse_orgs_.size(); ++slot) {
      uint32_t org = static_cast<uint32_t>(endorse_orgs_[slot]);
      uint32_t peer_in_org = org_rr_[org]++ % cfg_.peers_per_org;
      uint32_t g = org * cfg_.peers_per_org + peer_in_org;
      double arr = ev.t + cfg_.net.client_peer_ms + org_extra(org);
      push(arr, EvKind::kEndorse, ev.a, static_cast<uint32_t>(slot) << 16 | g);
    }
  }

  void on_endorse(const Ev& ev) {
    TxRuntime& rt = inflight_.at(ev.a);
    uint32_t slot = ev.b >> 16;
    uint32_t g = ev.b & 0xffff;
    Peer& p = peers_[g];

    Endorsement e;
    e.org = org_of(g);
    e.peer = g % cfg_.peers_per_org;
    double cost = cfg_.endorse_overhead_ms;
    WriteSet writes;
    double write_cost = 0.0;
    for (const IntentOp& op : rt.tx.intent) {
      switch (op.kind) {
        case OpKind::kRead: {
          auto cur = p.replica.read(op.key);
          e.read_set.push_back(ReadEntry{op.key, cur ? cur->version : 0});
          cost += db_.get_ms;
          break;
        }
        case OpKind::kWrite:
          writes.push_back(WriteEntry{op.key, op.value, false});
          write_cost += db_.put_ms;
          break;
        case OpKind::kDelete:
          writes.push_back(WriteEntry{op.key, "", true});
          write_cost += db_.delete_ms;
          break;
        case OpKind::kRange: {
          RangeRead rr;
          rr.start_key = op.key;
          rr.end_key = op.end_key;
          rr.observed = p.replica.range(op.key, op.end_key);
          rr.phantom_detected = op.phantom_detected;
          e.range_reads.push_back(std::move(rr));
          cost += db_.get_range_ms;
          break;
        }
      }
    }
    const FunctionProfile* f = profile_.find(rt.tx.chaincode_function);
    bool blocked = f && f->write_once && !e.read_set.empty() &&
                   e.read_set.front().version > 1;
    if (!blocked) {
      e.write_set = std::move(writes);
      cost += write_cost;
    }
    e.endorse_ms = ev.t + cost;
    double resp = e.endorse_ms + cfg_.net.client_peer_ms + org_extra(e.org);
    rt.tx.endorsements[slot] = std::move(e);
    rt.max_resp_ms = std::max(rt.max_resp_ms, resp);
    if (--rt.awaiting == 0)
      push(rt.max_resp_ms + cfg_.net.client_orderer_ms, EvKind::kOrdererArrive, ev.a, 0);
  }

  void on_orderer_arrive(const Ev& ev) {
    if (cfg_.mode == Mode::kStreamchain) {
      ++stream_arrived_;
      double emit = std::max(ev.t, stream_free_) + cfg_.stream_overhead_ms;
      stream_free_ = emit;
      push(emit, EvKind::kStreamEmit, ev.a, 0);
      return;
    }
    if (cfg_.mode == Mode::kFabricsharp) {
      TxRuntime& rt = inflight_.at(ev.a);
      const Endorsement& canon = rt.tx.endorsements.front();
      TxFootprint fp =
          footprint_of(rt.tx.id, canon.read_set, canon.range_reads, canon.write_set);
      auto rej = sharp_->admit(fp, canon.read_set);
      if (rej) {
        FailureRecord rec;
        rec.tx_id = rt.tx.id;
        rec.status = TxStatus::kEarlyAbortReorder;
        rec.key = rej->key;
        rec.writer = rej->writer;
        rec.detected_ms = ev.t;
        failures_.push_back(std::move(rec));
        ++sharp_rejects_;
        inflight_.erase(ev.a);
        return;
      }
    }
    pending_.push_back(ev.a);
    pending_bytes_ += tx_byte_size(inflight_.at(ev.a).tx, cfg_.size_model);
    if (pending_.size() == 1)
      push(ev.t + cfg_.block_timeout_ms, EvKind::kBlockTimeout, batch_gen_, 0);
    if (pending_.size() >= cfg_.block_size)
      cut_block(CutReason::kCount, ev.t);
    else if (pending_bytes_ >= cfg_.block_max_bytes)
      cut_block(CutReason::kBytes, ev.t);
  }

  void on_stream_emit(const Ev& ev) {
    ++stream_emitted_;
    pending_.push_back(ev.a);
    cut_block(CutReason::kStream, ev.t);
  }

  void cut_block(CutReason reason, double now) {
    std::vector<uint64_t> batch = std::move(pending_);
    pending_.clear();
    pending_bytes_ = 0;
    ++batch_gen_;

    Block block;
    block.height = next_height_++;
    block.cut_reason = reason;
    block.cut_time_ms = now;
    BlockRt rt;

    std::vector<uint32_t> order(batch.size());
    std::vector<uint32_t> aborted;
    if (cfg_.mode == Mode::kFabricpp) {
      std::vector<TxFootprint> fps;
      fps.reserve(batch.size());
      for (uint64_t id : batch) {
        const Transaction& tx = inflight_.at(id).tx;
        const Endorsement& e = tx.endorsements.front();
        fps.push_back(footprint_of(tx.id, e.read_set, e.range_reads, e.write_set));
      }
      ReorderOutcome out = reorder_block(fps, cfg_.reorder_cost);
      order = std::move(out.order);
      aborted = std::move(out.aborted);
      std::sort(aborted.begin(), aborted.end());
      rt.reorder_cost_ms = out.cost_ms;
    } else if (cfg_.mode == Mode::kFabricsharp) {
      order = sharp_->cut();
    } else {
      for (uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    }

    for (uint32_t idx : order) {
      Transaction tx = std::move(inflight_.at(batch[idx]).tx);
      inflight_.erase(batch[idx]);
      uint32_t pos = static_cast<uint32_t>(block.txs.size());
      validate_tx(tx, block.height, pos, rt);
      block.txs.push_back(std::move(tx));
    }
    for (uint32_t idx : aborted) {
      Transaction tx = std::move(inflight_.at(batch[idx]).tx);
      inflight_.erase(batch[idx]);
      tx.final_status = TxStatus::kEarlyAbortReorder;
      FailureRecord rec;
      rec.tx_id = tx.id;
      rec.status = TxStatus::kEarlyAbortReorder;
      rec.detected_ms = now + rt.reorder_cost_ms;
      failures_.push_back(std::move(rec));
      block.txs.push_back(std::move(tx));
    }

    ledger_.push_back(std::move(block));
    block_rt_.push_back(std::move(rt));

    for (uint32_t g = 0; g < peers_.size(); ++g) {
      double deliver = now + block_rt_.back().reorder_cost_ms + cfg_.net.orderer_peer_ms +
                       org_extra(org_of(g));
      push(deliver, EvKind::kDeliver, ledger_.back().height, g);
    }
  }

  // Sets the status against the canonical validator state and accounts the
  // per-transaction validation compute cost. Applies successful write sets
  // immediately so later transactions in the block see them.
  void validate_tx(Transaction& tx, uint64_t height, uint32_t pos, BlockRt& rt) {
    rt.validate_ms += vscc_ms_;
    auto subset = satisfying_subset(policy_, tx.endorsements);
    if (!subset) {
      tx.final_status = TxStatus::kEndorsementPolicyFailure;
      FailureRecord rec = classify_endorsement(tx.id, tx.endorsements);
      tx.conflict_key = rec.key;
      rt.patch_failures.push_back(failures_.size());
      failures_.push_back(std::move(rec));
      return;
    }
    const Endorsement& canon = tx.endorsements[subset->front()];
    rt.validate_ms += static_cast<double>(canon.read_set.size()) * db_.get_ms;
    if (auto stale = first_stale_read(canon.read_set, validator_)) {
      bool intra = stale->writer && stale->writer->block_height == height;
      tx.final_status = intra ? TxStatus::kMvccIntraBlock : TxStatus::kMvccInterBlock;
      tx.conflict_key = stale->key;
      tx.conflict_writer = stale->writer;
      FailureRecord rec;
      rec.tx_id = tx.id;
      rec.status = tx.final_status;
      rec.key = stale->key;
      rec.writer = stale->writer;
      rt.patch_failures.push_back(failures_.size());
      failures_.push_back(std::move(rec));
      return;
    }
    for (const RangeRead& rr : canon.range_reads)
      if (rr.phantom_detected) rt.validate_ms += db_.get_range_ms;
    if (auto ph = first_phantom(canon.range_reads, validator_)) {
      tx.final_status = TxStatus::kPhantomRead;
      tx.conflict_key = ph->key;
      tx.conflict_writer = ph->writer;
      FailureRecord rec;
      rec.tx_id = tx.id;
      rec.status = TxStatus::kPhantomRead;
      rec.key = ph->key;
      rec.writer = ph->writer;
      rt.patch_failures.push_back(failures_.size());
      failures_.push_back(std::move(rec));
      return;
    }
    tx.final_status = TxStatus::kSuccess;
    for (const WriteEntry& w : canon.write_set)
      rt.validate_ms += w.is_delete ? db_.delete_ms : db_.put_ms;
    WriterLoc loc{height, pos};
    validator_.apply(canon.write_set, loc);
    rt.applies.emplace_back(canon.write_set, loc);
  }

  void on_deliver(const Ev& ev) {
    Peer& p = peers_[ev.b];
    if (ev.a != p.next_height) {
      p.holdback.emplace(ev.a, ev.t);
      return;
    }
    commit_block(ev.b, ev.a, ev.t);
    for (auto it = p.holdback.find(p.next_height); it != p.holdback.end();
         it = p.holdback.find(p.next_height)) {
      double t = it->second;
      p.holdback.erase(it);
      commit_block(ev.b, p.next_height, t);
    }
  }

  void commit_block(uint32_t g, uint64_t height, double deliver_t) {
    Peer& p = peers_[g];
    const BlockRt& rt = block_rt_[height - 1];
    double v_start = std::max(deliver_t, p.ready_ms);
    double v_end = v_start + rt.validate_ms;
    double lag = 0.0;
    if (cfg_.commit_lag.enabled)
      lag = p.lag_rng.uniform(cfg_.commit_lag.min_ms, cfg_.commit_lag.max_ms) *
            (db_.put_ms / 0.5);
    if (cfg_.ramdisk) lag *= cfg_.ramdisk_factor;
    if (cfg_.mode == Mode::kFabricsharp) lag += cfg_.snapshot_staleness_ms;
    double apply_at = v_end + lag;
    p.ready_ms = apply_at;
    p.next_height = height + 1;
    push(apply_at, EvKind::kApply, height, g);
    if (g == 0) {
      Block& b = ledger_[height - 1];
      for (Transaction& tx : b.txs) tx.commit_ms = v_end;
      for (size_t i : rt.patch_failures) failures_[i].detected_ms = v_end;
    }
  }

  void on_apply(const Ev& ev) {
    Peer& p = peers_[ev.b];
    for (const auto& [ws, loc] : block_rt_[ev.a - 1].applies) p.replica.apply(ws, loc);
  }

  SimulationResult summarize() {
    double latency_sum = 0.0;
    uint64_t latency_n = 0;
    double last_commit = 0.0;
    uint64_t ledger_txs = 0;
    for (const Block& b : ledger_) {
      ++metrics_.blocks;
      for (const Transaction& tx : b.txs) {
        ++ledger_txs;
        last_commit = std::max(last_commit, tx.commit_ms);
        switch (tx.final_status) {
          case TxStatus::kSuccess: ++metrics_.success; break;
          case TxStatus::kEndorsementPolicyFailure: ++metrics_.endorsement_failures; break;
          case TxStatus::kMvccIntraBlock: ++metrics_.mvcc_intra; break;
          case TxStatus::kMvccInterBlock: ++metrics_.mvcc_inter; break;
          case TxStatus::kPhantomRead: ++metrics_.phantom; break;
          case TxStatus::kEarlyAbortReorder: ++metrics_.early_aborts; break;
          case TxStatus::kUnset: break;
        }
        if (tx.final_status != TxStatus::kEarlyAbortReorder) {
          latency_sum += tx.commit_ms - tx.submit_ms;
          ++latency_n;
        }
      }
    }
    metrics_.early_aborts += sharp_rejects_;
    if (latency_n > 0) metrics_.avg_total_latency_ms = latency_sum / latency_n;
    if (last_commit > 0.0)
      metrics_.committed_tps = static_cast<double>(ledger_txs) / (last_commit / 1000.0);

    SimulationResult res;
    res.ledger = std::move(ledger_);
    res.metrics = metrics_;
    res.failures = std::move(failures_);
    res.event_count = event_count_;
    res.seed = cfg_.seed;
    return res;
  }

  const SimConfig& cfg_;
  const ChaincodeProfile& profile_;
  DbCostModel db_;
  double duration_ms_;
  Rng net_rng_;
  PolicyNode policy_;
  std::vector<int> endorse_orgs_;
  double vscc_ms_ = 0.0;

  std::priority_queue<Ev, std::vector<Ev>, EvLater> q_;
  uint64_t seq_ = 0;
  uint64_t event_count_ = 0;

  std::vector<Peer> peers_;
  std::vector<uint32_t> org_rr_;
  WorldState validator_;  // committed state as of the last cut block

  std::map<uint64_t, TxRuntime> inflight_;
  std::vector<uint64_t> pending_;
  uint64_t pending_bytes_ = 0;
  uint64_t batch_gen_ = 0;

  double stream_free_ = 0.0;
  uint64_t stream_arrived_ = 0;
  uint64_t stream_emitted_ = 0;

  std::optional<SharpAdmission> sharp_;
  uint64_t sharp_rejects_ = 0;

  std::vector<Block> ledger_;
  std::vector<BlockRt> block_rt_;
  uint64_t next_height_ = 1;
  std::vector<FailureRecord> failures_;
  Metrics metrics_;
};

void check_config(const SimConfig& cfg, bool workload_has_ranges) {
  if (cfg.num_orgs < 2) throw ConfigError("CONFIG_INVALID: num_orgs must be at least 2");
  if (cfg.peers_per_org < 1)
    throw ConfigError("CONFIG_INVALID: peers_per_org must be at least 1");
  if (cfg.block_size < 1) throw ConfigError("CONFIG_INVALID: block_size must be at least 1");
  if (cfg.block_timeout_ms <= 0.0)
    throw ConfigError("CONFIG_INVALID: block_timeout_ms must be positive");
  if (cfg.net.client_peer_ms < 0.0 || cfg.net.client_orderer_ms < 0.0 ||
      cfg.net.orderer_peer_ms < 0.0)
    throw ConfigError("CONFIG_INVALID: network delays must be nonnegative");
  for (const OrgDelay& d : cfg.net.org_extra)
    if (d.mean_ms < 0.0 || d.jitter_ms < 0.0)
      throw ConfigError("CONFIG_INVALID: per-org delays must be nonnegative");
  if (cfg.commit_lag.min_ms < 0.0 || cfg.commit_lag.max_ms < cfg.commit_lag.min_ms)
    throw ConfigError("CONFIG_INVALID: commit_lag range is malformed");
  if (cfg.stream_overhead_ms < 0.0)
    throw ConfigError("CONFIG_INVALID: stream_overhead_ms must be nonnegative");

  PolicyNode policy;
  try {
    policy = cfg.policy();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("CONFIG_INVALID: ") + e.what());
  }
  for (int org : policy_orgs(policy))
    if (org < 0 || org >= static_cast<int>(cfg.num_orgs))
      throw ConfigError("CONFIG_INVALID: policy references org " + std::to_string(org) +
                        " outside [0, " + std::to_string(cfg.num_orgs) + ")");
  if (cfg.mode == Mode::kFabricsharp && workload_has_ranges)
    throw ConfigError("CONFIG_INVALID: FABRICSHARP does not support range reads");
}

bool intents_have_ranges(const std::vector<TxIntent>& intents) {
  for (const TxIntent& in : intents)
    for (const IntentOp& op : in.ops)
      if (op.kind == OpKind::kRange) return true;
  return false;
}

}  // namespace

SimulationResult run(const SimConfig& cfg, const ChaincodeProfile& profile,
                     const std::vector<TxIntent>& intents, double duration_ms) {
  check_config(cfg, intents_have_ranges(intents));
  return Sim(cfg, profile, intents, duration_ms).finish();
}

SimulationResult run(const SimConfig& cfg, const ChaincodeProfile& profile,
                     const WorkloadSpec& wl) {
  if (wl.rate_tps <= 0.0) throw ConfigError("CONFIG_INVALID: rate_tps must be positive");
  if (wl.duration_s <= 0.0) throw ConfigError("CONFIG_INVALID: duration_s must be positive");
  TxIntentStream stream(profile, wl);
  check_config(cfg, stream.has_range_ops());
  std::vector<TxIntent> intents;
  while (auto next = stream.next()) intents.push_back(std::move(*next));
  return run(cfg, profile, intents, stream.duration_ms());
}

SimulationResult run(const SimConfig& cfg, const WorkloadSpec& wl) {
  ChaincodeProfile profile = profile_for(wl);
  return run(cfg, profile, wl);
}

}  // namespace eovsim

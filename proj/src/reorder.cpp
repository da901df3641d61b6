#include "eovsim/reorder.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

namespace eovsim {

bool TxFootprint::reads_key(const Key& k) const {
  if (std::binary_search(reads.begin(), reads.end(), k)) return true;
  for (const auto& [lo, hi] : read_ranges)
    if (lo <= k && k <= hi) return true;
  return false;
}

bool TxFootprint::writes_key(const Key& k) const {
  return std::binary_search(writes.begin(), writes.end(), k);
}

TxFootprint footprint_of(uint64_t tx_id, const ReadSet& rs,
                         const std::vector<RangeRead>& ranges, const WriteSet& ws) {
  TxFootprint fp;
  fp.tx_id = tx_id;
  for (const ReadEntry& r : rs) fp.reads.push_back(r.key);
  for (const WriteEntry& w : ws) fp.writes.push_back(w.key);
  std::sort(fp.reads.begin(), fp.reads.end());
  std::sort(fp.writes.begin(), fp.writes.end());
  fp.expanded_keys = fp.reads.size() + fp.writes.size();
  for (const RangeRead& rr : ranges) {
    fp.read_ranges.emplace_back(rr.start_key, rr.end_key);
    fp.expanded_keys += rr.observed.size();
  }
  return fp;
}

bool ConflictGraph::has_edge(uint32_t writer, uint32_t reader) const {
  const auto& v = adj[writer];
  return std::find(v.begin(), v.end(), reader) != v.end();
}

ConflictGraph build_conflict_graph(const std::vector<TxFootprint>& txs) {
  ConflictGraph g;
  g.n = txs.size();
  g.adj.resize(g.n);
  for (uint32_t w = 0; w < g.n; ++w) {
    for (uint32_t r = 0; r < g.n; ++r) {
      if (r == w) continue;
      bool conflict = false;
      for (const Key& k : txs[w].writes)
        if (txs[r].reads_key(k)) {
          conflict = true;
          break;
        }
      if (conflict) {
        g.adj[w].push_back(r);
        ++g.edge_count;
      }
    }
  }
  return g;
}

namespace {

// Iterative Tarjan over the subgraph of nodes with alive[v] == true.
std::vector<std::vector<uint32_t>> sccs(const ConflictGraph& g,
                                        const std::vector<bool>& alive) {
  size_t n = g.n;
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<uint32_t> stack;
  std::vector<std::vector<uint32_t>> out;
  int next_index = 0;

  struct Frame {
    uint32_t v;
    size_t child;
  };
  for (uint32_t root = 0; root < n; ++root) {
    if (!alive[root] || index[root] != -1) continue;
    std::vector<Frame> frames{{root, 0}};
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      Frame& f = frames.back();
      if (f.child < g.adj[f.v].size()) {
        uint32_t w = g.adj[f.v][f.child++];
        if (!alive[w]) continue;
        if (index[w] == -1) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
      } else {
        if (low[f.v] == index[f.v]) {
          std::vector<uint32_t> comp;
          uint32_t w;
          do {
            w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            comp.push_back(w);
          } while (w != f.v);
          if (comp.size() > 1) {
            std::sort(comp.begin(), comp.end());
            out.push_back(std::move(comp));
          }
        }
        uint32_t v = f.v;
        frames.pop_back();
        if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
      }
    }
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return out;
}

}  // namespace

std::vector<std::vector<uint32_t>> find_cycles(const ConflictGraph& g) {
  std::vector<bool> alive(g.n, true);
  return sccs(g, alive);
}

std::vector<uint32_t> greedy_mfvs(const ConflictGraph& g,
                                  const std::vector<uint64_t>& tx_ids) {
  std::vector<bool> alive(g.n, true);
  std::vector<uint32_t> removed;
  for (;;) {
    auto comps = sccs(g, alive);
    if (comps.empty()) break;
    bool have = false;
    uint32_t best = 0;
    uint64_t best_score = 0;
    for (const auto& comp : comps) {
      std::vector<bool> in_comp(g.n, false);
      for (uint32_t v : comp) in_comp[v] = true;
      for (uint32_t v : comp) {
        uint64_t out_deg = 0, in_deg = 0;
        for (uint32_t w : g.adj[v])
          if (in_comp[w]) ++out_deg;
        for (uint32_t u : comp)
          if (u != v && g.has_edge(u, v)) ++in_deg;
        uint64_t score = in_deg * out_deg;
        if (!have || score > best_score ||
            (score == best_score && tx_ids[v] < tx_ids[best])) {
          have = true;
          best = v;
          best_score = score;
        }
      }
    }
    alive[best] = false;
    removed.push_back(best);
  }
  return removed;
}

ReorderOutcome reorder_block(const std::vector<TxFootprint>& txs,
                             const ReorderCostModel& cost) {
  ReorderOutcome out;
  size_t n = txs.size();
  ConflictGraph g = build_conflict_graph(txs);

  double mean_keys = 0.0;
  for (const TxFootprint& fp : txs) mean_keys += static_cast<double>(fp.expanded_keys);
  if (n > 0) mean_keys /= static_cast<double>(n);
  out.cost_ms = cost.graph_coeff_ms * static_cast<double>(n) * static_cast<double>(n) *
                    mean_keys +
                cost.sort_coeff_ms * static_cast<double>(n + g.edge_count);

  std::vector<uint64_t> ids(n);
  for (size_t i = 0; i < n; ++i) ids[i] = txs[i].tx_id;
  out.aborted = greedy_mfvs(g, ids);

  std::vector<bool> alive(n, true);
  for (uint32_t v : out.aborted) alive[v] = false;

  // Precedence: an edge writer->reader in the conflict graph means the
  // reader endorsed pre-block state, so it must be scheduled first.
  std::vector<std::vector<uint32_t>> succ(n);
  std::vector<uint32_t> indeg(n, 0);
  for (uint32_t w = 0; w < n; ++w) {
    if (!alive[w]) continue;
    for (uint32_t r : g.adj[w]) {
      if (!alive[r]) continue;
      succ[r].push_back(w);
      ++indeg[w];
    }
  }
  auto cmp = [&](uint32_t a, uint32_t b) { return ids[a] > ids[b]; };
  std::priority_queue<uint32_t, std::vector<uint32_t>, decltype(cmp)> ready(cmp);
  for (uint32_t v = 0; v < n; ++v)
    if (alive[v] && indeg[v] == 0) ready.push(v);
  while (!ready.empty()) {
    uint32_t v = ready.top();
    ready.pop();
    out.order.push_back(v);
    for (uint32_t w : succ[v])
      if (--indeg[w] == 0) ready.push(w);
  }
  return out;
}

std::optional<SharpAdmission::Rejection> SharpAdmission::admit(const TxFootprint& fp,
                                                               const ReadSet& reads) {
  if (!fp.read_ranges.empty())
    throw std::invalid_argument("RANGE_UNSUPPORTED: fabricsharp cannot admit range reads");

  // Reads must match the state all earlier blocks produce; anything older
  // would have to be ordered before an already-emitted block.
  for (const ReadEntry& r : reads) {
    auto cur = committed_->read(r.key);
    uint64_t cur_version = cur ? cur->version : 0;
    if (r.version != cur_version) {
      Rejection rej;
      rej.key = r.key;
      rej.stale = true;
      if (cur)
        rej.writer = cur->last_writer;
      else
        rej.writer = committed_->tombstone(r.key);
      return rej;
    }
  }

  // Precedence edges against the pending batch: the candidate precedes every
  // pending writer of its keys, and follows every pending reader of its
  // writes. The batch is acyclic, so any new cycle runs through the
  // candidate; a DFS from its successors suffices.
  auto first_conflict = [](const TxFootprint& reader, const TxFootprint& writer) -> const Key* {
    for (const Key& k : writer.writes)
      if (reader.reads_key(k)) return &k;
    return nullptr;
  };
  std::vector<uint32_t> out_edges, in_edges;
  const Key* first_out_key = nullptr;
  for (uint32_t i = 0; i < batch_.size(); ++i) {
    if (const Key* k = first_conflict(fp, batch_[i])) {
      out_edges.push_back(i);
      if (!first_out_key) first_out_key = k;
    }
    if (first_conflict(batch_[i], fp)) in_edges.push_back(i);
  }
  if (!out_edges.empty() && !in_edges.empty()) {
    std::vector<bool> precedes_fp(batch_.size(), false);
    for (uint32_t i : in_edges) precedes_fp[i] = true;
    std::vector<bool> seen(batch_.size(), false);
    std::vector<uint32_t> todo(out_edges.begin(), out_edges.end());
    while (!todo.empty()) {
      uint32_t v = todo.back();
      todo.pop_back();
      if (seen[v]) continue;
      seen[v] = true;
      if (precedes_fp[v]) {
        Rejection rej;
        rej.key = *first_out_key;
        rej.stale = false;
        return rej;
      }
      for (uint32_t w : succ_[v])
        if (!seen[w]) todo.push_back(w);
    }
  }
  uint32_t x = static_cast<uint32_t>(batch_.size());
  batch_.push_back(fp);
  succ_.emplace_back(std::move(out_edges));
  for (uint32_t r : in_edges) succ_[r].push_back(x);
  return std::nullopt;
}

std::vector<uint32_t> SharpAdmission::cut() {
  size_t n = batch_.size();
  std::vector<uint32_t> indeg(n, 0);
  for (const auto& edges : succ_)
    for (uint32_t w : edges) ++indeg[w];
  auto cmp = [&](uint32_t a, uint32_t b) { return batch_[a].tx_id > batch_[b].tx_id; };
  std::priority_queue<uint32_t, std::vector<uint32_t>, decltype(cmp)> ready(cmp);
  for (uint32_t v = 0; v < n; ++v)
    if (indeg[v] == 0) ready.push(v);
  std::vector<uint32_t> order;
  while (!ready.empty()) {
    uint32_t v = ready.top();
    ready.pop();
    order.push_back(v);
    for (uint32_t w : succ_[v])
      if (--indeg[w] == 0) ready.push(w);
  }
  batch_.clear();
  succ_.clear();
  return order;
}

}  // namespace eovsim

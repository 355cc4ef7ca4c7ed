#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "topomuse/network.hpp"
#include "topomuse/rng.hpp"

namespace topomuse {

/// Frequency-weighted multiset of nodes: node ids[i] appears freqs[i] times,
/// so a draw returns id with probability freqs[i] / total.
struct NodePool {
  std::vector<int> ids;             // ascending
  std::vector<std::int64_t> freqs;  // aligned with ids, all >= 1
  std::int64_t total = 0;

  int size() const { return static_cast<int>(ids.size()); }

  std::int64_t frequencyOf(int id) const {
    const auto it = std::lower_bound(ids.begin(), ids.end(), id);
    if (it == ids.end() || *it != id) return 0;
    return freqs[static_cast<std::size_t>(it - ids.begin())];
  }
};

inline NodePool poolFromCounts(std::vector<int> ids, std::vector<std::int64_t> freqs) {
  if (ids.size() != freqs.size()) throw ParseError("pool: ids/freqs length mismatch");
  std::vector<std::size_t> order(ids.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
  NodePool pool;
  pool.ids.reserve(ids.size());
  pool.freqs.reserve(freqs.size());
  for (const std::size_t i : order) {
    if (freqs[i] < 1) throw ParseError("pool: frequency must be >= 1");
    if (!pool.ids.empty() && pool.ids.back() == ids[i]) throw ParseError("pool: duplicate node id");
    pool.ids.push_back(ids[i]);
    pool.freqs.push_back(freqs[i]);
    pool.total += freqs[i];
  }
  return pool;
}

inline NodePool buildPool(const NodeTable& table) {
  std::vector<int> ids(static_cast<std::size_t>(table.size()));
  for (int i = 0; i < table.size(); ++i) ids[static_cast<std::size_t>(i)] = i + 1;
  return poolFromCounts(std::move(ids), table.frequencies);
}

/// Draws a node id with probability proportional to its frequency over the
/// non-excluded support. Exclusion removes every copy of the excluded nodes.
inline int samplePool(const NodePool& pool, Rng& rng, const std::vector<int>& exclude = {}) {
  std::vector<std::int64_t> weights = pool.freqs;
  for (std::size_t i = 0; i < pool.ids.size(); ++i) {
    if (std::find(exclude.begin(), exclude.end(), pool.ids[i]) != exclude.end()) weights[i] = 0;
  }
  std::int64_t total = 0;
  for (const std::int64_t w : weights) total += w;
  if (total == 0) {
    throw EmptySamplingSupport("exclusions cover the entire node pool");
  }
  return pool.ids[rng.weightedIndex(weights)];
}

}  // namespace topomuse

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "topomuse/overlap.hpp"
#include "topomuse/rng.hpp"

namespace topomuse {

/// Structural statistics of a binary Overlap matrix: per-row block counts and
/// run lengths, the distinct-column alphabet with frequencies, the run-level
/// adjacency between distinct columns, and the per-column repeat distribution.
struct PatternStats {
  std::vector<int> block_counts;              // maximal nonzero runs per row
  std::vector<std::vector<int>> run_lengths;  // per row, lengths of those runs

  std::vector<std::vector<std::int64_t>> columns;  // distinct columns, first-seen order
  std::vector<std::int64_t> column_freqs;          // occurrences among the d positions
  std::vector<std::vector<std::int64_t>> repeats;  // per distinct column: run-length multiset
  std::map<int, std::map<int, std::int64_t>> adjacency;  // run of column a -> run of column b

  int columnIndex(const std::vector<std::int64_t>& column) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == column) return static_cast<int>(i);
    }
    return -1;
  }
};

inline PatternStats patternStats(const OverlapMatrix& matrix) {
  const OverlapMatrix binary = asBinary(matrix);
  const int k = binary.cycleCount();
  const int d = binary.length();
  PatternStats stats;

  stats.block_counts.assign(static_cast<std::size_t>(k), 0);
  stats.run_lengths.resize(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    int run = 0;
    for (int j = 0; j <= d; ++j) {
      const bool one = j < d && binary.at(i, j) != 0;
      if (one) {
        ++run;
      } else if (run > 0) {
        ++stats.block_counts[static_cast<std::size_t>(i)];
        stats.run_lengths[static_cast<std::size_t>(i)].push_back(run);
        run = 0;
      }
    }
  }

  // Run-length encode the column sequence to get alphabet, repeats, adjacency.
  int previous = -1;
  int j = 0;
  while (j < d) {
    std::vector<std::int64_t> column(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) column[static_cast<std::size_t>(i)] = binary.at(i, j);
    int idx = stats.columnIndex(column);
    if (idx < 0) {
      idx = static_cast<int>(stats.columns.size());
      stats.columns.push_back(column);
      stats.column_freqs.push_back(0);
      stats.repeats.emplace_back();
    }
    int run = 0;
    while (j < d) {
      bool same = true;
      for (int i = 0; i < k && same; ++i) {
        same = binary.at(i, j) == column[static_cast<std::size_t>(i)];
      }
      if (!same) break;
      ++run;
      ++j;
    }
    stats.column_freqs[static_cast<std::size_t>(idx)] += run;
    stats.repeats[static_cast<std::size_t>(idx)].push_back(run);
    if (previous >= 0) ++stats.adjacency[previous][idx];
    previous = idx;
  }
  return stats;
}

namespace detail {

constexpr int kSeedAttempts = 1000;

inline std::vector<int> sortedUnion(const std::vector<std::vector<int>>& cycles,
                                    const std::vector<int>& ordinals) {
  std::vector<int> out;
  for (const int ordinal : ordinals) {
    const auto& c = cycles[static_cast<std::size_t>(ordinal - 1)];
    out.insert(out.end(), c.begin(), c.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Column-wise integer fill: every 1-entry of a column gets the same node,
/// drawn from the union of the node sets of the cycles active in that column.
/// An integer Overlap matrix of a real piece carries the same note down each
/// column, so the synthesized matrix mimics that structure.
inline OverlapMatrix fillColumnsFromUnions(const OverlapMatrix& binary,
                                           const std::vector<std::vector<int>>& cycles, Rng& rng) {
  OverlapMatrix out = binary;
  out.kind = OverlapKind::kInteger;
  const int k = out.cycleCount();
  for (int j = 0; j < out.length(); ++j) {
    std::vector<int> active;
    for (int i = 0; i < k; ++i) {
      if (binary.at(i, j) != 0) active.push_back(i + 1);
    }
    if (active.empty()) continue;
    const std::vector<int> pool = sortedUnion(cycles, active);
    const int node = pool[rng.index(pool.size())];
    for (const int ordinal : active) {
      out.rows[static_cast<std::size_t>(ordinal - 1)][static_cast<std::size_t>(j)] = node;
    }
  }
  return out;
}

}  // namespace detail

/// Row-by-row seed generator. Per row it re-places exactly as many blocks as
/// the source matrix has, each written as s consecutive ones. Block starts
/// avoid the positions whose source note belongs to a cycle that never
/// co-survives with this row's cycle, and placements are re-drawn until the
/// blocks stay separated, so the per-row block count of the output equals the
/// source's. Fails with SeedPlacementFailed when no separated placement is
/// found within the retry budget.
inline OverlapMatrix seedRowwise(const OverlapMatrix& m,
                                 const std::vector<std::vector<int>>& cycles, int scale, Rng& rng) {
  checkOverlapShape(m);
  if (scale < 1) throw ParseError("scale must be >= 1");
  const OverlapMatrix binary = asBinary(m);
  const int k = binary.cycleCount();
  const int d = binary.length();
  if (k != static_cast<int>(cycles.size())) {
    throw ParseError("cycle count does not match overlap matrix rows");
  }
  std::vector<std::vector<int>> sorted_cycles = cycles;
  for (auto& c : sorted_cycles) std::sort(c.begin(), c.end());

  const PatternStats stats = patternStats(binary);

  // Rows i and i2 overlap when they co-survive in some column.
  auto rowsOverlap = [&](int i, int i2) {
    for (int j = 0; j < d; ++j) {
      if (binary.at(i, j) != 0 && binary.at(i2, j) != 0) return true;
    }
    return false;
  };

  // Positions whose source note belongs to a cycle not overlapping row i.
  // The note at position j is the (shared) nonzero payload of column j.
  std::vector<std::vector<char>> avoid(static_cast<std::size_t>(k),
                                       std::vector<char>(static_cast<std::size_t>(d), 0));
  for (int i = 0; i < k; ++i) {
    std::vector<int> foreign_nodes;
    for (int i2 = 0; i2 < k; ++i2) {
      if (i2 == i || rowsOverlap(i, i2)) continue;
      const auto& c = sorted_cycles[static_cast<std::size_t>(i2)];
      foreign_nodes.insert(foreign_nodes.end(), c.begin(), c.end());
    }
    std::sort(foreign_nodes.begin(), foreign_nodes.end());
    foreign_nodes.erase(std::unique(foreign_nodes.begin(), foreign_nodes.end()),
                        foreign_nodes.end());
    for (int j = 0; j < d; ++j) {
      for (int r = 0; r < k; ++r) {
        const std::int64_t payload = m.kind == OverlapKind::kInteger ? m.at(r, j) : 0;
        if (payload != 0 &&
            std::binary_search(foreign_nodes.begin(), foreign_nodes.end(),
                               static_cast<int>(payload))) {
          avoid[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 1;
          break;
        }
      }
    }
  }

  OverlapMatrix seeded;
  seeded.kind = OverlapKind::kBinary;
  seeded.scale = scale;
  seeded.d = d;
  seeded.rows.assign(static_cast<std::size_t>(k),
                     std::vector<std::int64_t>(static_cast<std::size_t>(d), 0));

  for (int i = 0; i < k; ++i) {
    const int blocks = stats.block_counts[static_cast<std::size_t>(i)];
    if (blocks == 0) continue;
    std::vector<int> candidates;
    for (int j = 0; j + scale <= d; ++j) {
      if (!avoid[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) candidates.push_back(j);
    }
    if (static_cast<int>(candidates.size()) < blocks) {
      throw SeedPlacementFailed("row " + std::to_string(i + 1) + ": only " +
                                std::to_string(candidates.size()) + " admissible starts for " +
                                std::to_string(blocks) + " blocks");
    }
    bool placed = false;
    for (int attempt = 0; attempt < detail::kSeedAttempts && !placed; ++attempt) {
      // Draw `blocks` distinct starts, then require a gap between blocks so
      // that none of them merge and the block count is preserved.
      std::vector<int> starts;
      std::vector<int> bag = candidates;
      for (int b = 0; b < blocks; ++b) {
        const std::size_t pick = rng.index(bag.size());
        starts.push_back(bag[pick]);
        bag.erase(bag.begin() + static_cast<std::ptrdiff_t>(pick));
      }
      std::sort(starts.begin(), starts.end());
      bool separated = true;
      for (std::size_t b = 1; b < starts.size(); ++b) {
        if (starts[b] - starts[b - 1] <= scale) {
          separated = false;
          break;
        }
      }
      if (!separated) continue;
      for (const int start : starts) {
        for (int t = 0; t < scale; ++t) {
          seeded.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(start + t)] = 1;
        }
      }
      placed = true;
    }
    if (!placed) {
      throw SeedPlacementFailed("row " + std::to_string(i + 1) +
                                ": no separated placement found within retry budget");
    }
  }

  return detail::fillColumnsFromUnions(seeded, sorted_cycles, rng);
}

/// Element-by-element seed generator: the support is kept exactly and every
/// nonzero entry of row i is replaced by an independent uniform draw from the
/// nodes of cycle i.
inline OverlapMatrix seedElementwise(const OverlapMatrix& m,
                                     const std::vector<std::vector<int>>& cycles, Rng& rng) {
  checkOverlapShape(m);
  if (m.cycleCount() != static_cast<int>(cycles.size())) {
    throw ParseError("cycle count does not match overlap matrix rows");
  }
  std::vector<std::vector<int>> sorted_cycles = cycles;
  for (auto& c : sorted_cycles) std::sort(c.begin(), c.end());
  OverlapMatrix out = m;
  out.kind = OverlapKind::kInteger;
  for (int i = 0; i < out.cycleCount(); ++i) {
    const auto& cycle = sorted_cycles[static_cast<std::size_t>(i)];
    if (cycle.empty()) {
      bool has_support = false;
      for (int j = 0; j < out.length(); ++j) has_support = has_support || m.at(i, j) != 0;
      if (has_support) throw ParseError("row " + std::to_string(i + 1) + " has support but empty cycle");
      continue;
    }
    for (int j = 0; j < out.length(); ++j) {
      if (m.at(i, j) != 0) {
        out.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            cycle[rng.index(cycle.size())];
      }
    }
  }
  return out;
}

/// Column-by-column seed generator. Columns are drawn from the source's
/// distinct-column alphabet by frequency, repeated according to the observed
/// per-column repeat distribution, and chained through the observed adjacency
/// map; a candidate column is admissible only when appending it leaves every
/// ended run at length >= s. Attempts restart until the per-row block counts
/// come within +/-1 of the source's, and the integer fill copies a random
/// source column with the same support.
inline OverlapMatrix seedColumnwise(const OverlapMatrix& m,
                                    const std::vector<std::vector<int>>& cycles, int scale,
                                    Rng& rng) {
  checkOverlapShape(m);
  if (scale < 1) throw ParseError("scale must be >= 1");
  const OverlapMatrix binary = asBinary(m);
  const int k = binary.cycleCount();
  const int d = binary.length();
  if (k != static_cast<int>(cycles.size())) {
    throw ParseError("cycle count does not match overlap matrix rows");
  }
  const PatternStats stats = patternStats(binary);
  if (stats.columns.empty()) {
    OverlapMatrix out = m;
    out.kind = OverlapKind::kInteger;
    return out;  // d == 0
  }

  // Distinct integer columns of the source keyed by binary support.
  std::map<std::vector<char>, std::vector<std::vector<std::int64_t>>> fill_choices;
  for (int j = 0; j < d; ++j) {
    std::vector<char> support(static_cast<std::size_t>(k));
    std::vector<std::int64_t> column(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
      column[static_cast<std::size_t>(i)] = m.at(i, j);
      support[static_cast<std::size_t>(i)] = m.at(i, j) != 0 ? 1 : 0;
    }
    auto& bucket = fill_choices[support];
    if (std::find(bucket.begin(), bucket.end(), column) == bucket.end()) bucket.push_back(column);
  }
  for (auto& [support, bucket] : fill_choices) std::sort(bucket.begin(), bucket.end());

  auto blockCountsOf = [&](const std::vector<std::vector<std::int64_t>>& out_columns) {
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (int i = 0; i < k; ++i) {
      int run = 0;
      for (int j = 0; j <= static_cast<int>(out_columns.size()); ++j) {
        const bool one = j < static_cast<int>(out_columns.size()) &&
                         out_columns[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] != 0;
        if (one) {
          ++run;
        } else if (run > 0) {
          ++counts[static_cast<std::size_t>(i)];
          run = 0;
        }
      }
    }
    return counts;
  };

  for (int attempt = 0; attempt < detail::kSeedAttempts; ++attempt) {
    std::vector<std::vector<std::int64_t>> out_columns;
    std::vector<int> run(static_cast<std::size_t>(k), 0);

    // Appending a column may only end runs that already reached the scale.
    auto admissible = [&](int column_idx) {
      const auto& column = stats.columns[static_cast<std::size_t>(column_idx)];
      for (int i = 0; i < k; ++i) {
        if (run[static_cast<std::size_t>(i)] > 0 && run[static_cast<std::size_t>(i)] < scale &&
            column[static_cast<std::size_t>(i)] == 0) {
          return false;
        }
      }
      return true;
    };

    int current = static_cast<int>(rng.weightedIndex(stats.column_freqs));
    bool dead = false;
    while (static_cast<int>(out_columns.size()) < d && !dead) {
      if (!admissible(current)) {
        dead = true;
        break;
      }
      const auto& repeat_bag = stats.repeats[static_cast<std::size_t>(current)];
      std::int64_t times = repeat_bag[rng.index(repeat_bag.size())];
      times = std::min<std::int64_t>(times, d - static_cast<int>(out_columns.size()));
      const auto& column = stats.columns[static_cast<std::size_t>(current)];
      for (std::int64_t t = 0; t < times; ++t) {
        out_columns.push_back(column);
        for (int i = 0; i < k; ++i) {
          run[static_cast<std::size_t>(i)] =
              column[static_cast<std::size_t>(i)] != 0 ? run[static_cast<std::size_t>(i)] + 1 : 0;
        }
      }
      if (static_cast<int>(out_columns.size()) == d) break;

      const auto adjacency_it = stats.adjacency.find(current);
      if (adjacency_it == stats.adjacency.end()) {
        dead = true;
        break;
      }
      std::vector<int> next_ids;
      std::vector<std::int64_t> next_weights;
      for (const auto& [next, count] : adjacency_it->second) {
        if (admissible(next)) {
          next_ids.push_back(next);
          next_weights.push_back(count);
        }
      }
      if (next_ids.empty()) {
        dead = true;
        break;
      }
      current = next_ids[rng.weightedIndex(next_weights)];
    }
    if (dead) continue;

    // Trailing runs must also satisfy the scale.
    bool tail_ok = true;
    for (int i = 0; i < k; ++i) {
      if (run[static_cast<std::size_t>(i)] > 0 && run[static_cast<std::size_t>(i)] < scale) {
        tail_ok = false;
      }
    }
    if (!tail_ok) continue;

    const std::vector<int> counts = blockCountsOf(out_columns);
    bool similar = true;
    for (int i = 0; i < k; ++i) {
      if (std::abs(counts[static_cast<std::size_t>(i)] -
                   stats.block_counts[static_cast<std::size_t>(i)]) > 1) {
        similar = false;
        break;
      }
    }
    if (!similar) continue;

    // Integer fill from source columns with matching support.
    OverlapMatrix out;
    out.kind = OverlapKind::kInteger;
    out.scale = scale;
    out.d = d;
    out.rows.assign(static_cast<std::size_t>(k),
                    std::vector<std::int64_t>(static_cast<std::size_t>(d), 0));
    for (int j = 0; j < d; ++j) {
      std::vector<char> support(static_cast<std::size_t>(k));
      for (int i = 0; i < k; ++i) {
        support[static_cast<std::size_t>(i)] =
            out_columns[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] != 0 ? 1 : 0;
      }
      const auto& bucket = fill_choices.at(support);
      const auto& chosen = bucket[rng.index(bucket.size())];
      for (int i = 0; i < k; ++i) {
        out.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            chosen[static_cast<std::size_t>(i)];
      }
    }
    return out;
  }
  throw SeedPlacementFailed("no s-scale-feasible column sequence within retry budget");
}

}  // namespace topomuse

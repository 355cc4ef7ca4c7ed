// Test-only reference implementations, deliberately written along different
// lines than the library code they check: dense naive persistence reduction,
// exhaustive path enumeration, and a flag-vector run scan for Overlap
// matrices.
#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <vector>

#include "topomuse/persistence.hpp"

#include "topomuse/network.hpp"
#include "topomuse/overlap.hpp"
#include "topomuse/rational.hpp"
#include "topomuse/rng.hpp"

namespace oracles {

using topomuse::DistanceMatrix;
using topomuse::MusicNetwork;
using topomuse::OverlapKind;
using topomuse::OverlapMatrix;
using topomuse::Rational;
using topomuse::Rng;

// --- persistence -------------------------------------------------------------

struct BareInterval {
  int dim = 0;
  Rational birth;
  std::optional<Rational> death;

  auto key() const {
    return std::make_tuple(dim, birth, death.has_value(), death.value_or(Rational(0)));
  }
  bool operator<(const BareInterval& other) const { return key() < other.key(); }
  bool operator==(const BareInterval& other) const { return key() == other.key(); }
};

/// Naive reduction of the full Rips boundary matrix: columns as plain sets,
/// pivot lookup by linear scan over all earlier columns, no caching. Returns
/// the dim-0/1 intervals with zero-length ones dropped.
inline std::vector<BareInterval> bruteForceBarcode(const DistanceMatrix& dist) {
  const int q = dist.size();
  struct Cell {
    std::vector<int> verts;
    Rational filt;
  };
  std::vector<Cell> cells;
  for (int i = 0; i < q; ++i) cells.push_back({{i}, Rational(0)});
  for (int i = 0; i < q; ++i) {
    for (int j = i + 1; j < q; ++j) cells.push_back({{i, j}, dist.at(i, j)});
  }
  for (int i = 0; i < q; ++i) {
    for (int j = i + 1; j < q; ++j) {
      for (int k = j + 1; k < q; ++k) {
        Rational f = dist.at(i, j);
        if (dist.at(i, k) > f) f = dist.at(i, k);
        if (dist.at(j, k) > f) f = dist.at(j, k);
        cells.push_back({{i, j, k}, f});
      }
    }
  }
  std::stable_sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
    if (a.filt != b.filt) return a.filt < b.filt;
    if (a.verts.size() != b.verts.size()) return a.verts.size() < b.verts.size();
    return a.verts < b.verts;
  });

  const int n = static_cast<int>(cells.size());
  std::map<std::vector<int>, int> position;
  for (int i = 0; i < n; ++i) position[cells[static_cast<std::size_t>(i)].verts] = i;

  std::vector<std::set<int>> columns(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto& verts = cells[static_cast<std::size_t>(i)].verts;
    if (verts.size() >= 2) {
      for (std::size_t drop = 0; drop < verts.size(); ++drop) {
        std::vector<int> face;
        for (std::size_t v = 0; v < verts.size(); ++v) {
          if (v != drop) face.push_back(verts[v]);
        }
        columns[static_cast<std::size_t>(i)].insert(position.at(face));
      }
    }
  }

  auto low = [&](int j) -> int {
    return columns[static_cast<std::size_t>(j)].empty() ? -1
                                                        : *columns[static_cast<std::size_t>(j)].rbegin();
  };

  for (int j = 0; j < n; ++j) {
    while (low(j) >= 0) {
      int other = -1;
      for (int j2 = 0; j2 < j; ++j2) {
        if (low(j2) == low(j)) {
          other = j2;
          break;
        }
      }
      if (other < 0) break;
      // GF(2) column addition.
      for (const int row : columns[static_cast<std::size_t>(other)]) {
        auto& col = columns[static_cast<std::size_t>(j)];
        const auto it = col.find(row);
        if (it != col.end()) {
          col.erase(it);
        } else {
          col.insert(row);
        }
      }
    }
  }

  std::vector<int> killed_by(static_cast<std::size_t>(n), -1);
  for (int j = 0; j < n; ++j) {
    const int l = low(j);
    if (l >= 0) killed_by[static_cast<std::size_t>(l)] = j;
  }

  std::vector<BareInterval> intervals;
  for (int i = 0; i < n; ++i) {
    if (low(i) >= 0) continue;  // not a creator
    const int dim = static_cast<int>(cells[static_cast<std::size_t>(i)].verts.size()) - 1;
    if (dim > 1) continue;
    const int killer = killed_by[static_cast<std::size_t>(i)];
    if (killer < 0) {
      intervals.push_back({dim, cells[static_cast<std::size_t>(i)].filt, std::nullopt});
    } else if (cells[static_cast<std::size_t>(killer)].filt !=
               cells[static_cast<std::size_t>(i)].filt) {
      intervals.push_back({dim, cells[static_cast<std::size_t>(i)].filt,
                           cells[static_cast<std::size_t>(killer)].filt});
    }
  }
  std::sort(intervals.begin(), intervals.end());
  return intervals;
}

inline std::vector<BareInterval> sortedIntervals(const std::vector<topomuse::PersistenceInterval>& in) {
  std::vector<BareInterval> out;
  for (const auto& interval : in) out.push_back({interval.dim, interval.birth, interval.death});
  std::sort(out.begin(), out.end());
  return out;
}

// --- shortest paths ------------------------------------------------------------

struct PathChoice {
  std::vector<int> nodes;  // 1-based ids
  Rational cost;
};

/// Enumerates every simple path between two nodes and picks the winner by
/// (hop count, reciprocal-weight sum, lexicographic node sequence). Only
/// feasible for small graphs.
inline std::optional<PathChoice> exhaustiveMinPath(const MusicNetwork& net, int id_a, int id_b) {
  const int q = net.size();
  std::optional<PathChoice> best;
  std::vector<int> stack{id_a};
  std::vector<char> used(static_cast<std::size_t>(q + 1), 0);
  used[static_cast<std::size_t>(id_a)] = 1;

  auto consider = [&]() {
    Rational cost(0);
    for (std::size_t i = 0; i + 1 < stack.size(); ++i) {
      cost += Rational(1, net.weight(stack[i], stack[i + 1]));
    }
    const PathChoice candidate{stack, cost};
    if (!best) {
      best = candidate;
      return;
    }
    const auto key = [](const PathChoice& p) {
      return std::make_tuple(p.nodes.size(), p.cost, p.nodes);
    };
    if (key(candidate) < key(*best)) best = candidate;
  };

  std::function<void()> explore = [&]() {
    const int current = stack.back();
    if (current == id_b) {
      consider();
      return;
    }
    for (int next = 1; next <= q; ++next) {
      if (!used[static_cast<std::size_t>(next)] && net.weight(current, next) > 0) {
        used[static_cast<std::size_t>(next)] = 1;
        stack.push_back(next);
        explore();
        stack.pop_back();
        used[static_cast<std::size_t>(next)] = 0;
      }
    }
  };
  explore();
  return best;
}

// --- overlap -------------------------------------------------------------------

/// Maximal-run scan: mark membership flags per row, collect runs, threshold
/// at s, fill payloads.
inline OverlapMatrix runScanOverlap(const std::vector<int>& flow,
                                    const std::vector<std::vector<int>>& cycles, int scale) {
  const int d = static_cast<int>(flow.size());
  OverlapMatrix m;
  m.kind = OverlapKind::kInteger;
  m.scale = scale;
  m.d = d;
  m.rows.assign(cycles.size(), std::vector<std::int64_t>(static_cast<std::size_t>(d), 0));
  for (std::size_t i = 0; i < cycles.size(); ++i) {
    std::vector<char> member(static_cast<std::size_t>(d), 0);
    for (int j = 0; j < d; ++j) {
      member[static_cast<std::size_t>(j)] =
          std::find(cycles[i].begin(), cycles[i].end(), flow[static_cast<std::size_t>(j)]) !=
          cycles[i].end();
    }
    int j = 0;
    while (j < d) {
      if (!member[static_cast<std::size_t>(j)]) {
        ++j;
        continue;
      }
      int end = j;
      while (end < d && member[static_cast<std::size_t>(end)]) ++end;
      if (end - j >= scale) {
        for (int col = j; col < end; ++col) {
          m.rows[i][static_cast<std::size_t>(col)] = flow[static_cast<std::size_t>(col)];
        }
      }
      j = end;
    }
  }
  return m;
}

// --- random instances ------------------------------------------------------------

/// Connected weighted graph: random spanning tree plus random extra edges.
inline MusicNetwork randomConnectedGraph(Rng& rng, int q, int max_weight = 9) {
  std::vector<std::vector<std::int64_t>> weights(
      static_cast<std::size_t>(q), std::vector<std::int64_t>(static_cast<std::size_t>(q), 0));
  auto link = [&](int a, int b) {
    const std::int64_t w = 1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(max_weight)));
    weights[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = w;
    weights[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = w;
  };
  for (int v = 1; v < q; ++v) link(v, static_cast<int>(rng.below(static_cast<std::uint64_t>(v))));
  const int extra = static_cast<int>(rng.below(static_cast<std::uint64_t>(q) + 1));
  for (int e = 0; e < extra; ++e) {
    const int a = static_cast<int>(rng.index(static_cast<std::size_t>(q)));
    const int b = static_cast<int>(rng.index(static_cast<std::size_t>(q)));
    if (a != b && weights[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] == 0) link(a, b);
  }
  return MusicNetwork::fromWeights(std::move(weights));
}

/// Random flow over node ids 1..q, biased toward runs so Overlap matrices of
/// small scale are nonempty.
inline std::vector<int> randomFlow(Rng& rng, int length, int q,
                                   const std::vector<std::vector<int>>& cycles) {
  std::vector<int> flow;
  while (static_cast<int>(flow.size()) < length) {
    if (!cycles.empty() && rng.below(2) == 0) {
      // Emit a run drawn from one cycle.
      const auto& cycle = cycles[rng.index(cycles.size())];
      const int run = 3 + static_cast<int>(rng.below(6));
      for (int t = 0; t < run && static_cast<int>(flow.size()) < length; ++t) {
        flow.push_back(cycle[rng.index(cycle.size())]);
      }
    } else {
      flow.push_back(1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(q))));
    }
  }
  return flow;
}

inline std::vector<std::vector<int>> randomCycles(Rng& rng, int count, int q, int min_size = 3,
                                                  int max_size = 6) {
  std::vector<std::vector<int>> cycles;
  for (int c = 0; c < count; ++c) {
    const int size =
        min_size + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_size - min_size + 1)));
    std::set<int> nodes;
    while (static_cast<int>(nodes.size()) < std::min(size, q)) {
      nodes.insert(1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(q))));
    }
    cycles.emplace_back(nodes.begin(), nodes.end());
  }
  return cycles;
}

}  // namespace oracles

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <vector>

#include "topomuse/note.hpp"
#include "topomuse/rational.hpp"

namespace topomuse {

/// Distinct notes of a score, sorted ascending by pitch first then duration.
/// Node ids are 1-based; id j refers to nodes[j-1].
struct NodeTable {
  std::vector<Note> nodes;
  std::vector<std::int64_t> frequencies;
  std::int64_t total = 0;  // flow length d

  int size() const { return static_cast<int>(nodes.size()); }

  const Note& note(int id) const { return nodes.at(static_cast<std::size_t>(id - 1)); }

  int idOf(const Note& note) const {
    const auto it = std::lower_bound(nodes.begin(), nodes.end(), note);
    if (it == nodes.end() || !(*it == note)) {
      throw InternalError("node table: unknown note");
    }
    return static_cast<int>(it - nodes.begin()) + 1;
  }

  static NodeTable fromScore(const Score& score) {
    checkScore(score);
    std::map<Note, std::int64_t> counts;
    for (const Note& note : score.flow) ++counts[note];
    NodeTable table;
    table.nodes.reserve(counts.size());
    table.frequencies.reserve(counts.size());
    for (const auto& [note, count] : counts) {  // std::map iterates in sorted order
      table.nodes.push_back(note);
      table.frequencies.push_back(count);
    }
    table.total = static_cast<std::int64_t>(score.flow.size());
    return table;
  }
};

/// Weighted undirected graph over distinct notes. w[i][j] counts how many
/// times nodes i+1 and j+1 occur adjacent in the flow; 0 means no edge and
/// the diagonal is always 0 (consecutive identical notes contribute nothing).
class MusicNetwork {
 public:
  static MusicNetwork build(const Score& score) {
    NodeTable table = NodeTable::fromScore(score);
    if (table.size() < 2) {
      throw DisconnectedNetwork("network needs at least 2 distinct notes, got " +
                                std::to_string(table.size()));
    }
    const int q = table.size();
    std::vector<std::vector<std::int64_t>> weights(
        static_cast<std::size_t>(q), std::vector<std::int64_t>(static_cast<std::size_t>(q), 0));
    for (std::size_t t = 0; t + 1 < score.flow.size(); ++t) {
      const int a = table.idOf(score.flow[t]) - 1;
      const int b = table.idOf(score.flow[t + 1]) - 1;
      if (a == b) continue;
      ++weights[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
      ++weights[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)];
    }
    return MusicNetwork(std::move(table), std::move(weights));
  }

  /// Construction from an explicit node table and weight matrix (artifact
  /// files, synthetic graphs in tests).
  static MusicNetwork fromParts(NodeTable table, std::vector<std::vector<std::int64_t>> weights) {
    const int q = table.size();
    if (static_cast<int>(weights.size()) != q) {
      throw ParseError("weight matrix size does not match node table");
    }
    for (int i = 0; i < q; ++i) {
      if (static_cast<int>(weights[static_cast<std::size_t>(i)].size()) != q) {
        throw ParseError("weight matrix must be square");
      }
      for (int j = 0; j < q; ++j) {
        const std::int64_t w = weights[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        if (w < 0) throw ParseError("negative edge weight");
        if (i == j && w != 0) throw ParseError("nonzero diagonal weight");
        if (w != weights[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]) {
          throw ParseError("weight matrix must be symmetric");
        }
      }
    }
    return MusicNetwork(std::move(table), std::move(weights));
  }

  /// Synthetic construction over a bare weight matrix; nodes get placeholder
  /// notes (pitch 60+i, duration 1). Used by randomized suites.
  static MusicNetwork fromWeights(std::vector<std::vector<std::int64_t>> weights) {
    const int q = static_cast<int>(weights.size());
    NodeTable table;
    for (int i = 0; i < q; ++i) {
      table.nodes.push_back(Note{Pitch{(60 + i) % 128}, Rational(i / 128 + 1)});
      table.frequencies.push_back(1);
      ++table.total;
    }
    return fromParts(std::move(table), std::move(weights));
  }

  const NodeTable& table() const { return table_; }
  int size() const { return table_.size(); }

  std::int64_t weight(int id_a, int id_b) const {
    return weights_.at(static_cast<std::size_t>(id_a - 1)).at(static_cast<std::size_t>(id_b - 1));
  }

  const std::vector<std::vector<std::int64_t>>& weights() const { return weights_; }

  bool connected() const {
    const int q = size();
    if (q == 0) return false;
    std::vector<char> seen(static_cast<std::size_t>(q), 0);
    std::queue<int> frontier;
    frontier.push(0);
    seen[0] = 1;
    int count = 1;
    while (!frontier.empty()) {
      const int u = frontier.front();
      frontier.pop();
      for (int v = 0; v < q; ++v) {
        if (!seen[static_cast<std::size_t>(v)] &&
            weights_[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] > 0) {
          seen[static_cast<std::size_t>(v)] = 1;
          frontier.push(v);
          ++count;
        }
      }
    }
    return count == q;
  }

 private:
  MusicNetwork(NodeTable table, std::vector<std::vector<std::int64_t>> weights)
      : table_(std::move(table)), weights_(std::move(weights)) {}

  NodeTable table_;
  std::vector<std::vector<std::int64_t>> weights_;
};

/// Symmetric all-pairs distance matrix with zero diagonal; entries are exact
/// rationals so the downstream filtration order is reproducible.
struct DistanceMatrix {
  std::vector<std::vector<Rational>> delta;  // 0-based

  int size() const { return static_cast<int>(delta.size()); }
  const Rational& at(int i, int j) const {
    return delta.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(j));
  }
};

namespace detail {

/// Hop counts from a source via BFS; unreachable stays -1.
inline std::vector<int> hopLevels(const MusicNetwork& net, int source) {
  const int q = net.size();
  std::vector<int> level(static_cast<std::size_t>(q), -1);
  std::queue<int> frontier;
  level[static_cast<std::size_t>(source)] = 0;
  frontier.push(source);
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int v = 0; v < q; ++v) {
      if (net.weights()[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] > 0 &&
          level[static_cast<std::size_t>(v)] < 0) {
        level[static_cast<std::size_t>(v)] = level[static_cast<std::size_t>(u)] + 1;
        frontier.push(v);
      }
    }
  }
  return level;
}

}  // namespace detail

/// Hop-minimal path between two nodes (1-based ids), returned as the node-id
/// sequence from id_a to id_b. Among hop-minimal paths the one minimizing the
/// sum of reciprocal weights wins; remaining ties go to the lexicographically
/// smallest node-index sequence, so the result is fully deterministic.
inline std::vector<int> minHopPath(const MusicNetwork& net, int id_a, int id_b) {
  if (id_a == id_b) throw InternalError("minHopPath requires distinct endpoints");
  const int q = net.size();
  const int src = id_a - 1;
  const int dst = id_b - 1;
  const std::vector<int> from_src = detail::hopLevels(net, src);
  if (from_src[static_cast<std::size_t>(dst)] < 0) {
    throw DisconnectedNetwork("no path between nodes " + std::to_string(id_a) + " and " +
                              std::to_string(id_b));
  }
  const std::vector<int> from_dst = detail::hopLevels(net, dst);
  const int hops = from_src[static_cast<std::size_t>(dst)];

  // Nodes on some hop-minimal path form a DAG layered by distance from src.
  auto onShortest = [&](int v) {
    return from_src[static_cast<std::size_t>(v)] >= 0 && from_dst[static_cast<std::size_t>(v)] >= 0 &&
           from_src[static_cast<std::size_t>(v)] + from_dst[static_cast<std::size_t>(v)] == hops;
  };

  // cost_to_dst[v]: minimal sum of reciprocal weights from v to dst along the DAG.
  std::vector<std::optional<Rational>> cost_to_dst(static_cast<std::size_t>(q));
  cost_to_dst[static_cast<std::size_t>(dst)] = Rational(0);
  for (int dist = 1; dist <= hops; ++dist) {
    for (int v = 0; v < q; ++v) {
      if (!onShortest(v) || from_dst[static_cast<std::size_t>(v)] != dist) continue;
      std::optional<Rational> best;
      for (int s = 0; s < q; ++s) {
        const std::int64_t w = net.weights()[static_cast<std::size_t>(v)][static_cast<std::size_t>(s)];
        if (w <= 0 || !onShortest(s) || from_dst[static_cast<std::size_t>(s)] != dist - 1) continue;
        const Rational candidate = Rational(1, w) + *cost_to_dst[static_cast<std::size_t>(s)];
        if (!best || candidate < *best) best = candidate;
      }
      cost_to_dst[static_cast<std::size_t>(v)] = best;
    }
  }

  // Greedy lexicographic walk: at each step take the smallest-index successor
  // that still achieves the remaining optimal cost.
  std::vector<int> path{id_a};
  int current = src;
  while (current != dst) {
    const int dist = from_dst[static_cast<std::size_t>(current)];
    int next = -1;
    for (int s = 0; s < q; ++s) {
      const std::int64_t w =
          net.weights()[static_cast<std::size_t>(current)][static_cast<std::size_t>(s)];
      if (w <= 0 || !onShortest(s) || from_dst[static_cast<std::size_t>(s)] != dist - 1) continue;
      if (Rational(1, w) + *cost_to_dst[static_cast<std::size_t>(s)] ==
          *cost_to_dst[static_cast<std::size_t>(current)]) {
        next = s;
        break;
      }
    }
    if (next < 0) throw InternalError("minHopPath: no cost-achieving successor");
    path.push_back(next + 1);
    current = next;
  }
  return path;
}

/// All-pairs distances: delta(i,j) = sum of reciprocal weights along the
/// hop-minimal path chosen by minHopPath. The value is the same for every
/// hop-minimal cost-minimal path, so per-source dynamic programming suffices.
inline DistanceMatrix distanceMatrix(const MusicNetwork& net) {
  const int q = net.size();
  DistanceMatrix dist;
  dist.delta.assign(static_cast<std::size_t>(q),
                    std::vector<Rational>(static_cast<std::size_t>(q), Rational(0)));
  for (int src = 0; src < q; ++src) {
    const std::vector<int> level = detail::hopLevels(net, src);
    for (int v = 0; v < q; ++v) {
      if (v != src && level[static_cast<std::size_t>(v)] < 0) {
        throw DisconnectedNetwork("node " + std::to_string(v + 1) + " unreachable from " +
                                  std::to_string(src + 1));
      }
    }
    const int max_level = *std::max_element(level.begin(), level.end());
    std::vector<Rational> cost(static_cast<std::size_t>(q), Rational(0));
    for (int dist_level = 1; dist_level <= max_level; ++dist_level) {
      for (int v = 0; v < q; ++v) {
        if (level[static_cast<std::size_t>(v)] != dist_level) continue;
        std::optional<Rational> best;
        for (int u = 0; u < q; ++u) {
          const std::int64_t w = net.weights()[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)];
          if (w <= 0 || level[static_cast<std::size_t>(u)] != dist_level - 1) continue;
          const Rational candidate = cost[static_cast<std::size_t>(u)] + Rational(1, w);
          if (!best || candidate < *best) best = candidate;
        }
        cost[static_cast<std::size_t>(v)] = *best;
      }
    }
    for (int v = 0; v < q; ++v) {
      dist.delta[static_cast<std::size_t>(src)][static_cast<std::size_t>(v)] =
          cost[static_cast<std::size_t>(v)];
    }
  }
  return dist;
}

}  // namespace topomuse

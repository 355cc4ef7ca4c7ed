#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "topomuse/network.hpp"
#include "topomuse/rational.hpp"

namespace topomuse {

/// A vertex, edge, or triangle of the Vietoris-Rips filtration. Vertices are
/// 0-based row indices into the distance matrix; the filtration value is the
/// maximum pairwise distance over the vertex set (0 for vertices).
struct Simplex {
  std::array<int, 3> vertices{-1, -1, -1};
  int dim = 0;
  Rational filtration;
};

struct PersistenceInterval {
  int dim = 0;
  Rational birth;
  std::optional<Rational> death;  // nullopt = infinite

  bool operator==(const PersistenceInterval&) const = default;
};

/// A finite 1-dimensional class together with the GF(2) edge chain that
/// represents it at pairing time. Node ids are 1-based.
struct RepresentativeCycle {
  PersistenceInterval interval;
  std::vector<std::pair<int, int>> edges;  // 1-based id pairs, each pair sorted
  std::vector<int> nodes;                  // sorted union of edge endpoints
};

struct Diagram {
  std::vector<PersistenceInterval> intervals;   // dims 0 and 1, zero-length dropped
  std::vector<RepresentativeCycle> one_cycles;  // finite dim-1 classes
};

/// Ordinal-numbered cycle: the node set of a 1-dimensional class, numbered by
/// ascending death time (ties: ascending birth, then lexicographic node set).
struct Cycle {
  int ordinal = 0;
  std::vector<int> nodes;  // sorted, 1-based
  PersistenceInterval interval;
};

/// Builds the full Rips filtration up to triangles: every vertex at 0, every
/// edge at delta(i,j), every triple at the max of its pairwise distances.
/// Sorted by (filtration value, dimension, lexicographic vertices), which
/// places every face before its cofaces.
inline std::vector<Simplex> buildRips(const DistanceMatrix& dist) {
  const int q = dist.size();
  std::vector<Simplex> simplices;
  simplices.reserve(static_cast<std::size_t>(q) * (q * q + 5) / 6 + 1);
  for (int i = 0; i < q; ++i) {
    simplices.push_back(Simplex{{i, -1, -1}, 0, Rational(0)});
  }
  for (int i = 0; i < q; ++i) {
    for (int j = i + 1; j < q; ++j) {
      simplices.push_back(Simplex{{i, j, -1}, 1, dist.at(i, j)});
    }
  }
  for (int i = 0; i < q; ++i) {
    for (int j = i + 1; j < q; ++j) {
      for (int k = j + 1; k < q; ++k) {
        Rational filt = std::max({dist.at(i, j), dist.at(i, k), dist.at(j, k)});
        simplices.push_back(Simplex{{i, j, k}, 2, filt});
      }
    }
  }
  std::sort(simplices.begin(), simplices.end(), [](const Simplex& a, const Simplex& b) {
    if (a.filtration != b.filtration) return a.filtration < b.filtration;
    if (a.dim != b.dim) return a.dim < b.dim;
    return a.vertices < b.vertices;
  });
  return simplices;
}

/// Standard persistence reduction over GF(2). Columns are processed in
/// filtration order; a column that reduces to zero creates a class, otherwise
/// its pivot pairs the creator with this destroyer. For each finite
/// 1-dimensional pair (edge, triangle) the fully reduced triangle column is a
/// 1-cycle (the boundary of a 2-chain), and its edge set is reported as the
/// representative. Zero-length intervals (birth == death) are dropped.
inline Diagram reduce(const std::vector<Simplex>& simplices) {
  const std::size_t n = simplices.size();

  // Face lookup for boundary construction.
  std::map<std::array<int, 2>, int> edge_index;
  std::vector<int> vertex_index_of;  // vertex value -> column index
  {
    int max_vertex = -1;
    for (const Simplex& s : simplices) max_vertex = std::max(max_vertex, s.vertices[0]);
    vertex_index_of.assign(static_cast<std::size_t>(max_vertex) + 1, -1);
  }
  for (std::size_t idx = 0; idx < n; ++idx) {
    const Simplex& s = simplices[idx];
    if (s.dim == 0) {
      vertex_index_of[static_cast<std::size_t>(s.vertices[0])] = static_cast<int>(idx);
    } else if (s.dim == 1) {
      edge_index[{s.vertices[0], s.vertices[1]}] = static_cast<int>(idx);
    }
  }

  auto boundary = [&](const Simplex& s) -> std::vector<int> {
    std::vector<int> column;
    if (s.dim == 1) {
      column = {vertex_index_of[static_cast<std::size_t>(s.vertices[0])],
                vertex_index_of[static_cast<std::size_t>(s.vertices[1])]};
    } else if (s.dim == 2) {
      column = {edge_index.at({s.vertices[0], s.vertices[1]}),
                edge_index.at({s.vertices[0], s.vertices[2]}),
                edge_index.at({s.vertices[1], s.vertices[2]})};
    }
    std::sort(column.begin(), column.end());
    return column;
  };

  auto addColumns = [](const std::vector<int>& a, const std::vector<int>& b) {
    // Symmetric difference of sorted index sets = GF(2) addition.
    std::vector<int> out;
    out.reserve(a.size() + b.size());
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
  };

  std::vector<std::vector<int>> reduced(n);
  std::vector<int> pivot_owner(n, -1);  // pivot row -> column index holding it
  std::vector<int> paired_with(n, -1);

  for (std::size_t j = 0; j < n; ++j) {
    std::vector<int> column = boundary(simplices[j]);
    while (!column.empty()) {
      const int pivot = column.back();
      const int owner = pivot_owner[static_cast<std::size_t>(pivot)];
      if (owner < 0) break;
      column = addColumns(column, reduced[static_cast<std::size_t>(owner)]);
    }
    if (!column.empty()) {
      const int pivot = column.back();
      pivot_owner[static_cast<std::size_t>(pivot)] = static_cast<int>(j);
      paired_with[static_cast<std::size_t>(pivot)] = static_cast<int>(j);
      paired_with[j] = pivot;
    }
    reduced[j] = std::move(column);
  }

  Diagram diagram;
  for (std::size_t i = 0; i < n; ++i) {
    const Simplex& s = simplices[i];
    const bool creator = reduced[i].empty();
    if (!creator) continue;
    if (s.dim == 2) continue;  // 2-dimensional classes are out of range here
    if (paired_with[i] < 0) {
      diagram.intervals.push_back(PersistenceInterval{s.dim, s.filtration, std::nullopt});
      continue;
    }
    const std::size_t killer = static_cast<std::size_t>(paired_with[i]);
    if (simplices[killer].filtration == s.filtration) continue;  // zero-length
    PersistenceInterval interval{s.dim, s.filtration, simplices[killer].filtration};
    diagram.intervals.push_back(interval);
    if (s.dim == 1) {
      RepresentativeCycle rep;
      rep.interval = interval;
      std::set<int> nodes;
      for (const int edge_col : reduced[killer]) {
        const Simplex& e = simplices[static_cast<std::size_t>(edge_col)];
        rep.edges.emplace_back(e.vertices[0] + 1, e.vertices[1] + 1);
        nodes.insert(e.vertices[0] + 1);
        nodes.insert(e.vertices[1] + 1);
      }
      std::sort(rep.edges.begin(), rep.edges.end());
      rep.nodes.assign(nodes.begin(), nodes.end());
      diagram.one_cycles.push_back(std::move(rep));
    }
  }
  return diagram;
}

/// Orders the finite 1-dimensional classes by ascending death (ties by
/// ascending birth, then lexicographic node set) and assigns 1-based
/// ordinals. Only the node sets feed the downstream composition machinery.
inline std::vector<Cycle> extractCycles(const Diagram& diagram) {
  std::vector<Cycle> cycles;
  cycles.reserve(diagram.one_cycles.size());
  for (const RepresentativeCycle& rep : diagram.one_cycles) {
    cycles.push_back(Cycle{0, rep.nodes, rep.interval});
  }
  std::sort(cycles.begin(), cycles.end(), [](const Cycle& a, const Cycle& b) {
    if (*a.interval.death != *b.interval.death) return *a.interval.death < *b.interval.death;
    if (a.interval.birth != b.interval.birth) return a.interval.birth < b.interval.birth;
    return a.nodes < b.nodes;
  });
  for (std::size_t i = 0; i < cycles.size(); ++i) cycles[i].ordinal = static_cast<int>(i) + 1;
  return cycles;
}

inline std::vector<std::vector<int>> cycleNodeSets(const std::vector<Cycle>& cycles) {
  std::vector<std::vector<int>> sets;
  sets.reserve(cycles.size());
  for (const Cycle& c : cycles) sets.push_back(c.nodes);
  return sets;
}

}  // namespace topomuse

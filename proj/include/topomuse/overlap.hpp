#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "topomuse/errors.hpp"

namespace topomuse {

enum class OverlapKind { kBinary, kInteger };

/// k x d Overlap matrix of s-scale. Row i marks the maximal runs (length >= s)
/// of consecutive flow positions whose note lies in cycle i+1. The binary kind
/// stores 0/1; the integer kind stores the 1-based node id of the note at that
/// position, with 0 reserved for "empty". The length is stored explicitly so
/// a matrix with zero cycles still knows how long the music is.
struct OverlapMatrix {
  OverlapKind kind = OverlapKind::kBinary;
  int scale = 1;
  int d = 0;
  std::vector<std::vector<std::int64_t>> rows;  // k rows of length d

  int cycleCount() const { return static_cast<int>(rows.size()); }
  int length() const { return d; }

  std::int64_t at(int row, int col) const {
    return rows.at(static_cast<std::size_t>(row)).at(static_cast<std::size_t>(col));
  }

  bool operator==(const OverlapMatrix&) const = default;
};

inline void checkOverlapShape(const OverlapMatrix& m) {
  if (m.scale < 1) throw ParseError("overlap matrix scale must be >= 1");
  if (m.d < 0) throw ParseError("overlap matrix length must be >= 0");
  for (const auto& row : m.rows) {
    if (static_cast<int>(row.size()) != m.d) {
      throw ParseError("overlap matrix row length does not match d");
    }
    if (m.kind == OverlapKind::kBinary) {
      for (const auto entry : row) {
        if (entry != 0 && entry != 1) throw ParseError("binary overlap entries must be 0 or 1");
      }
    } else {
      for (const auto entry : row) {
        if (entry < 0) throw ParseError("integer overlap entries must be >= 0");
      }
    }
  }
}

namespace detail {

inline bool inCycle(const std::vector<int>& cycle, int node_id) {
  return std::binary_search(cycle.begin(), cycle.end(), node_id);
}

inline std::vector<std::vector<int>> sortedCycles(std::vector<std::vector<int>> cycles) {
  for (auto& c : cycles) std::sort(c.begin(), c.end());
  return cycles;
}

}  // namespace detail

/// Integer Overlap matrix of s-scale for a flow of 1-based node ids. Row i is
/// produced by scanning the flow from the left: find the next position whose
/// note is in cycle i (step 1), extend to the first position that is not
/// (step 2), and keep the stretch only when it spans at least s positions,
/// including the end-of-flow case where the stretch runs to the last note.
inline OverlapMatrix integerOverlap(const std::vector<int>& flow,
                                    const std::vector<std::vector<int>>& cycles, int scale) {
  if (scale < 1) throw ParseError("scale must be >= 1, got " + std::to_string(scale));
  const int d = static_cast<int>(flow.size());
  for (const int id : flow) {
    if (id < 1) throw ParseError("flow node ids must be >= 1 (0 is reserved for empty)");
  }
  const std::vector<std::vector<int>> sorted = detail::sortedCycles(cycles);

  OverlapMatrix m;
  m.kind = OverlapKind::kInteger;
  m.scale = scale;
  m.d = d;
  m.rows.assign(sorted.size(), std::vector<std::int64_t>(static_cast<std::size_t>(d), 0));

  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const std::vector<int>& cycle = sorted[i];
    int j = 0;  // 0-based scan position
    while (j < d) {
      int start = j;
      while (start < d && !detail::inCycle(cycle, flow[static_cast<std::size_t>(start)])) ++start;
      if (start == d) break;
      int stop = start + 1;
      while (stop < d && detail::inCycle(cycle, flow[static_cast<std::size_t>(stop)])) ++stop;
      if (stop == d) {
        // Stretch reaches the end of the music: spans d - start positions.
        if (d - start >= scale) {
          for (int col = start; col < d; ++col) {
            m.rows[i][static_cast<std::size_t>(col)] = flow[static_cast<std::size_t>(col)];
          }
        }
        break;
      }
      if (stop - start >= scale) {
        for (int col = start; col < stop; ++col) {
          m.rows[i][static_cast<std::size_t>(col)] = flow[static_cast<std::size_t>(col)];
        }
      }
      j = stop;
    }
  }
  return m;
}

/// Support-preserving conversion to the binary kind; the binary matrix of an
/// integer Overlap matrix is uniquely determined.
inline OverlapMatrix binarize(const OverlapMatrix& m) {
  OverlapMatrix b = m;
  b.kind = OverlapKind::kBinary;
  for (auto& row : b.rows) {
    for (auto& entry : row) entry = entry != 0 ? 1 : 0;
  }
  return b;
}

inline OverlapMatrix asBinary(const OverlapMatrix& m) {
  return m.kind == OverlapKind::kBinary ? m : binarize(m);
}

/// True iff every maximal run of ones on every row spans at least s columns.
inline bool validateSScale(const OverlapMatrix& binary) {
  const int d = binary.length();
  for (const auto& row : binary.rows) {
    int run = 0;
    for (int col = 0; col <= d; ++col) {
      const bool one = col < d && row[static_cast<std::size_t>(col)] != 0;
      if (one) {
        ++run;
      } else {
        if (run > 0 && run < binary.scale) return false;
        run = 0;
      }
    }
  }
  return true;
}

/// Per-position survival data: surviving[j] lists the 1-based ordinals of the
/// cycles whose row is 1 at position j, and intersection[j] is the sorted node
/// set common to all of them (empty when nothing survives).
struct SurvivalSets {
  std::vector<std::vector<int>> surviving;
  std::vector<std::vector<int>> intersection;

  int length() const { return static_cast<int>(surviving.size()); }
};

inline SurvivalSets survivors(const OverlapMatrix& binary,
                              const std::vector<std::vector<int>>& cycles) {
  if (binary.kind != OverlapKind::kBinary) {
    throw InternalError("survivors expects a binary Overlap matrix");
  }
  if (binary.cycleCount() != static_cast<int>(cycles.size())) {
    throw ParseError("cycle count mismatch: matrix has " + std::to_string(binary.cycleCount()) +
                     " rows, got " + std::to_string(cycles.size()) + " cycles");
  }
  const std::vector<std::vector<int>> sorted = detail::sortedCycles(cycles);
  const int d = binary.length();
  const int k = binary.cycleCount();
  SurvivalSets sets;
  sets.surviving.resize(static_cast<std::size_t>(d));
  sets.intersection.resize(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    std::vector<int>& alive = sets.surviving[static_cast<std::size_t>(j)];
    for (int i = 0; i < k; ++i) {
      if (binary.at(i, j) != 0) alive.push_back(i + 1);
    }
    if (alive.empty()) continue;
    std::vector<int> common = sorted[static_cast<std::size_t>(alive.front() - 1)];
    for (std::size_t a = 1; a < alive.size(); ++a) {
      const std::vector<int>& next = sorted[static_cast<std::size_t>(alive[a] - 1)];
      std::vector<int> merged;
      std::set_intersection(common.begin(), common.end(), next.begin(), next.end(),
                            std::back_inserter(merged));
      common = std::move(merged);
    }
    sets.intersection[static_cast<std::size_t>(j)] = std::move(common);
  }
  return sets;
}

}  // namespace topomuse

#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "topomuse/node_pool.hpp"
#include "topomuse/overlap.hpp"
#include "topomuse/rng.hpp"

namespace topomuse {

enum class ComposePolicy { kStrict, kLenient };

/// Everything the rule-based composer needs: the binary pattern to follow,
/// the per-position survival sets derived from it, and the node pool for the
/// unconstrained positions.
struct CompositionContext {
  OverlapMatrix binary;
  std::vector<std::vector<int>> cycles;  // sorted node-id sets, ordinal order
  SurvivalSets sets;
  NodePool pool;
  ComposePolicy policy = ComposePolicy::kStrict;
};

inline CompositionContext makeContext(const OverlapMatrix& matrix,
                                      std::vector<std::vector<int>> cycles, NodePool pool,
                                      ComposePolicy policy = ComposePolicy::kStrict) {
  CompositionContext ctx;
  ctx.binary = asBinary(matrix);
  for (auto& c : cycles) std::sort(c.begin(), c.end());
  ctx.cycles = std::move(cycles);
  ctx.sets = survivors(ctx.binary, ctx.cycles);
  ctx.pool = std::move(pool);
  ctx.policy = policy;
  return ctx;
}

struct ComposeResult {
  std::vector<int> flow;                // node ids, length d
  std::vector<int> fallback_positions;  // 1-based positions where the lenient ladder fired
};

namespace detail {

inline std::vector<int> unionOfSurvivors(const CompositionContext& ctx, int j) {
  std::vector<int> out;
  for (const int ordinal : ctx.sets.surviving[static_cast<std::size_t>(j)]) {
    const std::vector<int>& cycle = ctx.cycles[static_cast<std::size_t>(ordinal - 1)];
    out.insert(out.end(), cycle.begin(), cycle.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace detail

/// Composes a new flow of the matrix's length that strictly follows the
/// binary Overlap pattern. Where cycles survive, the note is drawn uniformly
/// from the intersection of the surviving cycles; elsewhere it is drawn from
/// the pool, excluding the neighbors' intersections when those neighbors have
/// survivors. Position 1 and position d treat the missing neighbor as having
/// no survivors. Under the lenient policy an empty intersection falls back to
/// the union of the surviving cycles and an exhausted pool to the full pool,
/// and every fallback position is reported.
inline ComposeResult compose(const CompositionContext& ctx, Rng& rng) {
  const int d = ctx.sets.length();
  ComposeResult result;
  result.flow.reserve(static_cast<std::size_t>(d));

  auto survivorsAt = [&](int j) -> bool {
    return j >= 0 && j < d && !ctx.sets.surviving[static_cast<std::size_t>(j)].empty();
  };

  for (int j = 0; j < d; ++j) {
    if (survivorsAt(j)) {
      const std::vector<int>& common = ctx.sets.intersection[static_cast<std::size_t>(j)];
      if (!common.empty()) {
        result.flow.push_back(common[rng.index(common.size())]);
        continue;
      }
      if (ctx.policy == ComposePolicy::kStrict) {
        throw EmptyIntersection("surviving cycles at position " + std::to_string(j + 1) +
                                " have an empty intersection");
      }
      const std::vector<int> fallback = detail::unionOfSurvivors(ctx, j);
      result.fallback_positions.push_back(j + 1);
      if (!fallback.empty()) {
        result.flow.push_back(fallback[rng.index(fallback.size())]);
      } else {
        result.flow.push_back(samplePool(ctx.pool, rng));
      }
      continue;
    }

    // No cycle survives here; the neighbors' intersections become exclusions.
    std::vector<int> exclude;
    if (survivorsAt(j - 1)) {
      const auto& prev = ctx.sets.intersection[static_cast<std::size_t>(j - 1)];
      exclude.insert(exclude.end(), prev.begin(), prev.end());
    }
    if (survivorsAt(j + 1)) {
      const auto& next = ctx.sets.intersection[static_cast<std::size_t>(j + 1)];
      exclude.insert(exclude.end(), next.begin(), next.end());
    }
    try {
      result.flow.push_back(samplePool(ctx.pool, rng, exclude));
    } catch (const EmptySamplingSupport&) {
      if (ctx.policy == ComposePolicy::kStrict) throw;
      result.fallback_positions.push_back(j + 1);
      result.flow.push_back(samplePool(ctx.pool, rng));
    }
  }
  return result;
}

/// Per-position verdict of the pattern constraints, checkable for any flow
/// without knowing how it was produced.
struct PatternReport {
  std::vector<bool> satisfied;
  std::vector<int> failed_positions;  // 1-based
  bool all_ok = true;
};

inline PatternReport verifyPattern(const std::vector<int>& flow, const CompositionContext& ctx) {
  const int d = ctx.sets.length();
  if (static_cast<int>(flow.size()) != d) {
    throw ParseError("flow length " + std::to_string(flow.size()) + " does not match pattern length " +
                     std::to_string(d));
  }
  PatternReport report;
  report.satisfied.assign(static_cast<std::size_t>(d), true);

  auto contains = [](const std::vector<int>& sorted, int id) {
    return std::binary_search(sorted.begin(), sorted.end(), id);
  };
  auto survivorsAt = [&](int j) -> bool {
    return j >= 0 && j < d && !ctx.sets.surviving[static_cast<std::size_t>(j)].empty();
  };

  for (int j = 0; j < d; ++j) {
    bool ok = true;
    const int id = flow[static_cast<std::size_t>(j)];
    if (survivorsAt(j)) {
      ok = contains(ctx.sets.intersection[static_cast<std::size_t>(j)], id);
    } else {
      if (survivorsAt(j - 1) && contains(ctx.sets.intersection[static_cast<std::size_t>(j - 1)], id)) {
        ok = false;
      }
      if (survivorsAt(j + 1) && contains(ctx.sets.intersection[static_cast<std::size_t>(j + 1)], id)) {
        ok = false;
      }
    }
    if (!ok) {
      report.satisfied[static_cast<std::size_t>(j)] = false;
      report.failed_positions.push_back(j + 1);
      report.all_ok = false;
    }
  }
  return report;
}

}  // namespace topomuse

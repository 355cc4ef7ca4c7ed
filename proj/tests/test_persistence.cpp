#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "oracles.hpp"
#include "topomuse/persistence.hpp"

using namespace topomuse;

namespace {

DistanceMatrix matrixOf(const std::vector<std::vector<Rational>>& rows) {
  DistanceMatrix dist;
  dist.delta = rows;
  return dist;
}

/// 4-cycle metric: sides at 1, diagonals at 2.
DistanceMatrix squareMetric() {
  const Rational one(1);
  const Rational two(2);
  const Rational zero(0);
  return matrixOf({{zero, one, two, one},
                   {one, zero, one, two},
                   {two, one, zero, one},
                   {one, two, one, zero}});
}

}  // namespace

TEST_CASE("rips filtration counts and order") {
  const Rational one(1);
  const Rational zero(0);
  const DistanceMatrix dist =
      matrixOf({{zero, one, one}, {one, zero, one}, {one, one, zero}});
  const auto simplices = buildRips(dist);
  REQUIRE(simplices.size() == 7);  // 3 vertices + 3 edges + 1 triangle
  int vertices = 0;
  int edges = 0;
  int triangles = 0;
  for (const Simplex& s : simplices) {
    if (s.dim == 0) {
      ++vertices;
      CHECK(s.filtration == Rational(0));
    }
    if (s.dim == 1) {
      ++edges;
      CHECK(s.filtration == Rational(1));
    }
    if (s.dim == 2) {
      ++triangles;
      CHECK(s.filtration == Rational(1));
    }
  }
  CHECK(vertices == 3);
  CHECK(edges == 3);
  CHECK(triangles == 1);
}

TEST_CASE("every face precedes its cofaces") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int q = 3 + static_cast<int>(rng.below(4));
    const MusicNetwork net = oracles::randomConnectedGraph(rng, q);
    const auto simplices = buildRips(distanceMatrix(net));
    // Triangle count is C(q, 3).
    const std::size_t expected_triangles =
        static_cast<std::size_t>(q) * (q - 1) * (q - 2) / 6;
    std::size_t triangles = 0;
    std::map<std::array<int, 3>, std::size_t> position;
    for (std::size_t idx = 0; idx < simplices.size(); ++idx) {
      position[simplices[idx].vertices] = idx;
      if (simplices[idx].dim == 2) ++triangles;
    }
    CHECK(triangles == expected_triangles);
    for (std::size_t idx = 0; idx < simplices.size(); ++idx) {
      const Simplex& s = simplices[idx];
      if (s.dim == 1) {
        CHECK(position.at({s.vertices[0], -1, -1}) < idx);
        CHECK(position.at({s.vertices[1], -1, -1}) < idx);
      } else if (s.dim == 2) {
        CHECK(position.at({s.vertices[0], s.vertices[1], -1}) < idx);
        CHECK(position.at({s.vertices[0], s.vertices[2], -1}) < idx);
        CHECK(position.at({s.vertices[1], s.vertices[2], -1}) < idx);
      }
    }
  }
}

TEST_CASE("square metric: one 1-dim interval [1,2) with all four nodes") {
  const Diagram diagram = reduce(buildRips(squareMetric()));

  std::vector<PersistenceInterval> dim0;
  std::vector<PersistenceInterval> dim1;
  for (const auto& interval : diagram.intervals) {
    (interval.dim == 0 ? dim0 : dim1).push_back(interval);
  }
  REQUIRE(dim0.size() == 4);
  int infinite = 0;
  for (const auto& interval : dim0) {
    CHECK(interval.birth == Rational(0));
    if (!interval.death) {
      ++infinite;
    } else {
      CHECK(*interval.death == Rational(1));
    }
  }
  CHECK(infinite == 1);

  REQUIRE(dim1.size() == 1);
  CHECK(dim1[0].birth == Rational(1));
  REQUIRE(dim1[0].death.has_value());
  CHECK(*dim1[0].death == Rational(2));

  REQUIRE(diagram.one_cycles.size() == 1);
  CHECK(diagram.one_cycles[0].nodes == std::vector<int>{1, 2, 3, 4});

  // Agreement with the naive dense reduction.
  CHECK(oracles::sortedIntervals(diagram.intervals) == oracles::bruteForceBarcode(squareMetric()));
}

TEST_CASE("star metric has an empty 1-dim barcode") {
  // Center at distance 1 from each leaf, leaves at 2 from each other: every
  // leaf-leaf edge is filled by a triangle at the same value.
  const int leaves = 5;
  std::vector<std::vector<Rational>> rows(
      static_cast<std::size_t>(leaves + 1),
      std::vector<Rational>(static_cast<std::size_t>(leaves + 1), Rational(0)));
  for (int i = 1; i <= leaves; ++i) {
    rows[0][static_cast<std::size_t>(i)] = Rational(1);
    rows[static_cast<std::size_t>(i)][0] = Rational(1);
    for (int j = i + 1; j <= leaves; ++j) {
      rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = Rational(2);
      rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = Rational(2);
    }
  }
  const Diagram diagram = reduce(buildRips(matrixOf(rows)));
  for (const auto& interval : diagram.intervals) CHECK(interval.dim == 0);
  CHECK(diagram.one_cycles.empty());
  CHECK(oracles::sortedIntervals(diagram.intervals) == oracles::bruteForceBarcode(matrixOf(rows)));
}

TEST_CASE("barcodes match the brute-force oracle on random graphs") {
  Rng rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const int q = 3 + static_cast<int>(rng.below(5));  // up to 7
    const MusicNetwork net = oracles::randomConnectedGraph(rng, q);
    const DistanceMatrix dist = distanceMatrix(net);
    const Diagram diagram = reduce(buildRips(dist));
    CHECK(oracles::sortedIntervals(diagram.intervals) == oracles::bruteForceBarcode(dist));
  }
}

TEST_CASE("structural invariants on network-derived filtrations") {
  Rng rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const int q = 3 + static_cast<int>(rng.below(5));
    const MusicNetwork net = oracles::randomConnectedGraph(rng, q);
    const Diagram diagram = reduce(buildRips(distanceMatrix(net)));

    int zero_dim = 0;
    int infinite = 0;
    for (const auto& interval : diagram.intervals) {
      if (interval.dim != 0) continue;
      ++zero_dim;
      if (!interval.death) {
        ++infinite;
      } else {
        // Every node has a direct neighbor at distance 1/w <= 1.
        CHECK(*interval.death <= Rational(1));
      }
    }
    CHECK(zero_dim == q);
    CHECK(infinite == 1);

    // Representative chains are cycles: each vertex is covered an even
    // number of times by the chain's edges.
    for (const auto& rep : diagram.one_cycles) {
      CHECK(rep.nodes.size() >= 3);
      std::map<int, int> degree;
      for (const auto& [a, b] : rep.edges) {
        ++degree[a];
        ++degree[b];
      }
      for (const auto& [node, deg] : degree) CHECK(deg % 2 == 0);
    }
  }
}

TEST_CASE("cycle ordinals follow death, then birth, then node set") {
  Diagram diagram;
  auto rep = [](Rational birth, Rational death, std::vector<int> nodes) {
    RepresentativeCycle r;
    r.interval = PersistenceInterval{1, birth, death};
    r.nodes = std::move(nodes);
    return r;
  };
  diagram.one_cycles = {
      rep(Rational(1), Rational(3), {1, 2, 3, 4}),
      rep(Rational(1, 2), Rational(2), {2, 3, 4}),
      rep(Rational(1), Rational(2), {1, 3, 5}),
      rep(Rational(1), Rational(2), {1, 3, 4}),
  };
  const auto cycles = extractCycles(diagram);
  REQUIRE(cycles.size() == 4);
  CHECK(cycles[0].nodes == std::vector<int>{2, 3, 4});       // earliest death, earliest birth
  CHECK(cycles[1].nodes == std::vector<int>{1, 3, 4});       // same death, birth 1, lex smaller
  CHECK(cycles[2].nodes == std::vector<int>{1, 3, 5});
  CHECK(cycles[3].nodes == std::vector<int>{1, 2, 3, 4});    // dies last
  for (std::size_t i = 0; i < cycles.size(); ++i) {
    CHECK(cycles[i].ordinal == static_cast<int>(i) + 1);
  }
}

TEST_CASE("full filtration size at q=33") {
  std::vector<std::vector<Rational>> rows(33, std::vector<Rational>(33, Rational(1)));
  for (int i = 0; i < 33; ++i) rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = Rational(0);
  DistanceMatrix dist;
  dist.delta = rows;
  // 33 vertices + C(33,2)=528 edges + C(33,3)=5456 triangles.
  CHECK(buildRips(dist).size() == 33 + 528 + 5456);
}

TEST_CASE("alternating two-note score has no cycles") {
  Score score;
  for (int i = 0; i < 12; ++i) {
    score.flow.push_back(Note{Pitch{i % 2 == 0 ? 60 : 62}, Rational(1)});
  }
  const Diagram diagram = reduce(buildRips(distanceMatrix(MusicNetwork::build(score))));
  CHECK(extractCycles(diagram).empty());
}

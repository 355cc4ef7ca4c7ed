#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "topomuse/artifacts.hpp"
#include "topomuse/score_io.hpp"

using namespace topomuse;

TEST_CASE("every artifact carries a format_version") {
  const MusicNetwork net = MusicNetwork::fromWeights({{0, 2}, {2, 0}});
  const DistanceMatrix dist = distanceMatrix(net);
  const Diagram diagram = reduce(buildRips(dist));
  OverlapMatrix m;
  m.kind = OverlapKind::kInteger;
  m.scale = 4;
  m.d = 2;
  m.rows = {{0, 0}};
  const NodePool pool = buildPool(net.table());

  for (const auto& doc :
       {artifacts::networkToJson(net), artifacts::distancesToJson(dist),
        artifacts::barcodeToJson(diagram), artifacts::cyclesToJson(extractCycles(diagram)),
        artifacts::overlapToJson(m), artifacts::poolToJson(pool)}) {
    CHECK(doc.at("format_version").get<int>() == kFormatVersion);
  }
  CHECK_THROWS_AS(artifacts::overlapFromJson(nlohmann::json{{"kind", "binary"}}), ParseError);
}

TEST_CASE("overlap json round-trip") {
  Rng rng(21);
  const auto cycles = oracles::randomCycles(rng, 3, 8);
  const auto flow = oracles::randomFlow(rng, 30, 8, cycles);
  const OverlapMatrix m = integerOverlap(flow, cycles, 3);
  CHECK(artifacts::overlapFromJson(artifacts::overlapToJson(m)) == m);
  const OverlapMatrix b = binarize(m);
  CHECK(artifacts::overlapFromJson(artifacts::overlapToJson(b)) == b);
}

TEST_CASE("overlap json validates shape") {
  nlohmann::json bad{{"format_version", 1}, {"kind", "binary"}, {"s", 2},
                     {"k", 1},              {"d", 3},           {"rows", {{0, 1, 2}}}};
  CHECK_THROWS_AS(artifacts::overlapFromJson(bad), ParseError);  // 2 in a binary matrix
  bad["rows"] = {{0, 1}};
  CHECK_THROWS_AS(artifacts::overlapFromJson(bad), ParseError);  // row length != d
}

TEST_CASE("network json round-trip preserves table and weights") {
  Score score;
  for (int i = 0; i < 12; ++i) {
    score.flow.push_back(Note{Pitch{60 + (i * 5) % 7}, Rational(1 + i % 2, 3)});
  }
  const MusicNetwork net = MusicNetwork::build(score);
  const MusicNetwork back = artifacts::networkFromJson(artifacts::networkToJson(net));
  CHECK(back.size() == net.size());
  CHECK(back.weights() == net.weights());
  for (int id = 1; id <= net.size(); ++id) CHECK(back.table().note(id) == net.table().note(id));
  CHECK(back.table().total == net.table().total);
}

TEST_CASE("pool json keeps note info when given a table") {
  Score score;
  score.flow = {Note{Pitch{60}, Rational(1)}, Note{Pitch{62}, Rational(1, 3)},
                Note{Pitch{60}, Rational(1)}};
  const NodeTable table = NodeTable::fromScore(score);
  const NodePool pool = buildPool(table);
  const auto file = artifacts::poolFromJson(artifacts::poolToJson(pool, &table));
  CHECK(file.pool.total == 3);
  CHECK(file.notes.at(1) == Note{Pitch{60}, Rational(1)});
  CHECK(file.notes.at(2) == Note{Pitch{62}, Rational(1, 3)});

  const auto bare = artifacts::poolFromJson(artifacts::poolToJson(pool));
  CHECK(bare.notes.empty());
  CHECK(bare.pool.freqs == pool.freqs);
}

TEST_CASE("model json round-trip reproduces outputs bit-for-bit") {
  Rng rng(31);
  Mlp<float> model(8, {5, 4}, 3, 4);
  model.initialize(rng);
  Score score;
  for (int i = 0; i < 6; ++i) score.flow.push_back(Note{Pitch{60 + i % 4}, Rational(1)});
  const NodeTable table = NodeTable::fromScore(score);

  const auto doc = artifacts::modelToJson(model, OverlapEncoding::kBinary, 2, &table);
  const auto file = artifacts::modelFromJson<float>(doc);
  CHECK(file.cycle_count == 2);
  CHECK(file.encoding == OverlapEncoding::kBinary);
  REQUIRE(file.table.has_value());
  CHECK(file.table->size() == table.size());

  VectorX<float> input(8);
  for (int i = 0; i < 8; ++i) input[i] = static_cast<float>(i % 2);
  const MatrixX<float> a = model.forward(input);
  const MatrixX<float> b = file.model.forward(input);
  CHECK(a == b);
}

TEST_CASE("pgm dump shape") {
  OverlapMatrix m;
  m.kind = OverlapKind::kBinary;
  m.scale = 2;
  m.d = 4;
  m.rows = {{1, 1, 0, 0}, {0, 0, 1, 1}};
  const std::string pgm = artifacts::overlapToPgm(m);
  CHECK(pgm.rfind("P2\n4 2\n255\n", 0) == 0);
  CHECK(pgm.find("0 0 255 255") != std::string::npos);
}

#ifndef TOPOMUSE_FIXTURES_DIR
#define TOPOMUSE_FIXTURES_DIR "fixtures"
#endif

TEST_CASE("bundled fixtures parse and agree with their published totals") {
  const std::string dir(TOPOMUSE_FIXTURES_DIR);
  const auto suyeonjang =
      artifacts::poolFromJson(artifacts::parseFile(dir + "/suyeonjang_frequencies.json"));
  CHECK(suyeonjang.pool.total == 440);
  CHECK(suyeonjang.pool.size() == 33);

  const auto songkuyeo =
      artifacts::poolFromJson(artifacts::parseFile(dir + "/songkuyeo_frequencies.json"));
  CHECK(songkuyeo.pool.total == 426);
  CHECK(songkuyeo.pool.size() == 37);

  const auto taryong =
      artifacts::poolFromJson(artifacts::parseFile(dir + "/taryong_frequencies.json"));
  CHECK(taryong.pool.total == 288);
  CHECK(taryong.pool.size() == 40);

  const auto cycles = artifacts::cycleNodesFromJson(artifacts::parseFile(dir + "/suyeonjang_cycles.json"));
  REQUIRE(cycles.size() == 2);
  CHECK(cycles[0] == std::vector<int>{18, 20, 22, 27});
  CHECK(cycles[1] == std::vector<int>{3, 6, 12, 18});

  // Node info covers every node referenced by the bundled cycles.
  const auto info = artifacts::parseFile(dir + "/suyeonjang_node_info.json");
  std::set<int> known;
  for (const auto& node : info.at("nodes")) known.insert(node.at("id").get<int>());
  CHECK(known.size() == 20);
  for (const auto& cycle : cycles) {
    for (const int id : cycle) CHECK(known.count(id) == 1);
  }
  // Spot-check the most frequent node's note info: D#4, one Jeonggan.
  for (const auto& node : info.at("nodes")) {
    if (node.at("id").get<int>() == 18) {
      CHECK(node.at("midi").get<int>() == 63);
      CHECK(node.at("dur").get<std::string>() == "1");
      CHECK(pitchFromName(node.at("pitch").get<std::string>()) == 63);
    }
  }
}

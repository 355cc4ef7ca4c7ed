// Command-line front end: each subcommand is a pure function from input
// files, flags, and a seed to output files, so whole pipelines replay
// byte-identically.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "topomuse/artifacts.hpp"
#include "topomuse/composer.hpp"
#include "topomuse/network.hpp"
#include "topomuse/neural.hpp"
#include "topomuse/node_pool.hpp"
#include "topomuse/overlap.hpp"
#include "topomuse/persistence.hpp"
#include "topomuse/rng.hpp"
#include "topomuse/score_io.hpp"
#include "topomuse/seedgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace topomuse;

namespace {

ScoreFormat formatFor(const std::string& path, const std::string& flag) {
  if (flag == "jsonl") return ScoreFormat::kJsonLines;
  if (flag == "csv") return ScoreFormat::kCsv;
  if (!flag.empty()) throw ParseError("unknown score format '" + flag + "'");
  return fs::path(path).extension() == ".csv" ? ScoreFormat::kCsv : ScoreFormat::kJsonLines;
}

Score loadScore(const std::string& path, const std::string& format_flag) {
  return parseScore(artifacts::readFile(path), formatFor(path, format_flag));
}

std::vector<int> flowIds(const Score& score, const NodeTable& table) {
  std::vector<int> ids;
  ids.reserve(score.flow.size());
  for (const Note& note : score.flow) ids.push_back(table.idOf(note));
  return ids;
}

struct AnalyzeArgs {
  std::string score_path;
  std::string format;
  std::string out_dir = ".";
  int scale = 4;
  bool dump_pgm = false;
};

std::string runAnalyze(const AnalyzeArgs& args) {
  const Score score = loadScore(args.score_path, args.format);
  const MusicNetwork net = MusicNetwork::build(score);
  const DistanceMatrix dist = distanceMatrix(net);
  const Diagram diagram = reduce(buildRips(dist));
  const std::vector<Cycle> cycles = extractCycles(diagram);
  const std::vector<int> ids = flowIds(score, net.table());
  const OverlapMatrix overlap = integerOverlap(ids, cycleNodeSets(cycles), args.scale);
  const NodePool pool = buildPool(net.table());

  fs::create_directories(args.out_dir);
  const fs::path dir(args.out_dir);
  artifacts::writeFile((dir / "network.json").string(), artifacts::dump(artifacts::networkToJson(net)));
  artifacts::writeFile((dir / "distances.json").string(),
                       artifacts::dump(artifacts::distancesToJson(dist)));
  artifacts::writeFile((dir / "barcode.json").string(),
                       artifacts::dump(artifacts::barcodeToJson(diagram)));
  artifacts::writeFile((dir / "cycles.json").string(), artifacts::dump(artifacts::cyclesToJson(cycles)));
  artifacts::writeFile((dir / "overlap.json").string(),
                       artifacts::dump(artifacts::overlapToJson(overlap)));
  artifacts::writeFile((dir / "pool.json").string(),
                       artifacts::dump(artifacts::poolToJson(pool, &net.table())));
  if (args.dump_pgm) {
    artifacts::writeFile((dir / "overlap.pgm").string(), artifacts::overlapToPgm(overlap));
  }
  std::string summary = "d=" + std::to_string(net.table().total) + " q=" + std::to_string(net.size()) +
                        " k=" + std::to_string(cycles.size()) + " s=" + std::to_string(args.scale);
  return summary;
}

struct ComposeArgs {
  std::string overlap_path;
  std::string cycles_path;
  std::string pool_path;
  std::uint64_t seed = 0;
  std::string policy = "strict";
  std::string out;
  std::string flow_out;
  std::string report_out;
  bool flow_only = false;
};

std::string runCompose(const ComposeArgs& args) {
  const OverlapMatrix overlap = artifacts::overlapFromJson(artifacts::parseFile(args.overlap_path));
  const std::vector<std::vector<int>> cycles =
      artifacts::cycleNodesFromJson(artifacts::parseFile(args.cycles_path));
  const artifacts::PoolFile pool_file = artifacts::poolFromJson(artifacts::parseFile(args.pool_path));

  ComposePolicy policy;
  if (args.policy == "strict") {
    policy = ComposePolicy::kStrict;
  } else if (args.policy == "lenient") {
    policy = ComposePolicy::kLenient;
  } else {
    throw ParseError("policy must be 'strict' or 'lenient'");
  }

  const CompositionContext ctx = makeContext(overlap, cycles, pool_file.pool, policy);
  Rng rng(args.seed);
  const ComposeResult result = compose(ctx, rng);
  const PatternReport report = verifyPattern(result.flow, ctx);

  if (args.flow_only) {
    json flow_doc{{"format_version", kFormatVersion}, {"flow", result.flow}};
    artifacts::writeFile(args.out, artifacts::dump(flow_doc));
  } else {
    Score score;
    for (const int id : result.flow) {
      const auto it = pool_file.notes.find(id);
      if (it == pool_file.notes.end()) {
        throw ParseError("pool has no pitch/dur for node " + std::to_string(id) +
                         "; rerun with --flow-only to emit node ids");
      }
      score.flow.push_back(it->second);
    }
    artifacts::writeFile(args.out, serializeScore(score, ScoreFormat::kJsonLines));
  }
  if (!args.flow_out.empty()) {
    json flow_doc{{"format_version", kFormatVersion}, {"flow", result.flow}};
    artifacts::writeFile(args.flow_out, artifacts::dump(flow_doc));
  }
  if (!args.report_out.empty()) {
    artifacts::writeFile(args.report_out,
                         artifacts::dump(artifacts::composeReportToJson(report, result.fallback_positions)));
  }
  return "composed " + std::to_string(result.flow.size()) + " notes, pattern " +
         (report.all_ok ? "ok" : "violated") + ", fallbacks " +
         std::to_string(result.fallback_positions.size());
}

struct SeedMatrixArgs {
  int algo = 1;
  std::string overlap_path;
  std::string cycles_path;
  int scale = 0;  // 0 = take the input matrix's scale
  std::uint64_t seed = 0;
  std::string out;
};

std::string runSeedMatrix(const SeedMatrixArgs& args) {
  const OverlapMatrix overlap = artifacts::overlapFromJson(artifacts::parseFile(args.overlap_path));
  const std::vector<std::vector<int>> cycles =
      artifacts::cycleNodesFromJson(artifacts::parseFile(args.cycles_path));
  const int scale = args.scale > 0 ? args.scale : overlap.scale;
  Rng rng(args.seed);
  OverlapMatrix seeded;
  switch (args.algo) {
    case 1:
      seeded = seedRowwise(overlap, cycles, scale, rng);
      break;
    case 2:
      seeded = seedElementwise(overlap, cycles, rng);
      break;
    case 3:
      seeded = seedColumnwise(overlap, cycles, scale, rng);
      break;
    default:
      throw ParseError("--algo must be 1, 2, or 3");
  }
  artifacts::writeFile(args.out, artifacts::dump(artifacts::overlapToJson(seeded)));
  return "seed matrix " + std::to_string(seeded.cycleCount()) + "x" + std::to_string(seeded.length()) +
         " via algorithm " + std::to_string(args.algo);
}

struct TrainArgs {
  std::string score_path;
  std::string format;
  std::string overlap_path;
  int epochs = 500;
  double lr = 0.001;
  double split = 0.7;
  std::uint64_t seed = 0;
  int batch = 0;
  std::string encoding = "binary";
  std::vector<int> hidden;
  std::string out;
  std::string history_out;
};

OverlapEncoding encodingFor(const std::string& flag) {
  if (flag == "binary") return OverlapEncoding::kBinary;
  if (flag == "integer") return OverlapEncoding::kInteger;
  throw ParseError("encoding must be 'binary' or 'integer'");
}

std::string runTrain(const TrainArgs& args) {
  const Score score = loadScore(args.score_path, args.format);
  const NodeTable table = NodeTable::fromScore(score);
  const OverlapMatrix overlap = artifacts::overlapFromJson(artifacts::parseFile(args.overlap_path));
  const std::vector<int> ids = flowIds(score, table);
  const OverlapEncoding encoding = encodingFor(args.encoding);

  const auto pairs = augment<float>(ids, overlap, encoding, table.size());
  TrainConfig cfg;
  cfg.learning_rate = args.lr;
  cfg.epochs = args.epochs;
  cfg.split = args.split;
  cfg.seed = args.seed;
  cfg.batch_size = args.batch;
  cfg.hidden = args.hidden;
  cfg.classes = table.size();
  const TrainResult<float> result = train(pairs, cfg);

  artifacts::writeFile(args.out, artifacts::dump(artifacts::modelToJson(
                                     result.model, encoding, overlap.cycleCount(), &table)));
  if (!args.history_out.empty()) {
    artifacts::writeFile(args.history_out,
                         artifacts::dump(artifacts::historyToJson(result.train_loss, result.eval_loss)));
  }
  return "trained " + std::to_string(result.train_indices.size()) + "/" + std::to_string(pairs.size()) +
         " pairs, loss " + std::to_string(result.train_loss.front()) + " -> " +
         std::to_string(result.train_loss.back());
}

struct GenerateArgs {
  std::string model_path;
  std::string seed_matrix_path;
  std::string mode = "sample";
  double temperature = 1.0;
  std::uint64_t seed = 0;
  std::string out;
  std::string flow_out;
  bool flow_only = false;
};

std::string runGenerate(const GenerateArgs& args) {
  const artifacts::ModelFile<float> model_file =
      artifacts::modelFromJson<float>(artifacts::parseFile(args.model_path));
  const OverlapMatrix seed_matrix =
      artifacts::overlapFromJson(artifacts::parseFile(args.seed_matrix_path));
  if (seed_matrix.cycleCount() != model_file.cycle_count) {
    throw ParseError("seed matrix has " + std::to_string(seed_matrix.cycleCount()) +
                     " rows but the model was trained with " +
                     std::to_string(model_file.cycle_count));
  }

  GenerateMode mode;
  if (args.mode == "argmax") {
    mode = GenerateMode::kArgmax;
  } else if (args.mode == "sample") {
    mode = GenerateMode::kSample;
  } else {
    throw ParseError("mode must be 'argmax' or 'sample'");
  }

  Rng rng(args.seed);
  const std::vector<int> flow =
      generate(model_file.model, seed_matrix, model_file.encoding, mode, args.temperature, rng);

  if (args.flow_only) {
    json flow_doc{{"format_version", kFormatVersion}, {"flow", flow}};
    artifacts::writeFile(args.out, artifacts::dump(flow_doc));
  } else {
    if (!model_file.table) throw ParseError("model has no node table; use --flow-only");
    Score score;
    for (const int id : flow) score.flow.push_back(model_file.table->note(id));
    artifacts::writeFile(args.out, serializeScore(score, ScoreFormat::kJsonLines));
  }
  if (!args.flow_out.empty()) {
    json flow_doc{{"format_version", kFormatVersion}, {"flow", flow}};
    artifacts::writeFile(args.flow_out, artifacts::dump(flow_doc));
  }
  return "generated " + std::to_string(flow.size()) + " notes (" + args.mode + ")";
}

struct PipelineArgs {
  std::string manifest_path;
};

std::string runPipeline(const PipelineArgs& args) {
  const json manifest = artifacts::parseFile(args.manifest_path);
  artifacts::checkVersion(manifest, "manifest");
  const std::string score_path = manifest.at("score").get<std::string>();
  const std::string out_dir = manifest.at("out_dir").get<std::string>();
  const std::uint64_t seed = manifest.value("seed", std::uint64_t{0});
  const int scale = manifest.value("scale", 4);
  const std::string algo = manifest.at("algo").get<std::string>();

  json replay;
  replay["format_version"] = kFormatVersion;
  replay["manifest"] = manifest;
  json stages = json::array();

  auto stage = [&](const std::string& name, auto&& body) {
    try {
      const std::string summary = body();
      stages.push_back({{"stage", name}, {"summary", summary}});
      std::cout << name << ": " << summary << "\n";
    } catch (const Error& e) {
      throw Error(e.category(), "stage " + name + ": " + e.what());
    }
  };

  const fs::path dir(out_dir);
  AnalyzeArgs analyze_args;
  analyze_args.score_path = score_path;
  analyze_args.format = manifest.value("format", std::string());
  analyze_args.out_dir = out_dir;
  analyze_args.scale = scale;
  stage("analyze", [&] { return runAnalyze(analyze_args); });

  if (algo == "A") {
    ComposeArgs compose_args;
    compose_args.overlap_path = (dir / "overlap.json").string();
    compose_args.cycles_path = (dir / "cycles.json").string();
    compose_args.pool_path = (dir / "pool.json").string();
    compose_args.seed = seed;
    compose_args.policy = manifest.value("policy", std::string("strict"));
    compose_args.out = (dir / "new_score.jsonl").string();
    compose_args.flow_out = (dir / "new_flow.json").string();
    compose_args.report_out = (dir / "compose_report.json").string();
    stage("compose", [&] { return runCompose(compose_args); });
  } else if (algo == "B") {
    SeedMatrixArgs seed_args;
    seed_args.algo = manifest.value("seedgen_algo", 1);
    seed_args.overlap_path = (dir / "overlap.json").string();
    seed_args.cycles_path = (dir / "cycles.json").string();
    seed_args.scale = scale;
    seed_args.seed = seed;
    seed_args.out = (dir / "seed_overlap.json").string();
    stage("seed-matrix", [&] { return runSeedMatrix(seed_args); });

    TrainArgs train_args;
    train_args.score_path = score_path;
    train_args.format = manifest.value("format", std::string());
    train_args.overlap_path = (dir / "overlap.json").string();
    train_args.epochs = manifest.value("epochs", 500);
    train_args.lr = manifest.value("lr", 0.001);
    train_args.split = manifest.value("split", 0.7);
    train_args.seed = seed;
    train_args.batch = manifest.value("batch_size", 0);
    train_args.encoding = manifest.value("encoding", std::string("binary"));
    if (manifest.contains("hidden")) train_args.hidden = manifest["hidden"].get<std::vector<int>>();
    train_args.out = (dir / "model.json").string();
    train_args.history_out = (dir / "history.json").string();
    stage("train", [&] { return runTrain(train_args); });

    GenerateArgs generate_args;
    generate_args.model_path = (dir / "model.json").string();
    generate_args.seed_matrix_path = (dir / "seed_overlap.json").string();
    generate_args.mode = manifest.value("mode", std::string("sample"));
    generate_args.temperature = manifest.value("temperature", 1.0);
    generate_args.seed = seed;
    generate_args.out = (dir / "new_score.jsonl").string();
    generate_args.flow_out = (dir / "new_flow.json").string();
    stage("generate", [&] { return runGenerate(generate_args); });
  } else {
    throw ParseError("manifest algo must be 'A' or 'B'");
  }

  replay["stages"] = std::move(stages);
  artifacts::writeFile((dir / "replay.json").string(), artifacts::dump(replay));
  return "pipeline complete (" + algo + ")";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Music analysis and composition via network cycles and Overlap matrices"};
  app.require_subcommand(1);

  AnalyzeArgs analyze_args;
  auto* analyze = app.add_subcommand("analyze", "Score -> network/distances/barcode/cycles/overlap/pool");
  analyze->add_option("--score", analyze_args.score_path, "Input score")->required();
  analyze->add_option("--format", analyze_args.format, "jsonl or csv (default: by extension)");
  analyze->add_option("--scale", analyze_args.scale, "Overlap scale s")->check(CLI::PositiveNumber);
  analyze->add_option("--out-dir", analyze_args.out_dir, "Output directory");
  analyze->add_flag("--dump-pgm", analyze_args.dump_pgm, "Also write overlap.pgm");

  ComposeArgs compose_args;
  auto* compose_cmd = app.add_subcommand("compose", "Rule-based composition following an Overlap pattern");
  compose_cmd->add_option("--overlap", compose_args.overlap_path, "overlap.json")->required();
  compose_cmd->add_option("--cycles", compose_args.cycles_path, "cycles.json")->required();
  compose_cmd->add_option("--pool", compose_args.pool_path, "pool.json")->required();
  compose_cmd->add_option("--seed", compose_args.seed, "RNG seed");
  compose_cmd->add_option("--policy", compose_args.policy, "strict or lenient");
  compose_cmd->add_option("--out", compose_args.out, "Output score (JSON-lines)")->required();
  compose_cmd->add_option("--flow-out", compose_args.flow_out, "Also write the node-id flow");
  compose_cmd->add_option("--report-out", compose_args.report_out, "Write the pattern report");
  compose_cmd->add_flag("--flow-only", compose_args.flow_only,
                        "Write node ids instead of a score (for pools without note info)");

  SeedMatrixArgs seed_args;
  auto* seed_cmd = app.add_subcommand("seed-matrix", "Generate a seed Overlap matrix");
  seed_cmd->add_option("--algo", seed_args.algo, "1 (row), 2 (element), or 3 (column)")->required();
  seed_cmd->add_option("--overlap", seed_args.overlap_path, "overlap.json")->required();
  seed_cmd->add_option("--cycles", seed_args.cycles_path, "cycles.json")->required();
  seed_cmd->add_option("--scale", seed_args.scale, "Overlap scale s (default: input's)");
  seed_cmd->add_option("--seed", seed_args.seed, "RNG seed");
  seed_cmd->add_option("--out", seed_args.out, "Output seed_overlap.json")->required();

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train the generation model on augmented windows");
  train_cmd->add_option("--score", train_args.score_path, "Input score")->required();
  train_cmd->add_option("--format", train_args.format, "jsonl or csv (default: by extension)");
  train_cmd->add_option("--overlap", train_args.overlap_path, "overlap.json")->required();
  train_cmd->add_option("--epochs", train_args.epochs, "Training epochs");
  train_cmd->add_option("--lr", train_args.lr, "Learning rate");
  train_cmd->add_option("--split", train_args.split, "Training fraction (0,1]");
  train_cmd->add_option("--seed", train_args.seed, "RNG seed");
  train_cmd->add_option("--batch", train_args.batch, "Mini-batch size (0 = full batch)");
  train_cmd->add_option("--encoding", train_args.encoding, "binary or integer");
  train_cmd->add_option("--hidden", train_args.hidden, "Hidden layer widths");
  train_cmd->add_option("--out", train_args.out, "Output model.json")->required();
  train_cmd->add_option("--history-out", train_args.history_out, "Write per-epoch losses");

  GenerateArgs generate_args;
  auto* generate_cmd = app.add_subcommand("generate", "Generate music from a seed Overlap matrix");
  generate_cmd->add_option("--model", generate_args.model_path, "model.json")->required();
  generate_cmd->add_option("--seed-matrix", generate_args.seed_matrix_path, "seed_overlap.json")
      ->required();
  generate_cmd->add_option("--mode", generate_args.mode, "argmax or sample");
  generate_cmd->add_option("--temp", generate_args.temperature, "Sampling temperature");
  generate_cmd->add_option("--seed", generate_args.seed, "RNG seed");
  generate_cmd->add_option("--out", generate_args.out, "Output score (JSON-lines)")->required();
  generate_cmd->add_option("--flow-out", generate_args.flow_out, "Also write the node-id flow");
  generate_cmd->add_flag("--flow-only", generate_args.flow_only, "Write node ids instead of a score");

  PipelineArgs pipeline_args;
  auto* pipeline_cmd = app.add_subcommand("pipeline", "Run analyze + compose/train/generate from a manifest");
  pipeline_cmd->add_option("--manifest", pipeline_args.manifest_path, "manifest.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    std::string summary;
    if (*analyze) summary = runAnalyze(analyze_args);
    if (*compose_cmd) summary = runCompose(compose_args);
    if (*seed_cmd) summary = runSeedMatrix(seed_args);
    if (*train_cmd) summary = runTrain(train_args);
    if (*generate_cmd) summary = runGenerate(generate_args);
    if (*pipeline_cmd) summary = runPipeline(pipeline_args);
    std::cout << summary << "\n";
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.category());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}

#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "topomuse/composer.hpp"
#include "topomuse/network.hpp"
#include "topomuse/neural.hpp"
#include "topomuse/node_pool.hpp"
#include "topomuse/overlap.hpp"
#include "topomuse/persistence.hpp"

namespace topomuse {

inline constexpr int kFormatVersion = 1;

namespace artifacts {

using nlohmann::json;

inline void checkVersion(const json& document, const std::string& what) {
  if (!document.is_object() || !document.contains("format_version")) {
    throw ParseError(what + ": missing format_version");
  }
  if (document["format_version"].get<int>() != kFormatVersion) {
    throw ParseError(what + ": unsupported format_version");
  }
}

inline std::string dump(const json& document) { return document.dump(2) + "\n"; }

inline void writeFile(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  out << contents;
}

inline std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline json parseFile(const std::string& path) {
  json document = json::parse(readFile(path), nullptr, false);
  if (document.is_discarded()) throw ParseError("'" + path + "' is not valid JSON");
  return document;
}

// --- network.json -----------------------------------------------------------

inline json networkToJson(const MusicNetwork& net) {
  json document;
  document["format_version"] = kFormatVersion;
  document["d"] = net.table().total;
  document["q"] = net.size();
  json nodes = json::array();
  for (int id = 1; id <= net.size(); ++id) {
    const Note& note = net.table().note(id);
    nodes.push_back({{"id", id},
                     {"pitch", note.pitch.semitone},
                     {"dur", note.duration.str()},
                     {"freq", net.table().frequencies[static_cast<std::size_t>(id - 1)]}});
  }
  document["nodes"] = std::move(nodes);
  document["weights"] = net.weights();
  return document;
}

/// Node table as stored inside network.json / model.json.
inline json nodeTableToJson(const NodeTable& table) {
  json nodes = json::array();
  for (int id = 1; id <= table.size(); ++id) {
    const Note& note = table.note(id);
    nodes.push_back({{"id", id},
                     {"pitch", note.pitch.semitone},
                     {"dur", note.duration.str()},
                     {"freq", table.frequencies[static_cast<std::size_t>(id - 1)]}});
  }
  return nodes;
}

inline NodeTable nodeTableFromJson(const json& nodes) {
  NodeTable table;
  int expected = 1;
  for (const json& entry : nodes) {
    if (entry.at("id").get<int>() != expected) {
      throw ParseError("node table ids must be 1..q in order");
    }
    Note note{Pitch{entry.at("pitch").get<int>()}, Rational::parse(entry.at("dur").get<std::string>())};
    checkPitch(note.pitch.semitone);
    checkDuration(note.duration);
    if (!table.nodes.empty() && !(table.nodes.back() < note)) {
      throw ParseError("node table must be sorted ascending by pitch then duration");
    }
    table.nodes.push_back(note);
    const std::int64_t freq = entry.value("freq", std::int64_t{1});
    if (freq < 1) throw ParseError("node frequency must be >= 1");
    table.frequencies.push_back(freq);
    table.total += freq;
    ++expected;
  }
  return table;
}

inline MusicNetwork networkFromJson(const json& document) {
  checkVersion(document, "network");
  NodeTable table = nodeTableFromJson(document.at("nodes"));
  std::vector<std::vector<std::int64_t>> weights =
      document.at("weights").get<std::vector<std::vector<std::int64_t>>>();
  return MusicNetwork::fromParts(std::move(table), std::move(weights));
}

// --- distances.json ---------------------------------------------------------

inline json distancesToJson(const DistanceMatrix& dist) {
  json document;
  document["format_version"] = kFormatVersion;
  document["q"] = dist.size();
  json rows = json::array();
  for (int i = 0; i < dist.size(); ++i) {
    json row = json::array();
    for (int j = 0; j < dist.size(); ++j) row.push_back(dist.at(i, j).toDouble());
    rows.push_back(std::move(row));
  }
  document["delta"] = std::move(rows);
  return document;
}

// --- barcode.json / cycles.json ----------------------------------------------

inline json barcodeToJson(const Diagram& diagram) {
  json document;
  document["format_version"] = kFormatVersion;
  json intervals = json::array();
  for (const PersistenceInterval& interval : diagram.intervals) {
    json entry;
    entry["dim"] = interval.dim;
    entry["birth"] = interval.birth.toDouble();
    if (interval.death) {
      entry["death"] = interval.death->toDouble();
    } else {
      entry["death"] = nullptr;
    }
    intervals.push_back(std::move(entry));
  }
  document["intervals"] = std::move(intervals);
  return document;
}

inline json cyclesToJson(const std::vector<Cycle>& cycles) {
  json document;
  document["format_version"] = kFormatVersion;
  json list = json::array();
  for (const Cycle& cycle : cycles) {
    list.push_back({{"ordinal", cycle.ordinal},
                    {"nodes", cycle.nodes},
                    {"birth", cycle.interval.birth.toDouble()},
                    {"death", cycle.interval.death ? json(cycle.interval.death->toDouble()) : json()}});
  }
  document["cycles"] = std::move(list);
  return document;
}

inline std::vector<std::vector<int>> cycleNodesFromJson(const json& document) {
  checkVersion(document, "cycles");
  std::vector<std::vector<int>> sets;
  for (const json& entry : document.at("cycles")) {
    sets.push_back(entry.at("nodes").get<std::vector<int>>());
  }
  return sets;
}

// --- overlap.json ------------------------------------------------------------

inline json overlapToJson(const OverlapMatrix& m) {
  json document;
  document["format_version"] = kFormatVersion;
  document["kind"] = m.kind == OverlapKind::kBinary ? "binary" : "integer";
  document["s"] = m.scale;
  document["k"] = m.cycleCount();
  document["d"] = m.length();
  document["rows"] = m.rows;
  return document;
}

inline OverlapMatrix overlapFromJson(const json& document) {
  checkVersion(document, "overlap");
  OverlapMatrix m;
  const std::string kind = document.at("kind").get<std::string>();
  if (kind == "binary") {
    m.kind = OverlapKind::kBinary;
  } else if (kind == "integer") {
    m.kind = OverlapKind::kInteger;
  } else {
    throw ParseError("overlap: kind must be 'binary' or 'integer'");
  }
  m.scale = document.at("s").get<int>();
  m.d = document.at("d").get<int>();
  m.rows = document.at("rows").get<std::vector<std::vector<std::int64_t>>>();
  if (static_cast<int>(m.rows.size()) != document.at("k").get<int>()) {
    throw ParseError("overlap: k does not match row count");
  }
  checkOverlapShape(m);
  return m;
}

/// Portable-graymap dump of the binary support (dark = 1), one image row per
/// cycle; handy for eyeballing the block structure.
inline std::string overlapToPgm(const OverlapMatrix& m) {
  const OverlapMatrix binary = asBinary(m);
  std::ostringstream out;
  out << "P2\n" << binary.length() << ' ' << std::max(binary.cycleCount(), 1) << "\n255\n";
  if (binary.cycleCount() == 0) {
    for (int j = 0; j < binary.length(); ++j) out << (j ? " " : "") << 255;
    out << '\n';
    return out.str();
  }
  for (int i = 0; i < binary.cycleCount(); ++i) {
    for (int j = 0; j < binary.length(); ++j) {
      out << (j ? " " : "") << (binary.at(i, j) != 0 ? 0 : 255);
    }
    out << '\n';
  }
  return out.str();
}

/// CSV dump of the raw entries, one line per cycle row.
inline std::string overlapToCsv(const OverlapMatrix& m) {
  std::ostringstream out;
  for (const auto& row : m.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << row[j];
    out << '\n';
  }
  return out.str();
}

// --- pool.json ---------------------------------------------------------------

inline json poolToJson(const NodePool& pool, const NodeTable* table = nullptr) {
  json document;
  document["format_version"] = kFormatVersion;
  document["total"] = pool.total;
  json nodes = json::array();
  for (int i = 0; i < pool.size(); ++i) {
    json entry{{"id", pool.ids[static_cast<std::size_t>(i)]},
               {"freq", pool.freqs[static_cast<std::size_t>(i)]}};
    if (table != nullptr) {
      const Note& note = table->note(pool.ids[static_cast<std::size_t>(i)]);
      entry["pitch"] = note.pitch.semitone;
      entry["dur"] = note.duration.str();
    }
    nodes.push_back(std::move(entry));
  }
  document["nodes"] = std::move(nodes);
  return document;
}

struct PoolFile {
  NodePool pool;
  // Note info per node id when the file carries it (computed pools do,
  // fixture pools may not).
  std::map<int, Note> notes;
};

inline PoolFile poolFromJson(const json& document) {
  checkVersion(document, "pool");
  PoolFile file;
  std::vector<int> ids;
  std::vector<std::int64_t> freqs;
  for (const json& entry : document.at("nodes")) {
    const int id = entry.at("id").get<int>();
    ids.push_back(id);
    freqs.push_back(entry.at("freq").get<std::int64_t>());
    if (entry.contains("pitch") && entry.contains("dur")) {
      Note note{Pitch{entry.at("pitch").get<int>()},
                Rational::parse(entry.at("dur").get<std::string>())};
      file.notes.emplace(id, note);
    }
  }
  file.pool = poolFromCounts(std::move(ids), std::move(freqs));
  return file;
}

// --- compose report ----------------------------------------------------------

inline json composeReportToJson(const PatternReport& report,
                                const std::vector<int>& fallback_positions) {
  json document;
  document["format_version"] = kFormatVersion;
  document["all_ok"] = report.all_ok;
  document["failed_positions"] = report.failed_positions;
  document["fallback_positions"] = fallback_positions;
  return document;
}

// --- model.json ----------------------------------------------------------------

template <typename Scalar>
json modelToJson(const Mlp<Scalar>& model, OverlapEncoding encoding, int cycle_count,
                 const NodeTable* table = nullptr) {
  json document;
  document["format_version"] = kFormatVersion;
  document["input_dim"] = model.inputDim();
  document["positions"] = model.positions();
  document["classes"] = model.classes();
  document["cycle_count"] = cycle_count;
  document["encoding"] = encoding == OverlapEncoding::kBinary ? "binary" : "integer";
  json layers = json::array();
  for (const auto& layer : model.layers()) {
    json entry;
    entry["rows"] = layer.weights.rows();
    entry["cols"] = layer.weights.cols();
    entry["activation"] = layer.relu ? "relu" : "linear";
    std::vector<double> weights;
    weights.reserve(static_cast<std::size_t>(layer.weights.size()));
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
        weights.push_back(static_cast<double>(layer.weights(r, c)));
      }
    }
    entry["weights"] = std::move(weights);
    std::vector<double> bias;
    bias.reserve(static_cast<std::size_t>(layer.bias.size()));
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) {
      bias.push_back(static_cast<double>(layer.bias[r]));
    }
    entry["bias"] = std::move(bias);
    layers.push_back(std::move(entry));
  }
  document["layers"] = std::move(layers);
  if (table != nullptr) document["node_table"] = nodeTableToJson(*table);
  return document;
}

template <typename Scalar>
struct ModelFile {
  Mlp<Scalar> model;
  OverlapEncoding encoding = OverlapEncoding::kBinary;
  int cycle_count = 0;
  std::optional<NodeTable> table;
};

template <typename Scalar>
ModelFile<Scalar> modelFromJson(const json& document) {
  checkVersion(document, "model");
  ModelFile<Scalar> file;
  const int input_dim = document.at("input_dim").get<int>();
  const int positions = document.at("positions").get<int>();
  const int classes = document.at("classes").get<int>();
  file.cycle_count = document.at("cycle_count").get<int>();
  file.encoding = document.at("encoding").get<std::string>() == "integer"
                      ? OverlapEncoding::kInteger
                      : OverlapEncoding::kBinary;
  std::vector<int> hidden;
  const json& layers = document.at("layers");
  for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
    hidden.push_back(layers[l].at("rows").get<int>());
  }
  file.model = Mlp<Scalar>(input_dim, hidden, positions, classes);
  auto& model_layers = file.model.layers();
  if (model_layers.size() != layers.size()) throw ParseError("model: layer count mismatch");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const json& entry = layers[l];
    const Eigen::Index rows = entry.at("rows").get<Eigen::Index>();
    const Eigen::Index cols = entry.at("cols").get<Eigen::Index>();
    if (model_layers[l].weights.rows() != rows || model_layers[l].weights.cols() != cols) {
      throw ParseError("model: layer shape mismatch");
    }
    const std::vector<double> weights = entry.at("weights").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(weights.size()) != rows * cols) {
      throw ParseError("model: weight array size mismatch");
    }
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        model_layers[l].weights(r, c) =
            static_cast<Scalar>(weights[static_cast<std::size_t>(r * cols + c)]);
      }
    }
    const std::vector<double> bias = entry.at("bias").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(bias.size()) != rows) {
      throw ParseError("model: bias array size mismatch");
    }
    for (Eigen::Index r = 0; r < rows; ++r) {
      model_layers[l].bias[r] = static_cast<Scalar>(bias[static_cast<std::size_t>(r)]);
    }
    model_layers[l].relu = entry.at("activation").get<std::string>() == "relu";
  }
  if (document.contains("node_table")) {
    file.table = nodeTableFromJson(document.at("node_table"));
  }
  return file;
}

// --- training history -----------------------------------------------------------

inline json historyToJson(const std::vector<double>& train_loss,
                          const std::vector<double>& eval_loss) {
  json document;
  document["format_version"] = kFormatVersion;
  document["train_loss"] = train_loss;
  document["eval_loss"] = eval_loss;
  return document;
}

}  // namespace artifacts
}  // namespace topomuse

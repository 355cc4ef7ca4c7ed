#pragma once

#include <cctype>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "topomuse/note.hpp"

namespace topomuse {

enum class ScoreFormat { kJsonLines, kCsv };

/// Scientific pitch name ("G#3", "Eb5") to MIDI, octave-4 convention C4 = 60.
inline int pitchFromName(std::string_view name) {
  static constexpr int kBase[7] = {9, 11, 0, 2, 4, 5, 7};  // A..G
  if (name.empty()) throw ParseError("empty pitch name");
  const char letter = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
  if (letter < 'A' || letter > 'G') {
    throw ParseError("invalid pitch name '" + std::string(name) + "'");
  }
  int semitone = kBase[letter - 'A'];
  std::size_t pos = 1;
  if (pos < name.size() && (name[pos] == '#' || name[pos] == 'b')) {
    semitone += name[pos] == '#' ? 1 : -1;
    ++pos;
  }
  int octave = 0;
  bool negative = false;
  std::size_t digits = 0;
  if (pos < name.size() && name[pos] == '-') {
    negative = true;
    ++pos;
  }
  for (; pos < name.size(); ++pos, ++digits) {
    if (!std::isdigit(static_cast<unsigned char>(name[pos]))) {
      throw ParseError("invalid pitch name '" + std::string(name) + "'");
    }
    octave = octave * 10 + (name[pos] - '0');
  }
  if (digits == 0) throw ParseError("pitch name '" + std::string(name) + "' has no octave");
  if (negative) octave = -octave;
  const int midi = 12 * (octave + 1) + semitone;
  checkPitch(midi);
  return midi;
}

namespace detail {

inline int pitchFromJson(const nlohmann::json& value) {
  int midi = 0;
  if (value.is_number_integer()) {
    midi = value.get<int>();
    checkPitch(midi);
  } else if (value.is_string()) {
    midi = pitchFromName(value.get<std::string>());
  } else {
    throw ParseError("pitch must be a MIDI integer or a name string");
  }
  return midi;
}

inline Duration durationFromJson(const nlohmann::json& value) {
  Duration dur;
  if (value.is_number_integer()) {
    dur = Rational(value.get<std::int64_t>());
  } else if (value.is_string()) {
    dur = Rational::parse(value.get<std::string>());
  } else {
    throw ParseError("dur must be an integer or a rational string like \"5/3\"");
  }
  checkDuration(dur);
  return dur;
}

inline std::vector<std::string> splitLines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(start, end - start));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    if (end == text.size()) break;
    start = end + 1;
  }
  return lines;
}

inline std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace detail

/// Parses a score from JSON-lines (canonical) or CSV. JSON-lines: one note
/// object {"pitch": 60|"G#3", "dur": "5/3"|1} per line, with an optional
/// leading header object carrying "title"/"metadata". CSV: header "pitch,dur"
/// followed by one note per row. Errors report 1-based line numbers.
inline Score parseScore(std::string_view text, ScoreFormat format) {
  Score score;
  const std::vector<std::string> lines = detail::splitLines(text);

  auto fail = [](std::size_t line_no, const std::string& what) -> void {
    throw ParseError("line " + std::to_string(line_no) + ": " + what);
  };

  if (format == ScoreFormat::kJsonLines) {
    bool saw_note = false;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const std::string line = detail::trim(lines[i]);
      if (line.empty()) continue;
      nlohmann::json record = nlohmann::json::parse(line, nullptr, false);
      if (record.is_discarded() || !record.is_object()) fail(i + 1, "malformed JSON record");
      if (!record.contains("pitch")) {
        // Header object: allowed only before the first note.
        if (saw_note) fail(i + 1, "header object after first note");
        if (record.contains("title")) {
          if (!record["title"].is_string()) fail(i + 1, "title must be a string");
          score.title = record["title"].get<std::string>();
        }
        if (record.contains("metadata")) {
          if (!record["metadata"].is_object()) fail(i + 1, "metadata must be an object");
          for (const auto& [key, value] : record["metadata"].items()) {
            if (!value.is_string()) fail(i + 1, "metadata values must be strings");
            score.metadata[key] = value.get<std::string>();
          }
        }
        continue;
      }
      if (!record.contains("dur")) fail(i + 1, "record missing 'dur'");
      try {
        score.flow.push_back(Note{Pitch{detail::pitchFromJson(record["pitch"])},
                                  detail::durationFromJson(record["dur"])});
      } catch (const ParseError& e) {
        fail(i + 1, e.what());
      }
      saw_note = true;
    }
  } else {
    if (lines.empty() || detail::trim(lines[0]) != "pitch,dur") {
      throw ParseError("line 1: CSV header must be 'pitch,dur'");
    }
    for (std::size_t i = 1; i < lines.size(); ++i) {
      const std::string line = detail::trim(lines[i]);
      if (line.empty()) continue;
      const std::size_t comma = line.find(',');
      if (comma == std::string::npos) fail(i + 1, "expected 'pitch,dur'");
      const std::string pitch_field = detail::trim(line.substr(0, comma));
      const std::string dur_field = detail::trim(line.substr(comma + 1));
      try {
        int midi = 0;
        if (!pitch_field.empty() &&
            (std::isdigit(static_cast<unsigned char>(pitch_field[0])) || pitch_field[0] == '-')) {
          std::size_t used = 0;
          midi = std::stoi(pitch_field, &used);
          if (used != pitch_field.size()) throw ParseError("invalid pitch '" + pitch_field + "'");
          checkPitch(midi);
        } else {
          midi = pitchFromName(pitch_field);
        }
        Duration dur = Rational::parse(dur_field);
        checkDuration(dur);
        score.flow.push_back(Note{Pitch{midi}, dur});
      } catch (const ParseError& e) {
        fail(i + 1, e.what());
      } catch (const std::exception&) {
        fail(i + 1, "invalid record '" + line + "'");
      }
    }
  }

  checkScore(score);
  return score;
}

/// Serializes a score; parseScore(serializeScore(s)) == s for every valid
/// score. The JSON-lines header is omitted when title and metadata are empty.
inline std::string serializeScore(const Score& score, ScoreFormat format) {
  std::ostringstream out;
  if (format == ScoreFormat::kJsonLines) {
    if (!score.title.empty() || !score.metadata.empty()) {
      nlohmann::json header;
      if (!score.title.empty()) header["title"] = score.title;
      if (!score.metadata.empty()) {
        header["metadata"] = nlohmann::json::object();
        for (const auto& [key, value] : score.metadata) header["metadata"][key] = value;
      }
      out << header.dump() << '\n';
    }
    for (const Note& note : score.flow) {
      nlohmann::json record;
      record["pitch"] = note.pitch.semitone;
      record["dur"] = note.duration.str();
      out << record.dump() << '\n';
    }
  } else {
    out << "pitch,dur\n";
    for (const Note& note : score.flow) {
      out << note.pitch.semitone << ',' << note.duration.str() << '\n';
    }
  }
  return out.str();
}

}  // namespace topomuse

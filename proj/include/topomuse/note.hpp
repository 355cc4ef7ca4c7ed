#pragma once

#include <compare>
#include <map>
#include <string>
#include <vector>

#include "topomuse/errors.hpp"
#include "topomuse/rational.hpp"

namespace topomuse {

/// MIDI pitch, C4 = 60. Valid range [0, 127].
struct Pitch {
  int semitone = 60;
  auto operator<=>(const Pitch&) const = default;
};

/// Note length in Jeonggan units; exact rational, always > 0.
using Duration = Rational;

/// The atomic music event. Equality is exact and component-wise, which makes
/// notes usable as map keys when building the node table.
struct Note {
  Pitch pitch;
  Duration duration;
  auto operator<=>(const Note&) const = default;
};

inline void checkPitch(int semitone) {
  if (semitone < 0 || semitone > 127) {
    throw ParseError("pitch " + std::to_string(semitone) + " outside MIDI range [0,127]");
  }
}

inline void checkDuration(const Duration& duration) {
  if (duration <= Rational(0)) {
    throw ParseError("nonpositive duration " + duration.str());
  }
}

/// Monophonic score: an ordered flow of at least two notes. Consecutive notes
/// are temporal neighbors by construction, so there is never an isolated node
/// downstream.
struct Score {
  std::vector<Note> flow;
  std::string title;
  std::map<std::string, std::string> metadata;

  bool operator==(const Score&) const = default;
};

inline void checkScore(const Score& score) {
  if (score.flow.size() < 2) {
    throw ParseError("score needs at least 2 notes, got " +
                     std::to_string(score.flow.size()));
  }
  for (const Note& note : score.flow) {
    checkPitch(note.pitch.semitone);
    checkDuration(note.duration);
  }
}

}  // namespace topomuse

#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "persona/action.hpp"
#include "persona/personality.hpp"

namespace persona {

enum class GazeMode { Mutual, Avoidant };
enum class Level { Low, Middle, High };
enum class Volume { Low, Middle, High, Dynamic };
enum class HeadMovement { Still, Nodding, Shaking, LittleShaking };

std::string_view to_string(GazeMode v);
std::string_view to_string(Level v);
std::string_view to_string(Volume v);
std::string_view to_string(HeadMovement v);

struct BehavioralParameters {
  GazeMode gaze_mode = GazeMode::Mutual;
  Level gesture_amplitude = Level::Middle;
  Volume volume = Volume::Middle;
  HeadMovement head_movement = HeadMovement::Still;
  Level speech_rate = Level::Middle;
  Level pitch = Level::Middle;
  std::vector<std::string> language_style;

  friend bool operator==(const BehavioralParameters&, const BehavioralParameters&) = default;
};

// The closed language-style vocabulary for one pole.
const std::vector<std::string>& style_descriptors(TraitPole pole);

// Union of the active poles' descriptors in (C, E, A) order without
// duplicates; {"neutral"} for the neutral vector.
std::vector<std::string> language_style(const PersonalityVector& p);

// "thoughtless, distracted, ..." joined with ", ".
std::string join_style(const std::vector<std::string>& descriptors);

// Per-pole rows over gaze, gesture, volume, rate, pitch and head.
//
// File format, one `<pole> <parameter> <value>` triple per line, e.g.
//
//   HE gaze mutual
//   HE gesture high
//
// Parameters: gaze, gesture, volume, rate, pitch, head. Every pole must
// define every parameter.
class BehaviorTable {
 public:
  struct Row {
    GazeMode gaze;
    Level gesture;
    Volume volume;
    Level rate;
    Level pitch;
    HeadMovement head;
  };

  // The shipped defaults.
  BehaviorTable();
  static BehaviorTable load(const std::filesystem::path& path);
  static BehaviorTable parse(std::string_view text);

  const Row& row(TraitPole p) const { return rows_[index(p)]; }

 private:
  std::array<Row, 6> rows_{};
};

// Parameter-wise lookup. For each parameter the highest-precedence active
// pole (A > E > C) decides; for the three-level and volume parameters a
// Middle value yields to the next pole that has a non-Middle opinion. The
// action does not alter the personality mapping.
BehavioralParameters map_parameters(const PersonalityVector& p, const AbstractAction& a,
                                    const BehaviorTable& table = BehaviorTable{});

}  // namespace persona

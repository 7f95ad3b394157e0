#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "persona/emotion.hpp"

namespace persona {

// Caller-owned random state. mt19937_64 output is fully specified by the
// standard, so seeded runs are reproducible across toolchains as long as we
// avoid the (implementation-defined) std distributions; see uniform01().
using Rng = std::mt19937_64;

// Uniform double in [0, 1) built from the top 53 bits of one draw.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

enum class TraitAxis { Conscientiousness, Extraversion, Agreeableness };

inline constexpr std::array<TraitAxis, 3> kAllAxes = {
    TraitAxis::Conscientiousness, TraitAxis::Extraversion, TraitAxis::Agreeableness};

constexpr std::size_t index(TraitAxis a) { return static_cast<std::size_t>(a); }

enum class Polarity { High, Low };

struct TraitPole {
  TraitAxis axis;
  Polarity polarity;

  friend constexpr bool operator==(TraitPole, TraitPole) = default;
};

inline constexpr std::array<TraitPole, 6> kAllPoles = {{
    {TraitAxis::Conscientiousness, Polarity::High},
    {TraitAxis::Conscientiousness, Polarity::Low},
    {TraitAxis::Extraversion, Polarity::High},
    {TraitAxis::Extraversion, Polarity::Low},
    {TraitAxis::Agreeableness, Polarity::High},
    {TraitAxis::Agreeableness, Polarity::Low},
}};

// Dense index into kAllPoles: HC=0, LC=1, HE=2, LE=3, HA=4, LA=5.
constexpr std::size_t index(TraitPole p) {
  return index(p.axis) * 2 + (p.polarity == Polarity::High ? 0 : 1);
}

constexpr TraitPole opposite(TraitPole p) {
  return {p.axis, p.polarity == Polarity::High ? Polarity::Low : Polarity::High};
}

// "HC", "LE", ...
std::string_view to_string(TraitPole p);
std::optional<TraitPole> parse_pole(std::string_view s);

// "C", "E", "A"; parse also accepts the full axis names.
std::string_view to_string(TraitAxis a);
std::optional<TraitAxis> parse_axis(std::string_view s);

// Human-facing pole name: Conscientious/Unscrupulous, Extravert/Introvert,
// Agreeable/Disagreeable.
std::string_view display_name(TraitPole p);

// Weights on the C, E and A unit axes, each in [-1, +1]; 0 means the axis is
// inactive. Construct through make_personality() to get validation.
class PersonalityVector {
 public:
  PersonalityVector() = default;

  double wc() const { return w_[0]; }
  double we() const { return w_[1]; }
  double wa() const { return w_[2]; }
  double weight(TraitAxis a) const { return w_[index(a)]; }

  bool is_active(TraitAxis a) const { return weight(a) != 0.0; }
  // Pole expressed on this axis, if any.
  std::optional<TraitPole> pole(TraitAxis a) const;
  bool is_active(TraitPole p) const;

  friend bool operator==(const PersonalityVector&, const PersonalityVector&) = default;

 private:
  friend PersonalityVector make_personality(double wc, double we, double wa);
  std::array<double, 3> w_{0.0, 0.0, 0.0};
};

// Throws OutOfRange when any |weight| > 1 or a weight is not finite.
PersonalityVector make_personality(double wc, double we, double wa);

// Active poles in (C, E, A) order; empty for the neutral vector.
std::vector<TraitPole> active_poles(const PersonalityVector& p);

// "Disagreeable and Unscrupulous"; poles listed E, A, C; "Neutral" when no
// pole is active.
std::string personality_description(const PersonalityVector& p, std::string_view sep = " and ");

// Per-axis sensitivity to a perceived emotion. Loaded from a small text file:
//
//   base <axis> <value>
//   override <emotion> <axis> <value>
//
// Defaults: A=0.40, E=0.35, C=0.25; perceived anger raises A to 0.50.
class SensitivityTable {
 public:
  SensitivityTable();

  static SensitivityTable load(const std::filesystem::path& path);
  static SensitivityTable parse(std::string_view text);

  double sensitivity(TraitAxis axis, Emotion perceived) const {
    return table_[index(perceived)][index(axis)];
  }
  void set(TraitAxis axis, Emotion perceived, double value);

 private:
  std::array<std::array<double, 3>, kEmotionCount> table_{};
};

struct PoleWeight {
  TraitPole pole;
  double weight;
};

// Normalized categorical weights over the active poles, in (C, E, A) order:
// weight(X) ∝ |w_axis(X)| * sensitivity(axis(X), perceived).
// Throws NoActivePole for the neutral vector.
std::vector<PoleWeight> trait_selection_weights(const PersonalityVector& p, Emotion perceived,
                                                const SensitivityTable& table = SensitivityTable{});

// One categorical draw. Consumes exactly one value from rng.
TraitPole sample_trait_pole(const std::vector<PoleWeight>& weights, Rng& rng);

}  // namespace persona

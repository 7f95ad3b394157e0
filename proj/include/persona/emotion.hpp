#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace persona {

// Ekman's six basic emotions plus Neutral. The enumerator order is the
// canonical iteration order used in tables and CSV exports.
enum class Emotion { Happiness, Sadness, Anger, Fear, Surprise, Disgust, Neutral };

inline constexpr std::size_t kEmotionCount = 7;

inline constexpr std::array<Emotion, kEmotionCount> kAllEmotions = {
    Emotion::Happiness, Emotion::Sadness,  Emotion::Anger,  Emotion::Fear,
    Emotion::Surprise,  Emotion::Disgust, Emotion::Neutral};

// The six non-neutral emotions.
inline constexpr std::array<Emotion, 6> kEkmanEmotions = {
    Emotion::Happiness, Emotion::Sadness, Emotion::Anger,
    Emotion::Fear,      Emotion::Surprise, Emotion::Disgust};

constexpr std::size_t index(Emotion e) { return static_cast<std::size_t>(e); }

// +1 for Happiness/Surprise, -1 for the four negative emotions, 0 for Neutral.
constexpr int valence(Emotion e) {
  switch (e) {
    case Emotion::Happiness:
    case Emotion::Surprise:
      return 1;
    case Emotion::Neutral:
      return 0;
    default:
      return -1;
  }
}

// Lowercase canonical name ("happiness"), used in every file format.
std::string_view to_string(Emotion e);

// Adjective form ("Happy", "Disgusted") used when rendering prompts.
std::string_view adjective(Emotion e);

// Accepts canonical names case-insensitively plus the common adjective and
// short forms ("happy", "sad", "angry", "afraid", "surprised", "disgusted").
std::optional<Emotion> parse_emotion(std::string_view s);

}  // namespace persona

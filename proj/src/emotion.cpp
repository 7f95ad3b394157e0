#include "persona/emotion.hpp"

#include <fstream>
#include <sstream>

#include "persona/errors.hpp"
#include "text_util.hpp"

namespace persona {

std::string_view to_string(Emotion e) {
  switch (e) {
    case Emotion::Happiness: return "happiness";
    case Emotion::Sadness: return "sadness";
    case Emotion::Anger: return "anger";
    case Emotion::Fear: return "fear";
    case Emotion::Surprise: return "surprise";
    case Emotion::Disgust: return "disgust";
    case Emotion::Neutral: return "neutral";
  }
  return "neutral";
}

std::string_view adjective(Emotion e) {
  switch (e) {
    case Emotion::Happiness: return "Happy";
    case Emotion::Sadness: return "Sad";
    case Emotion::Anger: return "Angry";
    case Emotion::Fear: return "Afraid";
    case Emotion::Surprise: return "Surprised";
    case Emotion::Disgust: return "Disgust";
    case Emotion::Neutral: return "Neutral";
  }
  return "Neutral";
}

std::optional<Emotion> parse_emotion(std::string_view s) {
  const std::string k = detail::lower(detail::trim(s));
  struct Alias {
    std::string_view name;
    Emotion e;
  };
  static constexpr Alias kAliases[] = {
      {"happiness", Emotion::Happiness}, {"happy", Emotion::Happiness}, {"joy", Emotion::Happiness},
      {"sadness", Emotion::Sadness},     {"sad", Emotion::Sadness},     {"anger", Emotion::Anger},
      {"angry", Emotion::Anger},         {"fear", Emotion::Fear},       {"afraid", Emotion::Fear},
      {"fearful", Emotion::Fear},        {"surprise", Emotion::Surprise}, {"surprised", Emotion::Surprise},
      {"disgust", Emotion::Disgust},     {"disgusted", Emotion::Disgust}, {"neutral", Emotion::Neutral},
  };
  for (const auto& a : kAliases)
    if (a.name == k) return a.e;
  return std::nullopt;
}

namespace detail {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail
}  // namespace persona

#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "persona/emotion.hpp"
#include "persona/personality.hpp"

namespace persona {

enum class ComfortLabel { Comfortable, Uncomfortable };

inline constexpr std::array<ComfortLabel, 2> kAllComfortLabels = {ComfortLabel::Comfortable,
                                                                  ComfortLabel::Uncomfortable};

std::string_view to_string(ComfortLabel c);
std::optional<ComfortLabel> parse_comfort_label(std::string_view s);

struct EmotionRequest {
  std::string text;
  Emotion user_emotion = Emotion::Neutral;
  ComfortLabel comfort = ComfortLabel::Comfortable;
};

// (pole, user emotion, comfort) -> robot emotion, total over its domain.
//
// File rows: `<pole> <user_emotion> <comfortable|uncomfortable> <robot_emotion>`.
// Loading checks that all 6 x 7 x 2 cells appear exactly once.
class RulePolicyTable {
 public:
  // The shipped table.
  RulePolicyTable();
  static RulePolicyTable load(const std::filesystem::path& path);
  static RulePolicyTable parse(std::string_view text);

  Emotion lookup(TraitPole pole, Emotion user, ComfortLabel comfort) const {
    return cells_[index(pole)][index(user)][comfort == ComfortLabel::Comfortable ? 0 : 1];
  }

  std::string to_text() const;

 private:
  std::array<std::array<std::array<Emotion, 2>, kEmotionCount>, 6> cells_{};
};

Emotion generate_emotion_rule(TraitPole pole, Emotion user_emotion, ComfortLabel comfort,
                              const RulePolicyTable& table = RulePolicyTable{});

struct GeneratedEmotion {
  Emotion emotion;
  TraitPole pole;
};

// Samples the pole that reacts (weighted by personality and perceived-emotion
// sensitivity), then looks up that pole's rule. Throws NoActivePole.
GeneratedEmotion generate_emotion(const PersonalityVector& p, const EmotionRequest& req, Rng& rng,
                                  const RulePolicyTable& table = RulePolicyTable{},
                                  const SensitivityTable& sensitivity = SensitivityTable{});

// The NoEI ablation: ignores comfort and trait knowledge; mirrors Happiness
// and otherwise answers Neutral.
Emotion baseline_generate(const PersonalityVector& p, const EmotionRequest& req);

// ---------------------------------------------------------------- harness

struct EmotionPolicy {
  std::string name;
  std::function<Emotion(const EmotionRequest&)> generate;
};

// Robot-emotion counts per (condition, user emotion, comfort).
class ConditionMatrix {
 public:
  using Key = std::tuple<std::string, Emotion, ComfortLabel>;
  using Counts = std::array<int, kEmotionCount>;

  void add(const std::string& condition, Emotion user, ComfortLabel comfort, Emotion robot);

  const std::map<Key, Counts>& cells() const { return cells_; }
  Counts counts(const std::string& condition, Emotion user, ComfortLabel comfort) const;
  // Most frequent robot emotion in the cell (ties -> canonical order).
  Emotion modal(const std::string& condition, Emotion user, std::optional<ComfortLabel> comfort) const;
  // Share of all responses under `condition` that equal `e`.
  double share(const std::string& condition, Emotion e) const;
  double mean_valence(const std::string& condition, ComfortLabel comfort) const;
  std::vector<std::string> conditions() const;

  // `condition,user_emotion,comfort,robot_emotion,count`, zero counts omitted.
  std::string to_csv() const;

 private:
  std::map<Key, Counts> cells_;
};

// Runs every policy over every input. Throws InsufficientCoverage unless the
// inputs hit each of the 6 Ekman emotions under both comfort labels.
ConditionMatrix evaluate_conditions(const std::vector<EmotionPolicy>& policies,
                                    const std::vector<EmotionRequest>& inputs);

// Synthetic protocol inputs: for each Ekman emotion, `per_label` sentences
// marked Comfortable followed by `per_label` marked Uncomfortable.
std::vector<EmotionRequest> protocol_inputs(int per_label = 20);

// ---------------------------------------------------------------- backend seam

// Natural-language description of the emotionally intelligent behaviour of a
// pole, used as the system prompt for a generative backend.
std::string ei_description(TraitPole pole);

struct EmotionPrompt {
  std::string system;
  std::string text;
  Emotion user_emotion;
  ComfortLabel comfort;
};

class EmotionBackend {
 public:
  virtual ~EmotionBackend() = default;
  virtual std::string complete(const EmotionPrompt& prompt) = 0;
};

// Parses a backend reply into one of the seven labels. Accepts a bare label
// with optional surrounding whitespace and punctuation; throws BackendProtocol
// otherwise.
Emotion parse_emotion_response(std::string_view reply);

// Asks the backend first and falls back to the rule table when the reply is
// not a valid label.
class AdapterEmotionGenerator {
 public:
  AdapterEmotionGenerator(EmotionBackend& backend, RulePolicyTable table = RulePolicyTable{})
      : backend_(backend), table_(std::move(table)) {}

  Emotion generate(TraitPole pole, const EmotionRequest& req);
  int fallbacks() const { return fallbacks_; }

 private:
  EmotionBackend& backend_;
  RulePolicyTable table_;
  int fallbacks_ = 0;
};

}  // namespace persona

#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "persona/action.hpp"
#include "persona/emotion.hpp"
#include "persona/perception.hpp"
#include "persona/personality.hpp"

namespace persona {

struct Fact {
  std::string subject;
  std::string predicate;
  std::string object;

  friend auto operator<=>(const Fact&, const Fact&) = default;
};

// Throws ValidationError if any component is empty or contains whitespace.
Fact make_fact(std::string subject, std::string predicate, std::string object);

// "(user likes music)"
std::string to_string(const Fact& f);

// Each unset component is a wildcard.
struct FactPattern {
  std::optional<std::string> subject;
  std::optional<std::string> predicate;
  std::optional<std::string> object;

  bool matches(const Fact& f) const;
  // Builds a pattern from three tokens where "?" or "_" is a wildcard.
  static FactPattern from_tokens(std::string_view s, std::string_view p, std::string_view o);
};

using FactSet = std::set<Fact>;

// Flat triple store.
class SemanticMemory {
 public:
  // Seed file: one `subject predicate object` triple per line, '#' comments.
  static SemanticMemory load(const std::filesystem::path& path);
  static SemanticMemory parse(std::string_view text);

  void assert_fact(const Fact& f) { facts_.insert(f); }
  void retract_fact(const Fact& f) { facts_.erase(f); }
  bool contains(const Fact& f) const { return facts_.count(f) != 0; }
  // Matches in lexicographic order.
  std::vector<Fact> query(const FactPattern& pattern) const;

  const FactSet& facts() const { return facts_; }
  std::size_t size() const { return facts_.size(); }

 private:
  FactSet facts_;
};

struct OutcomeObservation {
  Emotion user_emotion = Emotion::Neutral;
  bool gaze_mutual = true;

  friend bool operator==(const OutcomeObservation&, const OutcomeObservation&) = default;
};

struct EpisodeRecord {
  std::vector<TraitPole> poles;
  ActionKind action_kind = ActionKind::StaySilent;
  OutcomeObservation predicted;
  OutcomeObservation actual;
  TimestampMs t = 0;
  bool match = false;
};

// Fills in `match` from the outcomes.
EpisodeRecord make_episode(std::vector<TraitPole> poles, ActionKind kind, OutcomeObservation predicted,
                           OutcomeObservation actual, TimestampMs t);

struct EpisodicParams {
  double beta = 0.2;    // reinforcement scale
  double delta = 0.05;  // prediction-error comfort step
};

// Append-only, session-scoped log of action -> outcome episodes.
class EpisodicMemory {
 public:
  explicit EpisodicMemory(EpisodicParams params = {}) : params_(params) {}

  void record_episode(EpisodeRecord r);
  std::size_t count() const { return episodes_.size(); }
  const std::vector<EpisodeRecord>& episodes() const { return episodes_; }
  const EpisodicParams& params() const { return params_; }

  // beta * (matches - mismatches) / (total + 1) over episodes of this kind
  // that share at least one pole with `poles`; 0 with no such episodes.
  double reinforcement_bonus(ActionKind kind, const std::vector<TraitPole>& poles) const;

 private:
  EpisodicParams params_;
  std::vector<EpisodeRecord> episodes_;
};

// +delta when emotion and gaze both match, +delta/2 when exactly one does,
// -delta when neither does.
double prediction_error(const OutcomeObservation& predicted, const OutcomeObservation& actual,
                        double delta = 0.05);

}  // namespace persona

#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "persona/behavior.hpp"
#include "persona/emotion_engine.hpp"
#include "persona/memory.hpp"
#include "persona/perception.hpp"
#include "persona/personality.hpp"
#include "persona/prospection.hpp"
#include "persona/telemetry.hpp"

namespace persona {

// Data files compiled into the library (copies of data/*).
std::string_view shipped_domain_text();
std::string_view shipped_lexicon_text();
std::string_view shipped_facts_text();

struct SessionConfig {
  PersonalityVector personality;
  std::uint64_t seed = 0;
  int horizon = 3;
  DurationMs session_duration = 300'000;
  DurationMs silence_timeout = 8'000;
  // Empty paths select the shipped defaults.
  std::filesystem::path domain_path;
  std::filesystem::path behavior_path;
  std::filesystem::path rules_path;
  std::filesystem::path sensitivity_path;
  std::filesystem::path dynamics_path;
  std::filesystem::path lexicon_path;
  std::filesystem::path facts_path;

  // Throws ConfigError when horizon < 1 or duration <= 0.
  void validate() const;

  // `key = value` lines (or `key value`), '#' comments. Keys: wc we wa seed
  // horizon session_duration_ms silence_timeout_ms domain behavior_table
  // emotion_rules sensitivity dynamics lexicon facts. Relative paths resolve
  // against the config file's directory. Throws ConfigError.
  static SessionConfig load(const std::filesystem::path& path);
  static SessionConfig parse(std::string_view text, const std::filesystem::path& base_dir = {});
};

// Everything a session reads but never writes; shared between sessions.
struct AgentResources {
  DomainSpec domain;
  BehaviorTable behavior;
  RulePolicyTable rules;
  SensitivityTable sensitivity;
  Dynamics dynamics;
  LexiconSentiment lexicon;
  SemanticMemory facts;

  // Throws ConfigError naming the file that failed and why.
  static std::shared_ptr<const AgentResources> load(const SessionConfig& cfg);
};

// The six inputs of a sentence-generation request.
struct GenerationRequest {
  std::string human_sentence;
  Emotion human_emotion = Emotion::Neutral;
  std::string robot_personality;
  std::vector<std::string> language_style;
  ActionKind action = ActionKind::StaySilent;
  Emotion robot_emotion = Emotion::Neutral;

  friend bool operator==(const GenerationRequest&, const GenerationRequest&) = default;

  // "Human sentence: ..., Human emotion: Happy, Robot personality: ..., ..."
  std::string to_prompt() const;
};

GenerationRequest build_generation_request(std::string_view human_sentence, Emotion human_emotion,
                                           const PersonalityVector& personality,
                                           const std::vector<std::string>& language_style, ActionKind action,
                                           Emotion robot_emotion);

// Rebuilds the request stored in a RobotTurn telemetry record.
GenerationRequest request_from_record(const TelemetryRecord& r);

// Renders the robot's sentence for a request.
class TextBackend {
 public:
  virtual ~TextBackend() = default;
  virtual std::string render(const GenerationRequest& req, const AbstractAction& action) = 0;
};

// Deterministic templates keyed by action kind and a style bucket picked from
// the descriptors (agreeableness first, then extraversion, then
// conscientiousness).
class TemplateRenderer final : public TextBackend {
 public:
  std::string render(const GenerationRequest& req, const AbstractAction& action) override;
};

struct RobotTurn {
  TimestampMs t = 0;
  AbstractAction action;
  Emotion robot_emotion = Emotion::Neutral;
  std::optional<TraitPole> sampled_pole;  // empty for the neutral personality
  BehavioralParameters params;
  GenerationRequest request;
  std::string text;
  bool proactive = false;
  ComfortabilityState comfort;  // at emission
};

// One dyadic conversation. Not thread-safe: the owner serializes calls.
class Session {
 public:
  Session(SessionConfig cfg, std::shared_ptr<const AgentResources> resources,
          std::unique_ptr<TelemetrySink> sink);
  ~Session();
  Session(Session&&) noexcept;
  Session& operator=(Session&&) noexcept;

  // One user turn. If the snapshot has no text emotion and the text is not
  // blank, the session's sentiment adapter fills it in. Throws SessionClosed.
  RobotTurn step(std::string_view user_text, const PerceptSnapshot& percept);

  // Motivational turn after a silence longer than silence_timeout while some
  // active fluent sits below theta + margin. Throws SessionClosed.
  std::optional<RobotTurn> proactive_tick(TimestampMs now);

  PerceptionBuffers& perception();
  const WorldState& world() const;
  std::vector<PlanStep> current_plan() const;
  const EpisodicMemory& episodes() const;
  const SemanticMemory& semantic() const;
  const SessionConfig& config() const;
  const AgentResources& resources() const;

  void set_text_backend(std::shared_ptr<TextBackend> backend);
  void set_sentiment(SentimentAdapter adapter);
  // Called after every comfort change with the time and the new state.
  void on_comfort(std::function<void(TimestampMs, const ComfortabilityState&)> cb);

  void close();
  bool closed() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Loads resources and opens a session; the initial plan is computed here.
Session start_session(const SessionConfig& cfg, std::unique_ptr<TelemetrySink> sink);

// Scripted percept events, one per line:
//   <t_ms> FACE <emotion>
//   <t_ms> GAZE <mutual|averted>
//   <t_ms> SAY <text...>
struct ScriptEvent {
  enum class Kind { Face, Gaze, Say } kind;
  TimestampMs t = 0;
  Emotion emotion = Emotion::Neutral;
  bool mutual = true;
  std::string text;
};

// Throws ScriptError(line) for malformed lines or decreasing timestamps.
std::vector<ScriptEvent> parse_script(std::string_view text);
std::vector<ScriptEvent> load_script(const std::filesystem::path& path);
std::string format_script(const std::vector<ScriptEvent>& events);

// Dispatcher tick period for emotion extraction during silence.
inline constexpr DurationMs kTickMs = 1000;

// Drives a session through the events, ticking the dispatcher every second,
// until session_duration. Events after the end are ignored.
void run_events(Session& session, const std::vector<ScriptEvent>& events);

// "HE-LA", or "neutral".
std::string personality_tag(const PersonalityVector& p);

// Runs the script and writes <out_dir>/session_<tag>_s<seed>.jsonl; returns
// that path.
std::filesystem::path run_scripted(const SessionConfig& cfg, const std::filesystem::path& script,
                                   const std::filesystem::path& out_dir);

// The twelve pairings of extreme poles on two of the three axes.
std::vector<PersonalityVector> study_personalities();

}  // namespace persona

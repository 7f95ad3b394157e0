#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace persona {

enum class ActionKind {
  AskQuestion,
  MakeAffirmation,
  TellJoke,
  ChangeTopic,
  AttractAttention,
  Greet,
  Farewell,
  StaySilent,
};

inline constexpr std::size_t kActionKindCount = 8;

inline constexpr std::array<ActionKind, kActionKindCount> kAllActionKinds = {
    ActionKind::AskQuestion, ActionKind::MakeAffirmation,  ActionKind::TellJoke,
    ActionKind::ChangeTopic, ActionKind::AttractAttention, ActionKind::Greet,
    ActionKind::Farewell,    ActionKind::StaySilent};

constexpr std::size_t index(ActionKind k) { return static_cast<std::size_t>(k); }

// CamelCase identifier, as written in domain files and telemetry.
std::string_view to_string(ActionKind k);
// Case-insensitive; also accepts snake_case ("ask_question").
std::optional<ActionKind> parse_action_kind(std::string_view s);
// "Make an affirmation"
std::string_view action_phrase(ActionKind k);

struct AbstractAction {
  std::string id;
  ActionKind kind = ActionKind::StaySilent;
  std::optional<std::string> payload_topic;

  friend bool operator==(const AbstractAction&, const AbstractAction&) = default;
};

}  // namespace persona

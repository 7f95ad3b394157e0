#include "persona/action.hpp"

#include "text_util.hpp"

namespace persona {

std::string_view to_string(ActionKind k) {
  static constexpr std::string_view kNames[] = {"AskQuestion", "MakeAffirmation",  "TellJoke",
                                                "ChangeTopic", "AttractAttention", "Greet",
                                                "Farewell",    "StaySilent"};
  return kNames[index(k)];
}

std::optional<ActionKind> parse_action_kind(std::string_view s) {
  std::string k;
  for (char c : detail::trim(s))
    if (c != '_' && c != '-') k.push_back(c);
  k = detail::lower(k);
  for (auto kind : kAllActionKinds)
    if (detail::lower(to_string(kind)) == k) return kind;
  return std::nullopt;
}

std::string_view action_phrase(ActionKind k) {
  static constexpr std::string_view kPhrases[] = {
      "Ask a question",     "Make an affirmation", "Tell a joke", "Change topic",
      "Attract attention", "Greet",                "Say goodbye", "Stay silent"};
  return kPhrases[index(k)];
}

}  // namespace persona

#include "persona/memory.hpp"

#include <algorithm>
#include <cctype>

#include "persona/errors.hpp"
#include "text_util.hpp"

namespace persona {

namespace {

bool valid_symbol(const std::string& s) {
  return !s.empty() && std::none_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

Fact make_fact(std::string subject, std::string predicate, std::string object) {
  if (!valid_symbol(subject) || !valid_symbol(predicate) || !valid_symbol(object))
    throw ValidationError("fact components must be non-empty symbols");
  return Fact{std::move(subject), std::move(predicate), std::move(object)};
}

std::string to_string(const Fact& f) {
  return "(" + f.subject + " " + f.predicate + " " + f.object + ")";
}

bool FactPattern::matches(const Fact& f) const {
  return (!subject || *subject == f.subject) && (!predicate || *predicate == f.predicate) &&
         (!object || *object == f.object);
}

FactPattern FactPattern::from_tokens(std::string_view s, std::string_view p, std::string_view o) {
  auto slot = [](std::string_view t) -> std::optional<std::string> {
    if (t == "?" || t == "_" || t.empty()) return std::nullopt;
    return std::string(t);
  };
  return FactPattern{slot(s), slot(p), slot(o)};
}

SemanticMemory SemanticMemory::parse(std::string_view text) {
  SemanticMemory m;
  int lineno = 0;
  for (auto raw : detail::split_lines(text)) {
    ++lineno;
    auto tok = detail::split_ws(detail::strip_comment(raw));
    if (tok.empty()) continue;
    if (tok.size() != 3) throw SyntaxError(lineno, 1, "expected 'subject predicate object'");
    m.assert_fact(make_fact(std::string(tok[0]), std::string(tok[1]), std::string(tok[2])));
  }
  return m;
}

SemanticMemory SemanticMemory::load(const std::filesystem::path& path) {
  return parse(detail::read_file(path.string()));
}

std::vector<Fact> SemanticMemory::query(const FactPattern& pattern) const {
  std::vector<Fact> out;
  for (const auto& f : facts_)
    if (pattern.matches(f)) out.push_back(f);
  return out;
}

EpisodeRecord make_episode(std::vector<TraitPole> poles, ActionKind kind, OutcomeObservation predicted,
                           OutcomeObservation actual, TimestampMs t) {
  EpisodeRecord r{std::move(poles), kind, predicted, actual, t, false};
  r.match = predicted.user_emotion == actual.user_emotion;
  return r;
}

void EpisodicMemory::record_episode(EpisodeRecord r) {
  r.match = r.predicted.user_emotion == r.actual.user_emotion;
  episodes_.push_back(std::move(r));
}

double EpisodicMemory::reinforcement_bonus(ActionKind kind, const std::vector<TraitPole>& poles) const {
  int matches = 0;
  int total = 0;
  for (const auto& e : episodes_) {
    if (e.action_kind != kind) continue;
    const bool overlap = std::any_of(e.poles.begin(), e.poles.end(), [&](TraitPole p) {
      return std::find(poles.begin(), poles.end(), p) != poles.end();
    });
    if (!overlap) continue;
    ++total;
    if (e.match) ++matches;
  }
  if (total == 0) return 0.0;
  const int mismatches = total - matches;
  return params_.beta * static_cast<double>(matches - mismatches) / static_cast<double>(total + 1);
}

double prediction_error(const OutcomeObservation& predicted, const OutcomeObservation& actual,
                        double delta) {
  const int hits = (predicted.user_emotion == actual.user_emotion ? 1 : 0) +
                   (predicted.gaze_mutual == actual.gaze_mutual ? 1 : 0);
  switch (hits) {
    case 2: return delta;
    case 1: return delta / 2.0;
    default: return -delta;
  }
}

}  // namespace persona

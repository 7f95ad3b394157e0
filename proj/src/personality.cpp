#include "persona/personality.hpp"

#include <cmath>
#include <sstream>

#include "persona/errors.hpp"
#include "text_util.hpp"

namespace persona {

std::string_view to_string(TraitPole p) {
  static constexpr std::string_view kNames[] = {"HC", "LC", "HE", "LE", "HA", "LA"};
  return kNames[index(p)];
}

std::optional<TraitPole> parse_pole(std::string_view s) {
  const std::string k = detail::lower(detail::trim(s));
  for (auto p : kAllPoles)
    if (detail::lower(to_string(p)) == k) return p;
  return std::nullopt;
}

std::string_view to_string(TraitAxis a) {
  switch (a) {
    case TraitAxis::Conscientiousness: return "C";
    case TraitAxis::Extraversion: return "E";
    case TraitAxis::Agreeableness: return "A";
  }
  return "C";
}

std::optional<TraitAxis> parse_axis(std::string_view s) {
  const std::string k = detail::lower(detail::trim(s));
  if (k == "c" || k == "conscientiousness") return TraitAxis::Conscientiousness;
  if (k == "e" || k == "extraversion" || k == "extroversion") return TraitAxis::Extraversion;
  if (k == "a" || k == "agreeableness") return TraitAxis::Agreeableness;
  return std::nullopt;
}

std::string_view display_name(TraitPole p) {
  static constexpr std::string_view kNames[] = {"Conscientious", "Unscrupulous", "Extravert",
                                                "Introvert",     "Agreeable",    "Disagreeable"};
  return kNames[index(p)];
}

std::optional<TraitPole> PersonalityVector::pole(TraitAxis a) const {
  const double w = weight(a);
  if (w == 0.0) return std::nullopt;
  return TraitPole{a, w > 0 ? Polarity::High : Polarity::Low};
}

bool PersonalityVector::is_active(TraitPole p) const {
  auto active = pole(p.axis);
  return active && *active == p;
}

PersonalityVector make_personality(double wc, double we, double wa) {
  const double w[3] = {wc, we, wa};
  for (int i = 0; i < 3; ++i) {
    if (!std::isfinite(w[i]) || std::fabs(w[i]) > 1.0) {
      std::ostringstream msg;
      msg << "personality weight " << to_string(kAllAxes[i]) << "=" << w[i] << " outside [-1, 1]";
      throw OutOfRange(msg.str());
    }
  }
  PersonalityVector p;
  // Normalize -0.0 so equality and printing behave.
  for (int i = 0; i < 3; ++i) p.w_[i] = w[i] == 0.0 ? 0.0 : w[i];
  return p;
}

std::vector<TraitPole> active_poles(const PersonalityVector& p) {
  std::vector<TraitPole> out;
  for (auto a : kAllAxes)
    if (auto pole = p.pole(a)) out.push_back(*pole);
  return out;
}

std::string personality_description(const PersonalityVector& p, std::string_view sep) {
  std::string out;
  for (auto a : {TraitAxis::Extraversion, TraitAxis::Agreeableness, TraitAxis::Conscientiousness}) {
    if (auto pole = p.pole(a)) {
      if (!out.empty()) out += sep;
      out += display_name(*pole);
    }
  }
  return out.empty() ? std::string("Neutral") : out;
}

SensitivityTable::SensitivityTable() {
  for (auto e : kAllEmotions) {
    set(TraitAxis::Agreeableness, e, 0.40);
    set(TraitAxis::Extraversion, e, 0.35);
    set(TraitAxis::Conscientiousness, e, 0.25);
  }
  set(TraitAxis::Agreeableness, Emotion::Anger, 0.50);
}

void SensitivityTable::set(TraitAxis axis, Emotion perceived, double value) {
  if (!(value > 0.0)) throw ValidationError("sensitivity must be positive");
  table_[index(perceived)][index(axis)] = value;
}

SensitivityTable SensitivityTable::parse(std::string_view text) {
  SensitivityTable t;
  std::vector<std::pair<int, std::vector<std::string_view>>> overrides;
  int lineno = 0;
  for (auto raw : detail::split_lines(text)) {
    ++lineno;
    auto tok = detail::split_ws(detail::strip_comment(raw));
    if (tok.empty()) continue;
    // Bases are applied first so overrides never get clobbered by a later base.
    if (tok[0] == "base" && tok.size() == 3) {
      auto axis = parse_axis(tok[1]);
      auto v = detail::parse_double(tok[2]);
      if (!axis || !v || !(*v > 0.0)) throw SyntaxError(lineno, 1, "bad base row");
      for (auto e : kAllEmotions) t.set(*axis, e, *v);
    } else if (tok[0] == "override" && tok.size() == 4) {
      overrides.emplace_back(lineno, tok);
    } else {
      throw SyntaxError(lineno, 1, "expected 'base <axis> <v>' or 'override <emotion> <axis> <v>'");
    }
  }
  for (const auto& [ln, tok] : overrides) {
    auto e = parse_emotion(tok[1]);
    auto axis = parse_axis(tok[2]);
    auto v = detail::parse_double(tok[3]);
    if (!e || !axis || !v || !(*v > 0.0)) throw SyntaxError(ln, 1, "bad override row");
    t.set(*axis, *e, *v);
  }
  return t;
}

SensitivityTable SensitivityTable::load(const std::filesystem::path& path) {
  return parse(detail::read_file(path.string()));
}

std::vector<PoleWeight> trait_selection_weights(const PersonalityVector& p, Emotion perceived,
                                                const SensitivityTable& table) {
  std::vector<PoleWeight> out;
  double total = 0.0;
  for (auto pole : active_poles(p)) {
    const double w = std::fabs(p.weight(pole.axis)) * table.sensitivity(pole.axis, perceived);
    out.push_back({pole, w});
    total += w;
  }
  if (out.empty()) throw NoActivePole();
  for (auto& pw : out) pw.weight /= total;
  return out;
}

TraitPole sample_trait_pole(const std::vector<PoleWeight>& weights, Rng& rng) {
  if (weights.empty()) throw NoActivePole();
  const double u = uniform01(rng);
  double acc = 0.0;
  for (const auto& pw : weights) {
    acc += pw.weight;
    if (u < acc) return pw.pole;
  }
  // u landed in the rounding gap above the last cumulative sum.
  for (auto it = weights.rbegin(); it != weights.rend(); ++it)
    if (it->weight > 0.0) return it->pole;
  return weights.back().pole;
}

}  // namespace persona

#include "persona/behavior.hpp"

#include <algorithm>
#include <array>
#include <bitset>

#include "persona/errors.hpp"
#include "text_util.hpp"

namespace persona {

std::string_view to_string(GazeMode v) { return v == GazeMode::Mutual ? "mutual" : "avoidant"; }

std::string_view to_string(Level v) {
  switch (v) {
    case Level::Low: return "low";
    case Level::Middle: return "middle";
    case Level::High: return "high";
  }
  return "middle";
}

std::string_view to_string(Volume v) {
  switch (v) {
    case Volume::Low: return "low";
    case Volume::Middle: return "middle";
    case Volume::High: return "high";
    case Volume::Dynamic: return "dynamic";
  }
  return "middle";
}

std::string_view to_string(HeadMovement v) {
  switch (v) {
    case HeadMovement::Still: return "still";
    case HeadMovement::Nodding: return "nodding";
    case HeadMovement::Shaking: return "shaking";
    case HeadMovement::LittleShaking: return "little_shaking";
  }
  return "still";
}

const std::vector<std::string>& style_descriptors(TraitPole pole) {
  static const std::array<std::vector<std::string>, 6> kStyles = {{
      {"scrupulous", "precise"},
      {"thoughtless", "distracted", "lazy", "disorganized"},
      {"friendly", "talkative", "enthusiastic"},
      {"reserved", "quiet", "neutral"},
      {"cooperative", "friendly", "empathic", "forgiving", "reliable", "polite"},
      {"competitive", "aggressive", "provocative", "selfish", "rude"},
  }};
  return kStyles[index(pole)];
}

std::vector<std::string> language_style(const PersonalityVector& p) {
  std::vector<std::string> out;
  for (auto pole : active_poles(p))
    for (const auto& d : style_descriptors(pole))
      if (std::find(out.begin(), out.end(), d) == out.end()) out.push_back(d);
  if (out.empty()) out.push_back("neutral");
  return out;
}

std::string join_style(const std::vector<std::string>& descriptors) {
  std::string out;
  for (const auto& d : descriptors) {
    if (!out.empty()) out += ", ";
    out += d;
  }
  return out;
}

namespace {

using Row = BehaviorTable::Row;

constexpr std::array<Row, 6> kDefaultRows = {{
    // HC
    {GazeMode::Mutual, Level::Middle, Volume::Middle, Level::Low, Level::Middle, HeadMovement::Still},
    // LC
    {GazeMode::Avoidant, Level::Middle, Volume::Low, Level::High, Level::Low, HeadMovement::Shaking},
    // HE
    {GazeMode::Mutual, Level::High, Volume::Dynamic, Level::High, Level::High, HeadMovement::Shaking},
    // LE
    {GazeMode::Avoidant, Level::Low, Volume::Low, Level::Middle, Level::Middle,
     HeadMovement::LittleShaking},
    // HA
    {GazeMode::Mutual, Level::Middle, Volume::Dynamic, Level::Middle, Level::Low, HeadMovement::Nodding},
    // LA
    {GazeMode::Avoidant, Level::Middle, Volume::Dynamic, Level::High, Level::Middle,
     HeadMovement::LittleShaking},
}};

std::optional<Level> parse_level(std::string_view s) {
  const auto k = detail::lower(s);
  if (k == "low") return Level::Low;
  if (k == "middle") return Level::Middle;
  if (k == "high") return Level::High;
  return std::nullopt;
}

std::optional<Volume> parse_volume(std::string_view s) {
  const auto k = detail::lower(s);
  if (k == "dynamic") return Volume::Dynamic;
  if (auto l = parse_level(k)) {
    switch (*l) {
      case Level::Low: return Volume::Low;
      case Level::Middle: return Volume::Middle;
      case Level::High: return Volume::High;
    }
  }
  return std::nullopt;
}

std::optional<GazeMode> parse_gaze(std::string_view s) {
  const auto k = detail::lower(s);
  if (k == "mutual") return GazeMode::Mutual;
  if (k == "avoidant" || k == "avoid") return GazeMode::Avoidant;
  return std::nullopt;
}

std::optional<HeadMovement> parse_head(std::string_view s) {
  const auto k = detail::lower(s);
  if (k == "still") return HeadMovement::Still;
  if (k == "nodding") return HeadMovement::Nodding;
  if (k == "shaking") return HeadMovement::Shaking;
  if (k == "little_shaking" || k == "littleshaking") return HeadMovement::LittleShaking;
  return std::nullopt;
}

enum Param { kGaze, kGesture, kVolume, kRate, kPitch, kHead, kParamCount };

std::optional<Param> parse_param(std::string_view s) {
  const auto k = detail::lower(s);
  if (k == "gaze") return kGaze;
  if (k == "gesture" || k == "gesture_amplitude") return kGesture;
  if (k == "volume") return kVolume;
  if (k == "rate" || k == "speech_rate") return kRate;
  if (k == "pitch") return kPitch;
  if (k == "head" || k == "head_movement") return kHead;
  return std::nullopt;
}

}  // namespace

BehaviorTable::BehaviorTable() : rows_(kDefaultRows) {}

BehaviorTable BehaviorTable::parse(std::string_view text) {
  BehaviorTable t;
  std::array<std::bitset<kParamCount>, 6> seen{};
  int lineno = 0;
  for (auto raw : detail::split_lines(text)) {
    ++lineno;
    auto tok = detail::split_ws(detail::strip_comment(raw));
    if (tok.empty()) continue;
    auto col = [&](std::size_t i) { return static_cast<int>(tok[i].data() - raw.data()) + 1; };
    if (tok.size() != 3) throw SyntaxError(lineno, 1, "expected '<pole> <parameter> <value>'");
    auto pole = parse_pole(tok[0]);
    if (!pole) throw SyntaxError(lineno, col(0), "unknown pole '" + std::string(tok[0]) + "'");
    auto param = parse_param(tok[1]);
    if (!param) throw SyntaxError(lineno, col(1), "unknown parameter '" + std::string(tok[1]) + "'");
    Row& r = t.rows_[index(*pole)];
    bool ok = false;
    switch (*param) {
      case kGaze:
        if (auto v = parse_gaze(tok[2])) r.gaze = *v, ok = true;
        break;
      case kGesture:
        if (auto v = parse_level(tok[2])) r.gesture = *v, ok = true;
        break;
      case kVolume:
        if (auto v = parse_volume(tok[2])) r.volume = *v, ok = true;
        break;
      case kRate:
        if (auto v = parse_level(tok[2])) r.rate = *v, ok = true;
        break;
      case kPitch:
        if (auto v = parse_level(tok[2])) r.pitch = *v, ok = true;
        break;
      case kHead:
        if (auto v = parse_head(tok[2])) r.head = *v, ok = true;
        break;
      default:
        break;
    }
    if (!ok) throw SyntaxError(lineno, col(2), "bad value '" + std::string(tok[2]) + "'");
    if (seen[index(*pole)].test(*param))
      throw SyntaxError(lineno, col(1), "duplicate entry for " + std::string(tok[0]) + " " + std::string(tok[1]));
    seen[index(*pole)].set(*param);
  }
  for (auto pole : kAllPoles)
    if (!seen[index(pole)].all())
      throw ValidationError("behavior table: pole " + std::string(to_string(pole)) +
                            " does not define every parameter");
  return t;
}

BehaviorTable BehaviorTable::load(const std::filesystem::path& path) {
  return parse(detail::read_file(path.string()));
}

BehavioralParameters map_parameters(const PersonalityVector& p, const AbstractAction& /*a*/,
                                    const BehaviorTable& table) {
  // Precedence order A > E > C.
  std::vector<const Row*> rows;
  for (auto axis : {TraitAxis::Agreeableness, TraitAxis::Extraversion, TraitAxis::Conscientiousness})
    if (auto pole = p.pole(axis)) rows.push_back(&table.row(*pole));

  BehavioralParameters out;
  out.language_style = language_style(p);
  if (rows.empty()) return out;

  out.gaze_mode = rows.front()->gaze;
  out.head_movement = rows.front()->head;
  auto pick_level = [&](Level Row::*field) {
    for (const Row* r : rows)
      if (r->*field != Level::Middle) return r->*field;
    return Level::Middle;
  };
  out.gesture_amplitude = pick_level(&Row::gesture);
  out.speech_rate = pick_level(&Row::rate);
  out.pitch = pick_level(&Row::pitch);
  out.volume = Volume::Middle;
  for (const Row* r : rows) {
    if (r->volume != Volume::Middle) {
      out.volume = r->volume;
      break;
    }
  }
  return out;
}

}  // namespace persona

#include "persona/emotion_engine.hpp"

#include <bitset>
#include <sstream>

#include "persona/errors.hpp"
#include "text_util.hpp"

namespace persona {

std::string_view to_string(ComfortLabel c) {
  return c == ComfortLabel::Comfortable ? "comfortable" : "uncomfortable";
}

std::optional<ComfortLabel> parse_comfort_label(std::string_view s) {
  const auto k = detail::lower(detail::trim(s));
  if (k == "comfortable") return ComfortLabel::Comfortable;
  if (k == "uncomfortable") return ComfortLabel::Uncomfortable;
  return std::nullopt;
}

namespace {

constexpr Emotion H = Emotion::Happiness;
constexpr Emotion S = Emotion::Sadness;
constexpr Emotion A = Emotion::Anger;
constexpr Emotion F = Emotion::Fear;
constexpr Emotion U = Emotion::Surprise;
constexpr Emotion D = Emotion::Disgust;
constexpr Emotion N = Emotion::Neutral;

// [pole][user emotion] = {comfortable, uncomfortable}; user emotions in
// canonical order: happiness sadness anger fear surprise disgust neutral.
using PoleRows = std::array<std::array<Emotion, 2>, kEmotionCount>;
constexpr std::array<PoleRows, 6> kDefaultRules = {{
    // HC: neutral, except shared happiness while comfortable
    {{{H, N}, {N, N}, {N, N}, {N, N}, {N, N}, {N, N}, {N, N}}},
    // LC: surprise-prone; discomfort moves one valence step down
    {{{U, N}, {S, S}, {D, D}, {U, N}, {U, N}, {D, D}, {U, N}}},
    // HE: mirrors positives, meets negatives with surprise
    {{{H, H}, {U, S}, {U, U}, {U, U}, {U, U}, {U, D}, {H, N}}},
    // LE: mostly neutral
    {{{N, N}, {S, S}, {N, F}, {N, N}, {N, N}, {N, N}, {N, N}}},
    // HA: empathic
    {{{H, H}, {S, S}, {F, F}, {S, S}, {U, F}, {S, S}, {H, S}}},
    // LA: hostile
    {{{D, A}, {D, A}, {A, A}, {A, A}, {N, D}, {D, A}, {D, A}}},
}};

}  // namespace

RulePolicyTable::RulePolicyTable() : cells_(kDefaultRules) {}

RulePolicyTable RulePolicyTable::parse(std::string_view text) {
  RulePolicyTable t;
  std::bitset<6 * kEmotionCount * 2> seen;
  int lineno = 0;
  for (auto raw : detail::split_lines(text)) {
    ++lineno;
    auto tok = detail::split_ws(detail::strip_comment(raw));
    if (tok.empty()) continue;
    auto col = [&](std::size_t i) { return static_cast<int>(tok[i].data() - raw.data()) + 1; };
    if (tok.size() != 4)
      throw SyntaxError(lineno, 1, "expected '<pole> <user_emotion> <comfort> <robot_emotion>'");
    auto pole = parse_pole(tok[0]);
    if (!pole) throw SyntaxError(lineno, col(0), "unknown pole");
    auto user = parse_emotion(tok[1]);
    if (!user) throw SyntaxError(lineno, col(1), "unknown emotion");
    auto comfort = parse_comfort_label(tok[2]);
    if (!comfort) throw SyntaxError(lineno, col(2), "expected comfortable or uncomfortable");
    auto robot = parse_emotion(tok[3]);
    if (!robot) throw SyntaxError(lineno, col(3), "unknown emotion");
    const int c = *comfort == ComfortLabel::Comfortable ? 0 : 1;
    const std::size_t bit = (index(*pole) * kEmotionCount + index(*user)) * 2 + c;
    if (seen.test(bit)) throw SyntaxError(lineno, 1, "duplicate rule");
    seen.set(bit);
    t.cells_[index(*pole)][index(*user)][c] = *robot;
  }
  if (!seen.all())
    throw ValidationError("rule table is not total: " + std::to_string(seen.count()) + " of " +
                          std::to_string(seen.size()) + " cells defined");
  return t;
}

RulePolicyTable RulePolicyTable::load(const std::filesystem::path& path) {
  return parse(detail::read_file(path.string()));
}

std::string RulePolicyTable::to_text() const {
  std::ostringstream out;
  for (auto pole : kAllPoles)
    for (auto e : kAllEmotions)
      for (auto c : kAllComfortLabels)
        out << to_string(pole) << ' ' << to_string(e) << ' ' << to_string(c) << ' '
            << to_string(lookup(pole, e, c)) << '\n';
  return out.str();
}

Emotion generate_emotion_rule(TraitPole pole, Emotion user_emotion, ComfortLabel comfort,
                              const RulePolicyTable& table) {
  return table.lookup(pole, user_emotion, comfort);
}

GeneratedEmotion generate_emotion(const PersonalityVector& p, const EmotionRequest& req, Rng& rng,
                                  const RulePolicyTable& table, const SensitivityTable& sensitivity) {
  const TraitPole pole = sample_trait_pole(trait_selection_weights(p, req.user_emotion, sensitivity), rng);
  return {table.lookup(pole, req.user_emotion, req.comfort), pole};
}

Emotion baseline_generate(const PersonalityVector& /*p*/, const EmotionRequest& req) {
  return req.user_emotion == Emotion::Happiness ? Emotion::Happiness : Emotion::Neutral;
}

// ---------------------------------------------------------------- harness

void ConditionMatrix::add(const std::string& condition, Emotion user, ComfortLabel comfort, Emotion robot) {
  ++cells_[{condition, user, comfort}][index(robot)];
}

ConditionMatrix::Counts ConditionMatrix::counts(const std::string& condition, Emotion user,
                                                ComfortLabel comfort) const {
  auto it = cells_.find({condition, user, comfort});
  return it == cells_.end() ? Counts{} : it->second;
}

Emotion ConditionMatrix::modal(const std::string& condition, Emotion user,
                               std::optional<ComfortLabel> comfort) const {
  Counts total{};
  for (auto c : kAllComfortLabels) {
    if (comfort && *comfort != c) continue;
    const auto k = counts(condition, user, c);
    for (std::size_t i = 0; i < kEmotionCount; ++i) total[i] += k[i];
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < kEmotionCount; ++i)
    if (total[i] > total[best]) best = i;
  return kAllEmotions[best];
}

double ConditionMatrix::share(const std::string& condition, Emotion e) const {
  long hit = 0;
  long all = 0;
  for (const auto& [key, k] : cells_) {
    if (std::get<0>(key) != condition) continue;
    for (std::size_t i = 0; i < kEmotionCount; ++i) all += k[i];
    hit += k[index(e)];
  }
  return all == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(all);
}

double ConditionMatrix::mean_valence(const std::string& condition, ComfortLabel comfort) const {
  long sum = 0;
  long all = 0;
  for (const auto& [key, k] : cells_) {
    if (std::get<0>(key) != condition || std::get<2>(key) != comfort) continue;
    for (std::size_t i = 0; i < kEmotionCount; ++i) {
      all += k[i];
      sum += static_cast<long>(k[i]) * valence(kAllEmotions[i]);
    }
  }
  return all == 0 ? 0.0 : static_cast<double>(sum) / static_cast<double>(all);
}

std::vector<std::string> ConditionMatrix::conditions() const {
  std::vector<std::string> out;
  for (const auto& [key, k] : cells_)
    if (out.empty() || out.back() != std::get<0>(key)) out.push_back(std::get<0>(key));
  return out;
}

std::string ConditionMatrix::to_csv() const {
  std::ostringstream out;
  out << "condition,user_emotion,comfort,robot_emotion,count\n";
  for (const auto& [key, k] : cells_)
    for (std::size_t i = 0; i < kEmotionCount; ++i)
      if (k[i] > 0)
        out << std::get<0>(key) << ',' << to_string(std::get<1>(key)) << ',' << to_string(std::get<2>(key))
            << ',' << to_string(kAllEmotions[i]) << ',' << k[i] << '\n';
  return out.str();
}

ConditionMatrix evaluate_conditions(const std::vector<EmotionPolicy>& policies,
                                    const std::vector<EmotionRequest>& inputs) {
  std::bitset<kEmotionCount * 2> covered;
  for (const auto& in : inputs)
    covered.set(index(in.user_emotion) * 2 + (in.comfort == ComfortLabel::Comfortable ? 0 : 1));
  for (auto e : kEkmanEmotions)
    for (int c = 0; c < 2; ++c)
      if (!covered.test(index(e) * 2 + c))
        throw InsufficientCoverage("no input for user emotion " + std::string(to_string(e)) + " / " +
                                   std::string(to_string(kAllComfortLabels[c])));
  ConditionMatrix m;
  for (const auto& policy : policies)
    for (const auto& in : inputs) m.add(policy.name, in.user_emotion, in.comfort, policy.generate(in));
  return m;
}

std::vector<EmotionRequest> protocol_inputs(int per_label) {
  std::vector<EmotionRequest> out;
  for (auto e : kEkmanEmotions) {
    for (int i = 0; i < 2 * per_label; ++i) {
      EmotionRequest r;
      r.text = "synthetic " + std::string(to_string(e)) + " sentence " + std::to_string(i + 1);
      r.user_emotion = e;
      r.comfort = i < per_label ? ComfortLabel::Comfortable : ComfortLabel::Uncomfortable;
      out.push_back(std::move(r));
    }
  }
  return out;
}

// ---------------------------------------------------------------- backend seam

std::string ei_description(TraitPole pole) {
  static const std::array<std::string_view, 6> kText = {
      "You are careful and composed. You keep your feelings in check and rarely show strong "
      "emotion; you allow yourself quiet satisfaction when things go well.",
      "You are impulsive and easily distracted. Unexpected things catch your attention and you "
      "react with surprise, and you show sadness or distaste without filtering it.",
      "You are outgoing and energetic. You share the other person's good mood and meet bad news "
      "with lively, engaged surprise.",
      "You are reserved and quiet. You seldom show emotion and keep a calm, neutral face.",
      "You are warm and empathic. You share the other person's joy and sorrow, feel sad when "
      "they are afraid or disgusted, and worry when they are angry.",
      "You are cold and confrontational. Other people's happiness irritates you and hostility "
      "makes you angry; you favour provoking a reaction.",
  };
  return std::string(kText[index(pole)]) +
         " Reply with exactly one of: happiness, sadness, anger, fear, surprise, disgust, neutral.";
}

Emotion parse_emotion_response(std::string_view reply) {
  std::string cleaned;
  for (char c : detail::trim(reply))
    if (std::isalpha(static_cast<unsigned char>(c))) cleaned.push_back(c);
  if (auto e = parse_emotion(cleaned)) return *e;
  throw BackendProtocol("backend reply is not an emotion label: '" + std::string(reply) + "'");
}

Emotion AdapterEmotionGenerator::generate(TraitPole pole, const EmotionRequest& req) {
  EmotionPrompt prompt{ei_description(pole), req.text, req.user_emotion, req.comfort};
  try {
    return parse_emotion_response(backend_.complete(prompt));
  } catch (const BackendProtocol&) {
    ++fallbacks_;
    return table_.lookup(pole, req.user_emotion, req.comfort);
  }
}

}  // namespace persona

#include <fstream>

#include "doctest.h"
#include "oracles.hpp"
#include "persona/emotion_engine.hpp"
#include "persona/errors.hpp"

using namespace persona;
using E = Emotion;
using C = ComfortLabel;

namespace {
TraitPole P(const char* s) { return *parse_pole(s); }

int valence_of(E e) { return valence(e); }

class ScriptedBackend : public EmotionBackend {
 public:
  explicit ScriptedBackend(std::string reply) : reply_(std::move(reply)) {}
  std::string complete(const EmotionPrompt& prompt) override {
    last = prompt;
    return reply_;
  }
  EmotionPrompt last{};

 private:
  std::string reply_;
};
}  // namespace

TEST_SUITE("emotion_engine") {
  TEST_CASE("rule anchors") {
    CHECK(generate_emotion_rule(P("HA"), E::Fear, C::Comfortable) == E::Sadness);
    CHECK(generate_emotion_rule(P("HA"), E::Disgust, C::Comfortable) == E::Sadness);
    CHECK(generate_emotion_rule(P("HA"), E::Neutral, C::Uncomfortable) == E::Sadness);
    CHECK(generate_emotion_rule(P("HC"), E::Sadness, C::Comfortable) == E::Neutral);
  }

  TEST_CASE("generate_emotion samples only active poles") {
    Rng rng(1);
    auto g = generate_emotion(make_personality(0, 0, 1), {"", E::Fear, C::Comfortable}, rng);
    CHECK(g.emotion == E::Sadness);
    CHECK(g.pole == P("HA"));
    CHECK_THROWS_AS(generate_emotion(make_personality(0, 0, 0), {"", E::Fear, C::Comfortable}, rng), NoActivePole);

    oracle::Gen gen(8);
    for (int i = 0; i < 2000; ++i) {
      auto p = oracle::random_personality(gen);
      const EmotionRequest req{"", kAllEmotions[static_cast<std::size_t>(gen.integer(0, 6))],
                               gen.coin() ? C::Comfortable : C::Uncomfortable};
      const std::uint64_t seed = gen.engine()();
      Rng a(seed), b(seed);
      auto x = generate_emotion(p, req, a);
      auto y = generate_emotion(p, req, b);
      CHECK(x.emotion == y.emotion);
      CHECK(x.pole == y.pole);
      CHECK(p.is_active(x.pole));
      CHECK(x.emotion == generate_emotion_rule(x.pole, req.user_emotion, req.comfort));
    }
  }

  TEST_CASE("baseline mirrors happiness only") {
    auto p = make_personality(0, 1, 0);
    CHECK(baseline_generate(p, {"", E::Sadness, C::Uncomfortable}) == E::Neutral);
    CHECK(baseline_generate(p, {"", E::Happiness, C::Comfortable}) == E::Happiness);
    CHECK(baseline_generate(p, {"", E::Neutral, C::Comfortable}) == E::Neutral);
    CHECK(baseline_generate(p, {"", E::Neutral, C::Uncomfortable}) == E::Neutral);
  }

  TEST_CASE("rule table is total and discomfort never raises valence") {
    RulePolicyTable t;
    for (auto pole : kAllPoles)
      for (auto e : kAllEmotions)
        CHECK(valence_of(t.lookup(pole, e, C::Uncomfortable)) <= valence_of(t.lookup(pole, e, C::Comfortable)));
  }

  TEST_CASE("rule file parses, round-trips and must be total") {
    std::ifstream in(std::string(PERSONA_DATA_DIR) + "/emotion_rules.table");
    std::string text((std::istreambuf_iterator<char>(in)), {});
    auto t = RulePolicyTable::parse(text);
    RulePolicyTable def;
    for (auto pole : kAllPoles)
      for (auto e : kAllEmotions)
        for (auto c : kAllComfortLabels) CHECK(t.lookup(pole, e, c) == def.lookup(pole, e, c));
    CHECK(RulePolicyTable::parse(def.to_text()).to_text() == def.to_text());
    // Drop one line: no longer total.
    auto cut = text.substr(0, text.rfind('\n', text.size() - 2) + 1);
    CHECK_THROWS_AS(RulePolicyTable::parse(cut), ValidationError);
    CHECK_THROWS_AS(RulePolicyTable::parse(text + "HA fear comfortable anger\n"), SyntaxError);
    CHECK_THROWS_AS(RulePolicyTable::parse("HA fear cosy anger\n"), SyntaxError);
  }

  TEST_CASE("condition harness") {
    auto inputs = protocol_inputs(20);
    CHECK(inputs.size() == 240);
    std::vector<EmotionPolicy> policies = {
        {"NoEI", [](const EmotionRequest& r) { return baseline_generate(make_personality(0, 0, 1), r); }},
        {"EI:HA", [](const EmotionRequest& r) { return generate_emotion_rule(P("HA"), r.user_emotion, r.comfort); }}};
    auto m = evaluate_conditions(policies, inputs);
    int cells = 0;
    for (const auto& [key, counts] : m.cells())
      if (std::get<0>(key) == "NoEI") ++cells;
    CHECK(cells == 12);
    CHECK(m.share("NoEI", E::Neutral) >= 5.0 / 6.0 - 1e-12);
    CHECK(m.modal("EI:HA", E::Fear, std::nullopt) == E::Sadness);
    CHECK(m.modal("EI:HA", E::Disgust, C::Comfortable) == E::Sadness);
    CHECK(m.mean_valence("EI:HA", C::Uncomfortable) <= m.mean_valence("EI:HA", C::Comfortable));
    auto csv = m.to_csv();
    CHECK(csv.rfind("condition,user_emotion,comfort,robot_emotion,count\n", 0) == 0);
    CHECK_THROWS_AS(evaluate_conditions(policies, {}), InsufficientCoverage);
  }

  TEST_CASE("backend adapter parses replies and falls back") {
    ScriptedBackend good("  Sadness.\n");
    AdapterEmotionGenerator gen(good);
    CHECK(gen.generate(P("HA"), {"hello", E::Fear, C::Comfortable}) == E::Sadness);
    CHECK(gen.fallbacks() == 0);
    CHECK(good.last.text == "hello");
    CHECK(good.last.system == ei_description(P("HA")));

    ScriptedBackend bad("I feel like dancing");
    AdapterEmotionGenerator fallback(bad);
    CHECK(fallback.generate(P("LA"), {"x", E::Anger, C::Comfortable}) ==
          generate_emotion_rule(P("LA"), E::Anger, C::Comfortable));
    CHECK(fallback.fallbacks() == 1);
    CHECK_THROWS_AS(parse_emotion_response("maybe"), BackendProtocol);
    CHECK(parse_emotion_response("\"Happy\"") == E::Happiness);
  }
}

#include <fstream>

#include "doctest.h"
#include "oracles.hpp"
#include "persona/behavior.hpp"
#include "persona/errors.hpp"

using namespace persona;

namespace {
AbstractAction act(ActionKind k) { return AbstractAction{"a", k, std::nullopt}; }
using Strs = std::vector<std::string>;
bool contains(const Strs& v, const std::string& s) { return std::find(v.begin(), v.end(), s) != v.end(); }
}  // namespace

TEST_SUITE("behavior") {
  TEST_CASE("language styles") {
    CHECK(language_style(make_personality(0, 1, 0)) == Strs{"friendly", "talkative", "enthusiastic"});
    CHECK(language_style(make_personality(-1, 0, -1)) ==
          Strs{"thoughtless", "distracted", "lazy", "disorganized", "competitive", "aggressive", "provocative",
               "selfish", "rude"});
    CHECK(language_style(make_personality(0, 0, 0)) == Strs{"neutral"});
    // Shared descriptors appear once.
    auto s = language_style(make_personality(0, 1, 1));
    CHECK(std::count(s.begin(), s.end(), "friendly") == 1);
    CHECK(join_style({"a", "b"}) == "a, b");
  }

  TEST_CASE("single-pole rows") {
    auto he = map_parameters(make_personality(0, 1, 0), act(ActionKind::AskQuestion));
    CHECK(he.gaze_mode == GazeMode::Mutual);
    CHECK(he.gesture_amplitude == Level::High);
    CHECK(he.volume == Volume::Dynamic);
    CHECK(he.speech_rate == Level::High);

    auto le = map_parameters(make_personality(0, -1, 0), act(ActionKind::MakeAffirmation));
    CHECK(le.gaze_mode == GazeMode::Avoidant);
    CHECK(le.gesture_amplitude == Level::Low);
    CHECK(le.volume == Volume::Low);
    CHECK(le.speech_rate == Level::Middle);
  }

  TEST_CASE("agreeableness outranks extraversion") {
    auto p = map_parameters(make_personality(0, 1, -1), act(ActionKind::Greet));
    CHECK(p.gaze_mode == GazeMode::Avoidant);
    CHECK(p.gesture_amplitude == Level::High);
    for (auto d : {"provocative", "rude", "friendly", "talkative"}) CHECK(contains(p.language_style, d));
  }

  TEST_CASE("neutral personality gets the middle defaults") {
    auto p = map_parameters(make_personality(0, 0, 0), act(ActionKind::Greet));
    CHECK(p.gaze_mode == GazeMode::Mutual);
    CHECK(p.gesture_amplitude == Level::Middle);
    CHECK(p.volume == Volume::Middle);
    CHECK(p.head_movement == HeadMovement::Still);
    CHECK(p.language_style == Strs{"neutral"});
  }

  TEST_CASE("single active pole reproduces its table row verbatim") {
    BehaviorTable t;
    for (auto pole : kAllPoles) {
      double w[3] = {0, 0, 0};
      w[index(pole.axis)] = pole.polarity == Polarity::High ? 1 : -1;
      auto p = map_parameters(make_personality(w[0], w[1], w[2]), act(ActionKind::TellJoke));
      const auto& r = t.row(pole);
      CHECK(p.gaze_mode == r.gaze);
      CHECK(p.gesture_amplitude == r.gesture);
      CHECK(p.volume == r.volume);
      CHECK(p.speech_rate == r.rate);
      CHECK(p.pitch == r.pitch);
      CHECK(p.head_movement == r.head);
    }
  }

  TEST_CASE("property: pure, action-independent, C never moves gaze once E or A is active") {
    oracle::Gen g(99);
    for (int i = 0; i < 3000; ++i) {
      auto p = oracle::random_personality(g, true);
      auto k = persona::kAllActionKinds[static_cast<std::size_t>(g.integer(0, 7))];
      auto a = map_parameters(p, act(k));
      CHECK(a == map_parameters(p, act(k)));
      CHECK(a == map_parameters(p, act(ActionKind::StaySilent)));
      if (p.is_active(TraitAxis::Extraversion) || p.is_active(TraitAxis::Agreeableness)) {
        const double wc = g.coin() ? 0.0 : g.real(-1, 1);
        CHECK(map_parameters(make_personality(wc, p.we(), p.wa()), act(k)).gaze_mode == a.gaze_mode);
      }
    }
  }

  TEST_CASE("table file round trip and errors") {
    std::ifstream in(std::string(PERSONA_DATA_DIR) + "/behavior.table");
    std::string text((std::istreambuf_iterator<char>(in)), {});
    auto t = BehaviorTable::parse(text);
    BehaviorTable def;
    for (auto pole : kAllPoles) {
      const auto &a = t.row(pole), &b = def.row(pole);
      CHECK((a.gaze == b.gaze && a.gesture == b.gesture && a.volume == b.volume && a.rate == b.rate &&
             a.pitch == b.pitch && a.head == b.head));
    }
    CHECK_THROWS_AS(BehaviorTable::parse("HE gaze mutual\n"), ValidationError);
    try {
      BehaviorTable::parse("# header\nHE gaze sideways\n");
      FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
      CHECK(e.line() == 2);
    }
    try {
      BehaviorTable::parse(text + "HE gaze mutual\n");
      FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
      CHECK(std::string(e.what()).find("duplicate") != std::string::npos);
    }
  }
}

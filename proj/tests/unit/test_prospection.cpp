#include <fstream>

#include "doctest.h"
#include "oracles.hpp"
#include "persona/errors.hpp"
#include "persona/prospection.hpp"
#include "persona/runtime.hpp"

using namespace persona;

namespace {

std::string data_file(const char* name) {
  std::ifstream in(std::string(PERSONA_DATA_DIR) + "/" + name);
  return {std::istreambuf_iterator<char>(in), {}};
}

WorldState state(double fc, double fe, double fa, FactSet facts = {}) {
  return WorldState{std::move(facts), ComfortabilityState(fc, fe, fa, 0.3), 0};
}

ActionSchema schema(ActionKind k, std::initializer_list<std::pair<const char*, double>> deltas) {
  ActionSchema a;
  a.kind = k;
  for (auto [pole, v] : deltas) a.comfort_delta[index(*parse_pole(pole))] = v;
  return a;
}

}  // namespace

TEST_SUITE("prospection") {
  TEST_CASE("shipped domain parses with all eight action kinds") {
    auto d = parse_domain(data_file("conversation.domain"));
    CHECK(d.actions.size() == 8);
    for (auto k : kAllActionKinds) CHECK(d.find(k) != nullptr);
    CHECK(parse_domain(shipped_domain_text()).actions.size() == 8);
  }

  TEST_CASE("domain syntax") {
    auto d = parse_domain(R"(
# comment
action Greet {
  pre !(robot greeted user); add (robot greeted user)
  delta_e 0.2
  reward HE 1 LE -1
  expect happiness mutual
}
action ask_question { pre not (robot greeted user) (a b c)
  del (a b c)
  delta HA -0.5 LA 0.5
  expect fear averted }
)");
    REQUIRE(d.actions.size() == 2);
    const auto& g = d.actions[0];
    CHECK(g.kind == ActionKind::Greet);
    CHECK(g.pre.size() == 1);
    CHECK(g.pre[0].negated);
    CHECK(g.delta(*parse_pole("HE")) == 0.2);
    CHECK(g.delta(*parse_pole("LE")) == -0.2);
    CHECK(g.reward(*parse_pole("LE")) == -1);
    CHECK(g.expected == OutcomeObservation{Emotion::Happiness, true});
    const auto& q = d.actions[1];
    CHECK(q.kind == ActionKind::AskQuestion);
    CHECK(q.pre.size() == 2);
    CHECK(q.pre[0].negated);
    CHECK_FALSE(q.pre[1].negated);
    CHECK(q.del.size() == 1);
    CHECK(q.expected == OutcomeObservation{Emotion::Fear, false});
    CHECK(parse_domain("").actions.empty());
  }

  TEST_CASE("domain validation errors") {
    CHECK_THROWS_AS(parse_domain("action Greet {\n delta_e 1.5\n}\n"), ValidationError);
    CHECK_THROWS_AS(parse_domain("action Greet {\n delta HE -1.01\n}\n"), ValidationError);
    CHECK_THROWS_AS(parse_domain("action Greet { }\naction Greet { }\n"), ValidationError);
    CHECK_THROWS_AS(parse_domain("action Dance { }\n"), ValidationError);
  }

  TEST_CASE("unbalanced block delimiters report their line") {
    const std::string head = "# 1\n# 2\naction Greet {\n  delta_e 0.1\n}\n\n";  // lines 1-6
    try {
      parse_domain(head + "action Farewell {\n  delta_e 0.1\n");
      FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
      CHECK(e.line() == 7);
    }
    try {
      parse_domain(head + "}\n");
      FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
      CHECK(e.line() == 7);
      CHECK(e.col() == 1);
    }
    try {
      parse_domain(head + "action Farewell {\naction TellJoke { }\n");
      FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
      CHECK(e.line() == 7);
    }
    CHECK_THROWS_AS(parse_domain("action Greet {\n pre (a b)\n}\n"), SyntaxError);
    CHECK_THROWS_AS(parse_domain("action Greet {\n bogus 1\n}\n"), SyntaxError);
    CHECK_THROWS_AS(parse_domain("action Greet {\n expect happiness sideways\n}\n"), SyntaxError);
  }

  TEST_CASE("numeric preconditions") {
    auto a = schema(ActionKind::TellJoke, {{"HE", -0.1}, {"LE", 0.1}});
    CHECK_FALSE(applicable(a, state(0.8, 0.35, 0.8), make_personality(0, 1, 0)));
    CHECK(applicable(a, state(0.8, 0.35, 0.8), make_personality(0, 0, 1)));
    CHECK(applicable(a, state(0.8, 0.35, 0.8), make_personality(0, -1, 0)));
    a.pre.push_back({make_fact("x", "y", "z"), false});
    CHECK_FALSE(applicable(a, state(0.8, 0.35, 0.8), make_personality(0, 0, 1)));

    auto mild = schema(ActionKind::Greet, {{"HC", -0.5}, {"LC", -0.5}, {"HE", -0.5}, {"LE", -0.5}, {"HA", -0.5}, {"LA", -0.5}});
    oracle::Gen g(3);
    for (int i = 0; i < 200; ++i) CHECK(applicable(mild, state(1, 1, 1), oracle::random_personality(g, true)));
  }

  TEST_CASE("apply adds deltas with clamping on active axes only") {
    auto a = schema(ActionKind::Greet, {{"HA", 0.1}, {"HC", -0.2}});
    auto s = apply(a, state(0.8, 0.8, 0.8), make_personality(0, 0, 1));
    CHECK(s.comfort.fa() == doctest::Approx(0.9));
    CHECK(s.comfort.fc() == 0.8);
    CHECK(s.comfort.fe() == 0.8);
    CHECK(s.turn_index == 1);
    CHECK(apply(a, state(0.8, 0.8, 0.95), make_personality(0, 0, 1)).comfort.fa() == 1.0);
    auto drop = schema(ActionKind::Greet, {{"HA", -0.9}});
    CHECK_THROWS_AS(apply(drop, state(0.8, 0.8, 0.8), make_personality(0, 0, 1)), NotApplicable);
  }

  TEST_CASE("plan examples") {
    CHECK(plan({}, state(0.8, 0.8, 0.8), make_personality(0, 1, 0), 3).empty());
    CHECK(plan({}, state(0.8, 0.8, 0.8), make_personality(0, 1, 0), 3).total_reward == 0.0);
    CHECK_THROWS_AS(plan({}, state(0.8, 0.8, 0.8), make_personality(0, 1, 0), 0), OutOfRange);

    // Only StaySilent can run.
    DomainSpec d;
    d.actions.push_back(schema(ActionKind::StaySilent, {}));
    auto blocked = schema(ActionKind::TellJoke, {});
    blocked.pre.push_back({make_fact("never", "is", "true"), false});
    d.actions.push_back(blocked);
    auto pl = plan(d, state(0.8, 0.8, 0.8), make_personality(0, 1, 0), 4);
    CHECK(pl.kinds() == std::vector<ActionKind>(4, ActionKind::StaySilent));
  }

  TEST_CASE("shipped domain plan matches exhaustive enumeration") {
    const auto d = parse_domain(shipped_domain_text());
    const auto p = make_personality(0, 1, 0);
    for (int h = 1; h <= 4; ++h) {
      auto s = state(0.8, 0.5, 0.8);
      auto pl = plan(d, s, p, h);
      auto brute = oracle::brute_force_plan(d, s, p, h);
      CHECK(pl.total_reward == brute.best);
      std::vector<std::string> names;
      for (auto k : pl.kinds()) names.emplace_back(to_string(k));
      CHECK(names == brute.best_names);
    }
  }

  TEST_CASE("property: random domains match the oracle and stay above threshold") {
    oracle::Gen g(31337);
    for (int i = 0; i < 300; ++i) {
      const auto d = oracle::random_domain(g);
      const auto p = oracle::random_personality(g);
      const int h = g.integer(1, 4);
      FactSet facts;
      if (g.coin()) facts.insert(make_fact("robot", "greeted", "user"));
      const auto s = state(g.grid(0.3, 1.0, 0.05), g.grid(0.3, 1.0, 0.05), g.grid(0.3, 1.0, 0.05), facts);
      const auto pl = plan(d, s, p, h, static_cast<std::uint64_t>(i));
      const auto brute = oracle::brute_force_plan(d, s, p, h);
      CHECK(pl.total_reward == brute.best);
      std::vector<std::string> names;
      for (auto k : pl.kinds()) names.emplace_back(to_string(k));
      CHECK(names == brute.best_names);
      // Replaying the plan keeps every active fluent above theta.
      WorldState cur = s;
      for (const auto& step : pl.steps) {
        cur = apply(*d.find(step.action.kind), cur, p);
        CHECK(cur.comfort == step.predicted_comfort);
        for (auto axis : kAllAxes) {
          CHECK(cur.comfort.fluent(axis) >= 0.0);
          CHECK(cur.comfort.fluent(axis) <= 1.0);
          if (p.is_active(axis)) CHECK(cur.comfort.fluent(axis) >= cur.comfort.theta());
        }
      }
      // The seed plays no part.
      CHECK(plan(d, s, p, h, 999).kinds() == pl.kinds());
      // Exact rescaling of rewards keeps the chosen sequence.
      auto scaled = d;
      const double c = g.pick(std::vector<double>{0.5, 2.0, 4.0});
      for (auto& a : scaled.actions)
        for (auto& r : a.base_reward) r *= c;
      CHECK(plan(scaled, s, p, h).kinds() == pl.kinds());
    }
  }

  TEST_CASE("stimulus updates") {
    Dynamics dyn;
    auto snap = [](Emotion e, double gaze) { return make_snapshot(e, std::nullopt, gaze, 0); };
    ComfortabilityState c(0.8, 0.8, 0.8, 0.3);
    CHECK(stimulus_update(c, snap(Emotion::Anger, 0.5), make_personality(0, 0, 1), dyn).fa() ==
          doctest::Approx(0.7));
    CHECK(stimulus_update(c, snap(Emotion::Anger, 0.5), make_personality(0, 0, -1), dyn).fa() ==
          doctest::Approx(0.9));
    CHECK(stimulus_update(c, snap(Emotion::Anger, 0.0), make_personality(0, 0, 0), dyn) == c);
    // Extravert: neutral user and averted gaze both hurt.
    CHECK(stimulus_update(c, snap(Emotion::Neutral, 0.0), make_personality(0, 1, 0), dyn).fe() ==
          doctest::Approx(0.8 - 0.05 - 0.05));
    // Introvert: full mutual gaze is mildly uncomfortable.
    CHECK(stimulus_update(c, snap(Emotion::Neutral, 1.0), make_personality(0, -1, 0), dyn).fe() ==
          doctest::Approx(0.8 - 0.025));
    // Clamped at the top.
    ComfortabilityState high(1, 1, 1, 0.3);
    CHECK(stimulus_update(high, snap(Emotion::Happiness, 1.0), make_personality(0, 1, 1), dyn).fe() == 1.0);
  }

  TEST_CASE("replanning trigger") {
    CHECK(needs_replan(state(0.8, 0.32, 0.8), make_personality(0, 1, 0), 2, 0.05));
    CHECK_FALSE(needs_replan(state(1, 1, 1), make_personality(0, 1, 0), 2, 0.05));
    CHECK(needs_replan(state(1, 1, 1), make_personality(0, 1, 0), 0, 0.05));
    CHECK_FALSE(needs_replan(state(0.8, 0.32, 0.8), make_personality(0, 0, 1), 2, 0.05));
  }

  TEST_CASE("dynamics file mirrors the defaults") {
    auto d = Dynamics::parse(data_file("dynamics.cfg"));
    Dynamics def;
    CHECK(d.initial == def.initial);
    CHECK(d.theta == def.theta);
    CHECK(d.eta == def.eta);
    CHECK(d.margin == def.margin);
    CHECK(d.beta == def.beta);
    CHECK(d.delta == def.delta);
    CHECK(d.stim == def.stim);
    CHECK(d.gaze_gain == def.gaze_gain);
    CHECK_THROWS_AS(Dynamics::parse("theta 1.5\n"), ValidationError);
    CHECK_THROWS_AS(Dynamics::parse("theta x\n"), SyntaxError);
    CHECK_THROWS_AS(Dynamics::parse("wobble 1\n"), SyntaxError);
    auto only = Dynamics::parse("stim HE anger 1\n");
    CHECK(only.stim_sensitivity(*parse_pole("HE"), Emotion::Anger) == 1.0);
    CHECK(only.stim_sensitivity(*parse_pole("HE"), Emotion::Happiness) == 0.0);
  }

  TEST_CASE("comfort state clamps and rejects bad thresholds") {
    ComfortabilityState c(1.4, -0.2, 0.5, 0.3);
    CHECK(c.fc() == 1.0);
    CHECK(c.fe() == 0.0);
    CHECK_THROWS_AS(ComfortabilityState(0.5, 0.5, 0.5, 1.0), OutOfRange);
    CHECK(is_uncomfortable(ComfortabilityState(0.34, 0.9, 0.9, 0.3), make_personality(1, 0, 0), 0.05));
    CHECK_FALSE(is_uncomfortable(ComfortabilityState(0.34, 0.9, 0.9, 0.3), make_personality(0, 1, 0), 0.05));
  }
}

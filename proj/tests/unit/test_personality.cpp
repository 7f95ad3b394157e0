#include <map>

#include "doctest.h"
#include "oracles.hpp"
#include "persona/errors.hpp"
#include "persona/personality.hpp"

using namespace persona;

namespace {
TraitPole P(const char* s) { return *parse_pole(s); }
}  // namespace

TEST_SUITE("personality") {
  TEST_CASE("make_personality accepts the unit box and rejects the rest") {
    auto p = make_personality(0, 1, -1);
    CHECK(active_poles(p) == std::vector<TraitPole>{P("HE"), P("LA")});
    CHECK(active_poles(make_personality(0, 0, 0)).empty());
    CHECK_THROWS_AS(make_personality(0, 1.5, 0), OutOfRange);
    CHECK_THROWS_AS(make_personality(-1.0001, 0, 0), OutOfRange);
    CHECK_THROWS_AS(make_personality(0, std::nan(""), 0), OutOfRange);
    CHECK_THROWS_AS(make_personality(0, 0, INFINITY), OutOfRange);
    CHECK_NOTHROW(make_personality(-1, -1, 1));
  }

  TEST_CASE("negative zero is an inactive axis") {
    auto p = make_personality(-0.0, 0, 0);
    CHECK_FALSE(p.is_active(TraitAxis::Conscientiousness));
    CHECK(p == make_personality(0, 0, 0));
  }

  TEST_CASE("active poles follow C, E, A order and the sign rule") {
    CHECK(active_poles(make_personality(1, 0, -1)) == std::vector<TraitPole>{P("HC"), P("LA")});
    CHECK(active_poles(make_personality(-0.5, 1, 1)) == std::vector<TraitPole>{P("LC"), P("HE"), P("HA")});
  }

  TEST_CASE("description lists extraversion, agreeableness, then conscientiousness") {
    CHECK(personality_description(make_personality(-1, 0, -1)) == "Disagreeable and Unscrupulous");
    CHECK(personality_description(make_personality(0, 1, -1), ", ") == "Extravert, Disagreeable");
    CHECK(personality_description(make_personality(0, 0, 0)) == "Neutral");
    CHECK(personality_description(make_personality(1, -1, 1)) == "Introvert and Agreeable and Conscientious");
  }

  TEST_CASE("pole names round-trip") {
    for (auto pole : kAllPoles) {
      CHECK(parse_pole(to_string(pole)) == pole);
      CHECK(opposite(opposite(pole)) == pole);
      CHECK(opposite(pole).axis == pole.axis);
      CHECK(opposite(pole).polarity != pole.polarity);
    }
    CHECK_FALSE(parse_pole("XX").has_value());
    CHECK(parse_axis("E") == TraitAxis::Extraversion);
    CHECK(parse_axis("agreeableness") == TraitAxis::Agreeableness);
  }

  TEST_CASE("selection weights for extravert-agreeable on happiness") {
    auto w = trait_selection_weights(make_personality(0, 1, 1), Emotion::Happiness);
    REQUIRE(w.size() == 2);
    CHECK(w[0].pole == P("HE"));
    CHECK(w[0].weight == doctest::Approx(0.35 / 0.75).epsilon(1e-12));
    CHECK(w[1].pole == P("HA"));
    CHECK(w[1].weight == doctest::Approx(0.40 / 0.75).epsilon(1e-12));
    CHECK(w[0].weight == doctest::Approx(0.467).epsilon(1e-3));
  }

  TEST_CASE("single pole takes all the weight; neutral has none") {
    for (auto e : kAllEmotions) {
      auto w = trait_selection_weights(make_personality(1, 0, 0), e);
      REQUIRE(w.size() == 1);
      CHECK(w[0].pole == P("HC"));
      CHECK(w[0].weight == 1.0);
      CHECK_THROWS_AS(trait_selection_weights(make_personality(0, 0, 0), e), NoActivePole);
    }
  }

  TEST_CASE("anger raises agreeableness sensitivity") {
    SensitivityTable t;
    CHECK(t.sensitivity(TraitAxis::Agreeableness, Emotion::Anger) == 0.50);
    CHECK(t.sensitivity(TraitAxis::Agreeableness, Emotion::Happiness) == 0.40);
    CHECK(t.sensitivity(TraitAxis::Extraversion, Emotion::Anger) == 0.35);
    CHECK(t.sensitivity(TraitAxis::Conscientiousness, Emotion::Fear) == 0.25);
  }

  TEST_CASE("sensitivity file parses and validates") {
    auto t = SensitivityTable::parse("base A 0.5\nbase E 0.3\nbase C 0.2\noverride fear E 0.9\n");
    CHECK(t.sensitivity(TraitAxis::Agreeableness, Emotion::Anger) == 0.5);
    CHECK(t.sensitivity(TraitAxis::Extraversion, Emotion::Fear) == 0.9);
    CHECK(t.sensitivity(TraitAxis::Extraversion, Emotion::Happiness) == 0.3);
    // An override written before a base row still wins.
    auto u = SensitivityTable::parse("override anger A 0.7\nbase A 0.1\n");
    CHECK(u.sensitivity(TraitAxis::Agreeableness, Emotion::Anger) == 0.7);
    CHECK(u.sensitivity(TraitAxis::Agreeableness, Emotion::Sadness) == 0.1);
    CHECK_THROWS_AS(SensitivityTable::parse("base A -1\n"), SyntaxError);
    CHECK_THROWS_AS(SensitivityTable::parse("base Q 1\n"), SyntaxError);
    CHECK_THROWS_AS(SensitivityTable::parse("bogus\n"), SyntaxError);
  }

  TEST_CASE("sampling is deterministic and follows the categorical law") {
    std::vector<PoleWeight> one = {{P("HA"), 1.0}};
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      Rng rng(seed);
      CHECK(sample_trait_pole(one, rng) == P("HA"));
    }
    std::vector<PoleWeight> half = {{P("HE"), 0.5}, {P("HA"), 0.5}};
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Rng a(seed), b(seed);
      CHECK(sample_trait_pole(half, a) == sample_trait_pole(half, b));
    }
    std::vector<PoleWeight> w = {{P("HE"), 0.467}, {P("HA"), 0.533}};
    Rng rng(12345);
    int ha = 0;
    for (int i = 0; i < 10000; ++i) ha += sample_trait_pole(w, rng) == P("HA");
    CHECK(std::fabs(ha / 10000.0 - 0.533) <= 0.02);
  }

  TEST_CASE("property: weights sum to one, never both polarities, C never strictly max") {
    oracle::Gen g(7);
    for (int i = 0; i < 2000; ++i) {
      auto p = oracle::random_personality(g);
      auto poles = active_poles(p);
      for (auto axis : kAllAxes) {
        int n = 0;
        for (auto pole : poles) n += pole.axis == axis;
        CHECK(n <= 1);
      }
      for (auto e : kAllEmotions) {
        auto w = trait_selection_weights(p, e);
        double sum = 0;
        for (auto& pw : w) sum += pw.weight;
        CHECK(std::fabs(sum - 1.0) <= 1e-9);

        // Scaling by a common positive factor keeps the argmax.
        const double k = g.real(0.05, 1.0);
        auto scaled = trait_selection_weights(make_personality(p.wc() * k, p.we() * k, p.wa() * k), e);
        auto argmax = [](const std::vector<PoleWeight>& v) {
          return std::max_element(v.begin(), v.end(),
                                  [](auto& a, auto& b) { return a.weight < b.weight; })->pole;
        };
        CHECK(argmax(w) == argmax(scaled));
      }
    }
    for (double s1 : {-1.0, 1.0})
      for (double s2 : {-1.0, 1.0})
        for (double s3 : {-1.0, 1.0})
          for (double mag : {0.3, 1.0})
            for (auto e : kAllEmotions) {
              auto w = trait_selection_weights(make_personality(s1 * mag, s2 * mag, s3 * mag), e);
              double c = 0, best_other = 0;
              for (auto& pw : w) {
                if (pw.pole.axis == TraitAxis::Conscientiousness) c = pw.weight;
                else best_other = std::max(best_other, pw.weight);
              }
              CHECK(c < best_other);
            }
  }
}

#include "doctest.h"
#include "persona/errors.hpp"
#include "persona/perception.hpp"
#include "properties.hpp"

using namespace persona;
using E = Emotion;

TEST_SUITE("perception") {
  TEST_CASE("window majority examples") {
    std::vector<FaceSample> s = {{1000, E::Happiness}, {2000, E::Happiness}, {3000, E::Sadness}};
    CHECK(window_majority(s, 4000) == E::Happiness);
    CHECK(window_majority({}, 4000) == E::Neutral);
    std::vector<FaceSample> tie = {{1000, E::Happiness}, {2000, E::Sadness}, {3000, E::Happiness}, {4000, E::Sadness}};
    CHECK(window_majority(tie, 5000) == E::Sadness);
  }

  TEST_CASE("window is half-open: (now - width, now]") {
    std::vector<FaceSample> s = {{0, E::Anger}, {5000, E::Fear}};
    CHECK(window_majority(s, 5000) == E::Fear);   // t=0 is exactly width old
    CHECK(window_majority(s, 4999) == E::Anger);  // t=5000 is in the future
    std::vector<FaceSample> future = {{6000, E::Fear}};
    CHECK(window_majority(future, 5000) == E::Neutral);
  }

  TEST_CASE("equal timestamps: later buffer position wins the tie") {
    std::vector<FaceSample> s = {{1000, E::Anger}, {1000, E::Fear}};
    CHECK(window_majority(s, 2000) == E::Fear);
    std::vector<FaceSample> r = {{1000, E::Fear}, {1000, E::Anger}};
    CHECK(window_majority(r, 2000) == E::Anger);
  }

  TEST_CASE("fusion rules") {
    CHECK(fuse_emotions(E::Neutral, E::Sadness) == E::Sadness);
    CHECK(fuse_emotions(E::Happiness, std::nullopt) == E::Happiness);
    CHECK(fuse_emotions(E::Anger, E::Happiness) == E::Anger);
    CHECK(fuse_emotions(E::Neutral, E::Neutral) == E::Neutral);
    CHECK(fuse_emotions(E::Surprise, E::Neutral) == E::Surprise);
  }

  TEST_CASE("gaze fraction examples") {
    std::vector<GazeSample> g = {{100, true}, {200, true}, {300, false}, {400, true}, {500, true}};
    CHECK(gaze_mutual_fraction(g, 1000) == doctest::Approx(0.8));
    CHECK(gaze_mutual_fraction({}, 1000) == 0.5);
    std::vector<GazeSample> averted = {{100, false}, {200, false}};
    CHECK(gaze_mutual_fraction(averted, 1000) == 0.0);
  }

  TEST_CASE("snapshot validates the gaze fraction and fuses") {
    auto s = make_snapshot(E::Neutral, E::Fear, 0.25, 10);
    CHECK(s.fused_emotion == E::Fear);
    CHECK_THROWS_AS(make_snapshot(E::Neutral, std::nullopt, 1.5, 0), OutOfRange);
    CHECK_THROWS_AS(make_snapshot(E::Neutral, std::nullopt, -0.1, 0), OutOfRange);
  }

  TEST_CASE("ring drops the oldest sample and rejects time going backwards") {
    SampleRing<FaceSample> ring(3);
    for (int i = 0; i < 5; ++i) ring.push({i * 100, E::Happiness});
    REQUIRE(ring.size() == 3);
    CHECK(ring.snapshot().front().t == 200);
    CHECK_THROWS_AS(ring.push({50, E::Anger}), ValidationError);
  }

  TEST_CASE("perception buffers build snapshots") {
    PerceptionBuffers buf;
    for (int t = 0; t < 5000; t += 100) {
      buf.push_face({t, t < 3000 ? E::Sadness : E::Happiness});
      buf.push_gaze({t, t % 200 == 0});
    }
    auto s = buf.snapshot(4900, E::Anger);
    CHECK(s.face_emotion == E::Sadness);  // 30 sad vs 20 happy in (-100, 4900]
    CHECK(s.fused_emotion == E::Sadness);
    CHECK(s.gaze_mutual_fraction == doctest::Approx(0.5));
    CHECK(buf.face_count() == 50);
    auto later = buf.snapshot(7900);
    CHECK(later.face_emotion == E::Happiness);
    CHECK(later.text_emotion == std::nullopt);
  }

  TEST_CASE("lexicon sentiment") {
    auto lex = LexiconSentiment::parse("happy happiness\nsad sadness\ngreat happiness\nangry anger\n");
    CHECK(lex.classify("I am so HAPPY and great") == E::Happiness);
    CHECK(lex.classify("sad, sad... but happy") == E::Sadness);
    CHECK(lex.classify("nothing here") == E::Neutral);
    CHECK(lex.classify("") == E::Neutral);
    // Ties resolve to the earlier emotion in canonical order.
    CHECK(lex.classify("angry happy") == E::Happiness);
    CHECK(lex("sad") == E::Sadness);
    CHECK_THROWS_AS(LexiconSentiment::parse("word notanemotion\n"), SyntaxError);
    CHECK_THROWS_AS(LexiconSentiment::parse("one two three\n"), SyntaxError);
  }

  TEST_CASE("property: randomized window, tie, fusion and default cases") {
    oracle::Gen g(2024);
    int failures = 0;
    for (int i = 0; i < 10000; ++i) {
      const std::string err = props::perception_case(g);
      if (!err.empty() && ++failures <= 5) FAIL_CHECK("case " << i << ": " << err);
    }
    CHECK(failures == 0);
  }
}

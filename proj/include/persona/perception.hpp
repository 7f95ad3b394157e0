#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "persona/emotion.hpp"

namespace persona {

using TimestampMs = std::int64_t;
using DurationMs = std::int64_t;

inline constexpr DurationMs kDefaultWindowMs = 5000;

struct FaceSample {
  TimestampMs t;
  Emotion emotion;
};

struct GazeSample {
  TimestampMs t;
  bool mutual;
};

struct UtteranceEvent {
  TimestampMs t;
  std::string text;
  Emotion sentiment = Emotion::Neutral;
};

struct PerceptSnapshot {
  Emotion face_emotion = Emotion::Neutral;
  std::optional<Emotion> text_emotion;
  Emotion fused_emotion = Emotion::Neutral;
  double gaze_mutual_fraction = 0.5;
  TimestampMs t = 0;
};

// Modal emotion among samples with t in (now - width, now]. Ties go to the
// label whose latest in-window sample is most recent; empty window is Neutral.
Emotion window_majority(std::span<const FaceSample> samples, TimestampMs now,
                        DurationMs width = kDefaultWindowMs);

// Face wins unless it is Neutral; a Neutral text never overrides the face.
Emotion fuse_emotions(Emotion face, std::optional<Emotion> text);

// Share of in-window samples with mutual gaze; 0.5 for an empty window.
double gaze_mutual_fraction(std::span<const GazeSample> samples, TimestampMs now,
                            DurationMs width = kDefaultWindowMs);

PerceptSnapshot make_snapshot(Emotion face, std::optional<Emotion> text, double gaze_fraction,
                              TimestampMs t);

// Text -> Emotion. The default is LexiconSentiment; a hosted model can be
// dropped in behind the same signature.
using SentimentAdapter = std::function<Emotion(std::string_view)>;

// Keyword classifier. File format: one `<word> <emotion>` pair per line.
// The emotion with the most keyword hits wins, ties resolved by canonical
// emotion order; no hits gives Neutral.
class LexiconSentiment {
 public:
  LexiconSentiment() = default;
  static LexiconSentiment load(const std::filesystem::path& path);
  static LexiconSentiment parse(std::string_view text);

  void add(std::string word, Emotion e);
  Emotion classify(std::string_view text) const;
  Emotion operator()(std::string_view text) const { return classify(text); }
  std::size_t size() const { return words_.size(); }

 private:
  std::map<std::string, Emotion, std::less<>> words_;
};

// Bounded buffer; pushing beyond capacity drops the oldest element.
// Timestamps must be non-decreasing.
template <typename Sample>
class SampleRing {
 public:
  explicit SampleRing(std::size_t capacity) : capacity_(capacity) {}

  void push(const Sample& s);
  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::vector<Sample> snapshot() const { return {data_.begin(), data_.end()}; }

 private:
  std::size_t capacity_;
  std::deque<Sample> data_;
};

// Per-session face/gaze buffers. One producer feeds samples while the
// dispatcher reads snapshots; the mutex makes each read see a consistent prefix.
class PerceptionBuffers {
 public:
  // 10 minutes at 10 Hz.
  static constexpr std::size_t kDefaultCapacity = 6000;

  explicit PerceptionBuffers(std::size_t capacity = kDefaultCapacity);

  void push_face(FaceSample s);
  void push_gaze(GazeSample s);

  // Snapshot at `now`; text_emotion is the sentiment of an accompanying
  // utterance if there is one.
  PerceptSnapshot snapshot(TimestampMs now, std::optional<Emotion> text_emotion = std::nullopt,
                           DurationMs width = kDefaultWindowMs) const;

  std::size_t face_count() const;
  std::size_t gaze_count() const;

 private:
  mutable std::mutex mu_;
  SampleRing<FaceSample> face_;
  SampleRing<GazeSample> gaze_;
};

}  // namespace persona

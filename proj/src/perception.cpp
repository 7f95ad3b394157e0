#include "persona/perception.hpp"

#include <array>

#include "persona/errors.hpp"
#include "text_util.hpp"

namespace persona {

Emotion window_majority(std::span<const FaceSample> samples, TimestampMs now, DurationMs width) {
  std::array<int, kEmotionCount> count{};
  std::array<TimestampMs, kEmotionCount> last{};
  std::array<std::size_t, kEmotionCount> last_pos{};
  std::size_t pos = 0;
  for (const auto& s : samples) {
    ++pos;
    if (s.t <= now - width || s.t > now) continue;
    const auto i = index(s.emotion);
    ++count[i];
    last[i] = s.t;
    last_pos[i] = pos;  // equal timestamps: later in the buffer is more recent
  }
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < kEmotionCount; ++i) {
    if (count[i] == 0) continue;
    if (!best || count[i] > count[*best] ||
        (count[i] == count[*best] &&
         (last[i] > last[*best] || (last[i] == last[*best] && last_pos[i] > last_pos[*best])))) {
      best = i;
    }
  }
  return best ? kAllEmotions[*best] : Emotion::Neutral;
}

Emotion fuse_emotions(Emotion face, std::optional<Emotion> text) {
  if (!text) return face;
  if (face == Emotion::Neutral) return *text;
  return face;
}

double gaze_mutual_fraction(std::span<const GazeSample> samples, TimestampMs now, DurationMs width) {
  int total = 0;
  int mutual = 0;
  for (const auto& s : samples) {
    if (s.t <= now - width || s.t > now) continue;
    ++total;
    if (s.mutual) ++mutual;
  }
  return total == 0 ? 0.5 : static_cast<double>(mutual) / total;
}

PerceptSnapshot make_snapshot(Emotion face, std::optional<Emotion> text, double gaze_fraction,
                              TimestampMs t) {
  if (!(gaze_fraction >= 0.0 && gaze_fraction <= 1.0))
    throw OutOfRange("gaze fraction outside [0, 1]");
  return PerceptSnapshot{face, text, fuse_emotions(face, text), gaze_fraction, t};
}

// --- LexiconSentiment ---

void LexiconSentiment::add(std::string word, Emotion e) { words_[detail::lower(word)] = e; }

LexiconSentiment LexiconSentiment::parse(std::string_view text) {
  LexiconSentiment lex;
  int lineno = 0;
  for (auto raw : detail::split_lines(text)) {
    ++lineno;
    auto tok = detail::split_ws(detail::strip_comment(raw));
    if (tok.empty()) continue;
    if (tok.size() != 2) throw SyntaxError(lineno, 1, "expected '<word> <emotion>'");
    auto e = parse_emotion(tok[1]);
    if (!e) throw SyntaxError(lineno, static_cast<int>(tok[1].data() - raw.data()) + 1, "unknown emotion");
    lex.add(std::string(tok[0]), *e);
  }
  return lex;
}

LexiconSentiment LexiconSentiment::load(const std::filesystem::path& path) {
  return parse(detail::read_file(path.string()));
}

Emotion LexiconSentiment::classify(std::string_view text) const {
  std::array<int, kEmotionCount> hits{};
  std::string word;
  auto flush = [&] {
    if (word.empty()) return;
    if (auto it = words_.find(word); it != words_.end()) ++hits[index(it->second)];
    word.clear();
  };
  for (char c : text) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isalnum(uc) || c == '\'') {
      word.push_back(static_cast<char>(std::tolower(uc)));
    } else {
      flush();
    }
  }
  flush();
  std::size_t best = index(Emotion::Neutral);
  int best_hits = 0;
  for (std::size_t i = 0; i < kEmotionCount; ++i) {
    if (hits[i] > best_hits) {
      best = i;
      best_hits = hits[i];
    }
  }
  return kAllEmotions[best];
}

// --- buffers ---

template <typename Sample>
void SampleRing<Sample>::push(const Sample& s) {
  if (!data_.empty() && s.t < data_.back().t)
    throw ValidationError("sample timestamps must be non-decreasing");
  if (capacity_ == 0) return;
  if (data_.size() == capacity_) data_.pop_front();
  data_.push_back(s);
}

template class SampleRing<FaceSample>;
template class SampleRing<GazeSample>;

PerceptionBuffers::PerceptionBuffers(std::size_t capacity) : face_(capacity), gaze_(capacity) {}

void PerceptionBuffers::push_face(FaceSample s) {
  std::lock_guard lock(mu_);
  face_.push(s);
}

void PerceptionBuffers::push_gaze(GazeSample s) {
  std::lock_guard lock(mu_);
  gaze_.push(s);
}

PerceptSnapshot PerceptionBuffers::snapshot(TimestampMs now, std::optional<Emotion> text_emotion,
                                            DurationMs width) const {
  std::vector<FaceSample> faces;
  std::vector<GazeSample> gazes;
  {
    std::lock_guard lock(mu_);
    faces = face_.snapshot();
    gazes = gaze_.snapshot();
  }
  return make_snapshot(window_majority(faces, now, width), text_emotion,
                       gaze_mutual_fraction(gazes, now, width), now);
}

std::size_t PerceptionBuffers::face_count() const {
  std::lock_guard lock(mu_);
  return face_.size();
}

std::size_t PerceptionBuffers::gaze_count() const {
  std::lock_guard lock(mu_);
  return gaze_.size();
}

}  // namespace persona

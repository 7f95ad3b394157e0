#pragma once
// Property checks shared by the unit tests and the acceptance runner. Each
// returns an empty string on success, or a description of the failure.

#include <algorithm>
#include <array>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "persona/perception.hpp"

namespace props {

using persona::Emotion;
using persona::FaceSample;
using persona::TimestampMs;

// Reference majority: count in (now - width, now], ties to the label whose
// latest sample sits furthest back in the buffer order.
inline Emotion reference_majority(const std::vector<FaceSample>& s, TimestampMs now, persona::DurationMs width) {
  std::map<int, int> count;
  std::map<int, std::size_t> latest;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i].t > now - width && s[i].t <= now) {
      const int k = static_cast<int>(persona::index(s[i].emotion));
      ++count[k];
      latest[k] = i;
    }
  }
  if (count.empty()) return Emotion::Neutral;
  int best = -1;
  for (auto [k, c] : count)
    if (best < 0 || c > count[best] || (c == count[best] && latest[k] > latest[best])) best = k;
  return persona::kAllEmotions[static_cast<std::size_t>(best)];
}

inline std::vector<FaceSample> random_faces(oracle::Gen& g, TimestampMs& now) {
  std::vector<FaceSample> s;
  const int n = g.integer(0, 40);
  // A small label alphabet at times makes ties frequent.
  const int alphabet = g.coin() ? 2 : 7;
  TimestampMs t = g.integer(0, 3000);
  for (int i = 0; i < n; ++i) {
    t += g.coin(0.3) ? 0 : g.integer(1, 700);
    s.push_back({t, persona::kAllEmotions[static_cast<std::size_t>(g.integer(0, alphabet - 1))]});
  }
  now = (s.empty() ? 0 : s.back().t) + g.integer(-500, 3000);
  return s;
}

// One randomized perception case covering the window, tie, fusion and
// empty-window properties.
inline std::string perception_case(oracle::Gen& g) {
  std::ostringstream err;
  TimestampMs now = 0;
  const auto width = static_cast<persona::DurationMs>(g.coin(0.8) ? persona::kDefaultWindowMs : g.integer(1, 8000));
  auto faces = random_faces(g, now);
  const Emotion got = persona::window_majority(faces, now, width);

  // Oracle agreement (majority plus recency tie-break).
  if (got != reference_majority(faces, now, width))
    err << "majority " << persona::to_string(got) << " != reference; ";

  // The winner's count is at least every other label's count.
  std::array<int, persona::kEmotionCount> count{};
  for (const auto& f : faces)
    if (f.t > now - width && f.t <= now) ++count[persona::index(f.emotion)];
  const bool empty = std::all_of(count.begin(), count.end(), [](int c) { return c == 0; });
  if (empty && got != Emotion::Neutral) err << "empty window gave " << persona::to_string(got) << "; ";
  if (!empty && count[persona::index(got)] < *std::max_element(count.begin(), count.end()))
    err << "winner is not a maximum; ";

  // Older samples never matter.
  std::vector<FaceSample> padded;
  const int old = g.integer(1, 10);
  TimestampMs t0 = now - width - g.integer(0, 5000);
  if (!faces.empty()) t0 = std::min(t0, faces.front().t);
  for (int i = 0; i < old; ++i)
    padded.push_back({t0 - (old - i), persona::kAllEmotions[static_cast<std::size_t>(g.integer(0, 6))]});
  padded.insert(padded.end(), faces.begin(), faces.end());
  if (persona::window_majority(padded, now, width) != got) err << "old samples changed the result; ";

  // Fusion.
  const Emotion e = persona::kAllEmotions[static_cast<std::size_t>(g.integer(0, 6))];
  const Emotion other = persona::kAllEmotions[static_cast<std::size_t>(g.integer(0, 6))];
  if (persona::fuse_emotions(e, e) != e) err << "fusion not idempotent; ";
  if (persona::fuse_emotions(e, std::nullopt) != e) err << "absent text changed the face; ";
  if (e != Emotion::Neutral && persona::fuse_emotions(e, other) != e) err << "text overrode a non-neutral face; ";
  if (persona::fuse_emotions(Emotion::Neutral, other) != other) err << "neutral face did not defer; ";

  // Gaze fraction defaults and range.
  std::vector<persona::GazeSample> gaze;
  int in_window = 0, mutual = 0;
  for (const auto& f : faces) {
    const bool m = g.coin();
    gaze.push_back({f.t, m});
    if (f.t > now - width && f.t <= now) ++in_window, mutual += m;
  }
  const double frac = persona::gaze_mutual_fraction(gaze, now, width);
  const double want = in_window == 0 ? 0.5 : static_cast<double>(mutual) / in_window;
  if (frac != want) err << "gaze fraction " << frac << " != " << want << "; ";
  return err.str();
}

}  // namespace props

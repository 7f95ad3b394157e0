#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "persona/emotion.hpp"
#include "persona/personality.hpp"
#include "persona/telemetry.hpp"

namespace persona {

struct SampleVector {
  std::vector<double> values;
  std::string label;
};

enum class TestMethod { Exact, NormalApprox };

std::string_view to_string(TestMethod m);

struct TestResult {
  double u = 0.0;  // min(U1, U2)
  double p_two_sided = 1.0;
  TestMethod method = TestMethod::Exact;
};

// Exact is chosen when both samples have at most this many values.
inline constexpr std::size_t kExactCutoff = 12;
// Largest pooled size the exact counter accepts when forced.
inline constexpr std::size_t kExactMaxPooled = 60;

// Two-sample Mann-Whitney U with midranks for ties.
//
// Exact: counts every split of the pooled values into groups of the observed
// sizes. The one-sided tail is taken in the direction of the observation
// (U1 <= observed when U1 <= U2, else U1 >= observed) and doubled, capped at 1.
// Normal: tie-corrected variance with a 0.5 continuity correction.
//
// Throws ValidationError for an empty sample or non-finite values, Degenerate
// when the normal variance is zero, OutOfRange when exact is forced beyond
// kExactMaxPooled.
TestResult mann_whitney_u(const SampleVector& a, const SampleVector& b,
                          std::optional<TestMethod> method = std::nullopt);

// U1: number of (a, b) pairs with a > b, ties counting one half.
double mann_whitney_u1(const std::vector<double>& a, const std::vector<double>& b);

// rows are respondents, columns items. Throws ValidationError when there are
// fewer than 2 items or respondents or the rows are ragged, ZeroTotalVariance
// when every respondent has the same total.
double cronbach_alpha(const std::vector<std::vector<double>>& items);

// Numeric CSV, one respondent per row. A first row that does not parse as
// numbers is taken as a header. Throws ParseError(file, line).
std::vector<std::vector<double>> read_items_csv(const std::filesystem::path& path);
std::vector<std::vector<double>> parse_items_csv(std::string_view text, const std::string& source = "<text>");

using EmotionCounts = std::array<long, kEmotionCount>;

// Robot emotions of every RobotTurn record.
EmotionCounts count_robot_emotions(const std::vector<TelemetryRecord>& records);

struct TrialCounts {
  std::string source;
  EmotionCounts counts{};
};

// Per-pole trials of robot-emotion counts.
class OccurrenceMatrix {
 public:
  // Trials are kept sorted by source so file order never matters.
  void add_trial(TraitPole pole, TrialCounts trial);

  bool empty() const { return trials_.empty(); }
  std::vector<TraitPole> poles() const;
  const std::vector<TrialCounts>& trials(TraitPole pole) const;
  std::vector<double> trial_counts(TraitPole pole, Emotion e) const;
  EmotionCounts totals(TraitPole pole) const;
  double mean(TraitPole pole, Emotion e) const;

  // Header `pole,emotion,mean,trials`; poles in HC LC HE LE HA LA order.
  std::string to_csv() const;

 private:
  std::map<std::size_t, std::vector<TrialCounts>> trials_;
};

// Each file is one trial. Its poles come from the personality stored in its
// RobotTurn records; a trial counts toward every active pole. Files without
// RobotTurn records are skipped. Throws ParseError(file, line).
OccurrenceMatrix emotion_occurrences(const std::vector<std::filesystem::path>& files);

// Every *.jsonl under dir (non-recursive).
std::vector<std::filesystem::path> telemetry_files(const std::filesystem::path& dir);

struct PoleComparison {
  TraitAxis axis;
  Emotion emotion;
  std::size_t n_high = 0;
  std::size_t n_low = 0;
  TestResult result;
};

// Mann-Whitney over per-trial counts of the axis' high pole against its low
// pole. Throws InsufficientTrials unless both have at least 2 trials.
PoleComparison compare_poles(const OccurrenceMatrix& m, TraitAxis axis, Emotion emotion);

// Header `axis,emotion,u,p,method,n_high,n_low`.
std::string comparison_csv(const std::vector<PoleComparison>& rows);

}  // namespace persona

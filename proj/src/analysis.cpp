#include "persona/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "persona/errors.hpp"
#include "text_util.hpp"

namespace persona {

std::string_view to_string(TestMethod m) { return m == TestMethod::Exact ? "exact" : "normal"; }

double mann_whitney_u1(const std::vector<double>& a, const std::vector<double>& b) {
  double u = 0.0;
  for (double x : a)
    for (double y : b) u += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
  return u;
}

namespace {

struct Ranked {
  std::vector<long> doubled_ranks;  // 2 * midrank, always an integer
  std::vector<long> tie_sizes;
};

Ranked doubled_midranks(const std::vector<double>& pooled) {
  const std::size_t n = pooled.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return pooled[i] < pooled[j]; });
  Ranked r;
  r.doubled_ranks.resize(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    // Positions i..j (0-based) share rank ((i+1) + (j+1)) / 2.
    const long doubled = static_cast<long>(i + j + 2);
    for (std::size_t k = i; k <= j; ++k) r.doubled_ranks[order[k]] = doubled;
    r.tie_sizes.push_back(static_cast<long>(j - i + 1));
    i = j + 1;
  }
  return r;
}

TestResult exact_test(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n1 = a.size();
  const std::size_t n2 = b.size();
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  const Ranked r = doubled_midranks(pooled);

  // Doubled U1 = doubled rank sum of `a` minus n1(n1+1).
  const long offset = static_cast<long>(n1 * (n1 + 1));
  long obs_sum = 0;
  for (std::size_t i = 0; i < n1; ++i) obs_sum += r.doubled_ranks[i];
  const long u1x2 = obs_sum - offset;
  const long nn = static_cast<long>(n1 * n2);
  const long u2x2 = 2 * nn - u1x2;

  // ways[k][s]: number of k-subsets of the pooled values with doubled rank sum s.
  const long max_sum = std::accumulate(r.doubled_ranks.begin(), r.doubled_ranks.end(), 0L);
  std::vector<std::vector<std::uint64_t>> ways(n1 + 1, std::vector<std::uint64_t>(max_sum + 1, 0));
  ways[0][0] = 1;
  for (long rank : r.doubled_ranks)
    for (std::size_t k = n1; k >= 1; --k)
      for (long s = max_sum; s >= rank; --s) ways[k][s] += ways[k - 1][s - rank];

  std::uint64_t total = 0;
  std::uint64_t tail = 0;
  const bool lower = u1x2 <= u2x2;
  for (long s = 0; s <= max_sum; ++s) {
    const std::uint64_t w = ways[n1][s];
    if (!w) continue;
    total += w;
    const long u = s - offset;
    if (lower ? u <= u1x2 : u >= u1x2) tail += w;
  }
  TestResult res;
  res.method = TestMethod::Exact;
  res.u = static_cast<double>(std::min(u1x2, u2x2)) / 2.0;
  res.p_two_sided = std::min(1.0, 2.0 * static_cast<double>(static_cast<long double>(tail) / total));
  return res;
}

TestResult normal_test(const std::vector<double>& a, const std::vector<double>& b) {
  const double n1 = static_cast<double>(a.size());
  const double n2 = static_cast<double>(b.size());
  const double n = n1 + n2;
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  const Ranked r = doubled_midranks(pooled);
  double tie_term = 0.0;
  for (long t : r.tie_sizes) tie_term += static_cast<double>(t * t * t - t);
  const double var = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (!(var > 0.0)) throw Degenerate("all pooled values are identical; normal approximation undefined");
  const double u1 = mann_whitney_u1(a, b);
  const double u = std::min(u1, n1 * n2 - u1);
  const double mu = n1 * n2 / 2.0;
  const double z = std::min(0.0, u - mu + 0.5) / std::sqrt(var);
  TestResult res;
  res.method = TestMethod::NormalApprox;
  res.u = u;
  res.p_two_sided = std::min(1.0, std::erfc(-z / std::sqrt(2.0)));  // 2 * Phi(z)
  return res;
}

void check_sample(const SampleVector& s, const char* which) {
  if (s.values.empty()) throw ValidationError(std::string("sample ") + which + " is empty");
  for (double v : s.values)
    if (!std::isfinite(v)) throw ValidationError(std::string("sample ") + which + " has a non-finite value");
}

}  // namespace

TestResult mann_whitney_u(const SampleVector& a, const SampleVector& b, std::optional<TestMethod> method) {
  check_sample(a, "a");
  check_sample(b, "b");
  const TestMethod m = method.value_or(a.values.size() <= kExactCutoff && b.values.size() <= kExactCutoff
                                           ? TestMethod::Exact
                                           : TestMethod::NormalApprox);
  if (m == TestMethod::Exact) {
    if (a.values.size() + b.values.size() > kExactMaxPooled)
      throw OutOfRange("exact Mann-Whitney supports at most " + std::to_string(kExactMaxPooled) + " values");
    return exact_test(a.values, b.values);
  }
  return normal_test(a.values, b.values);
}

// ---------------------------------------------------------------- alpha

namespace {

double sample_variance(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / (n - 1.0);
}

}  // namespace

double cronbach_alpha(const std::vector<std::vector<double>>& items) {
  const std::size_t n = items.size();
  if (n < 2) throw ValidationError("Cronbach's alpha needs at least 2 respondents");
  const std::size_t k = items.front().size();
  if (k < 2) throw ValidationError("Cronbach's alpha needs at least 2 items");
  for (const auto& row : items) {
    if (row.size() != k) throw ValidationError("every respondent must answer every item");
    for (double v : row)
      if (!std::isfinite(v)) throw ValidationError("item scores must be finite");
  }
  double item_var = 0.0;
  std::vector<double> column(n);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < n; ++i) column[i] = items[i][j];
    item_var += sample_variance(column);
  }
  std::vector<double> totals(n);
  for (std::size_t i = 0; i < n; ++i) totals[i] = std::accumulate(items[i].begin(), items[i].end(), 0.0);
  const double total_var = sample_variance(totals);
  // Relative check so a rescaled constant-total matrix still counts as degenerate.
  if (!(total_var > 1e-12 * std::max(1.0, item_var))) throw ZeroTotalVariance();
  const double kk = static_cast<double>(k);
  return kk / (kk - 1.0) * (1.0 - item_var / total_var);
}

std::vector<std::vector<double>> parse_items_csv(std::string_view text, const std::string& source) {
  std::vector<std::vector<double>> rows;
  int lineno = 0;
  bool first = true;
  for (auto raw : detail::split_lines(text)) {
    ++lineno;
    auto line = detail::trim(raw);
    if (line.empty()) continue;
    std::vector<double> row;
    bool numeric = true;
    std::size_t start = 0;
    while (true) {
      auto comma = line.find(',', start);
      auto cell = detail::trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      auto v = detail::parse_double(cell);
      if (!v) {
        numeric = false;
        break;
      }
      row.push_back(*v);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    const bool header = first && !numeric;
    first = false;
    if (header) continue;
    if (!numeric) throw ParseError(source, lineno, "expected comma-separated numbers");
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError(source, lineno, "expected " + std::to_string(rows.front().size()) + " columns");
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::vector<double>> read_items_csv(const std::filesystem::path& path) {
  std::string text;
  try {
    text = detail::read_file(path.string());
  } catch (const ConfigError& e) {
    throw ParseError(path.string(), 0, e.what());
  }
  return parse_items_csv(text, path.string());
}

// ---------------------------------------------------------------- occurrences

EmotionCounts count_robot_emotions(const std::vector<TelemetryRecord>& records) {
  EmotionCounts c{};
  for (const auto& r : records) {
    if (r.kind != RecordKind::RobotTurn) continue;
    auto it = r.payload.find("robot_emotion");
    if (it == r.payload.end() || !it->is_string()) continue;
    if (auto e = parse_emotion(it->get<std::string>())) ++c[index(*e)];
  }
  return c;
}

void OccurrenceMatrix::add_trial(TraitPole pole, TrialCounts trial) {
  auto& v = trials_[index(pole)];
  auto pos = std::upper_bound(v.begin(), v.end(), trial.source,
                              [](const std::string& s, const TrialCounts& t) { return s < t.source; });
  v.insert(pos, std::move(trial));
}

std::vector<TraitPole> OccurrenceMatrix::poles() const {
  std::vector<TraitPole> out;
  for (const auto& [i, _] : trials_) out.push_back(kAllPoles[i]);
  return out;
}

const std::vector<TrialCounts>& OccurrenceMatrix::trials(TraitPole pole) const {
  static const std::vector<TrialCounts> kNone;
  auto it = trials_.find(index(pole));
  return it == trials_.end() ? kNone : it->second;
}

std::vector<double> OccurrenceMatrix::trial_counts(TraitPole pole, Emotion e) const {
  std::vector<double> out;
  for (const auto& t : trials(pole)) out.push_back(static_cast<double>(t.counts[index(e)]));
  return out;
}

EmotionCounts OccurrenceMatrix::totals(TraitPole pole) const {
  EmotionCounts c{};
  for (const auto& t : trials(pole))
    for (std::size_t i = 0; i < kEmotionCount; ++i) c[i] += t.counts[i];
  return c;
}

double OccurrenceMatrix::mean(TraitPole pole, Emotion e) const {
  const auto& t = trials(pole);
  if (t.empty()) return 0.0;
  return static_cast<double>(totals(pole)[index(e)]) / static_cast<double>(t.size());
}

std::string OccurrenceMatrix::to_csv() const {
  std::ostringstream out;
  out << "pole,emotion,mean,trials\n";
  char buf[64];
  for (const auto& [i, trials] : trials_) {
    const TraitPole pole = kAllPoles[i];
    for (Emotion e : kAllEmotions) {
      std::snprintf(buf, sizeof buf, "%.4f", mean(pole, e));
      out << to_string(pole) << ',' << to_string(e) << ',' << buf << ',' << trials.size() << '\n';
    }
  }
  return out.str();
}

OccurrenceMatrix emotion_occurrences(const std::vector<std::filesystem::path>& files) {
  OccurrenceMatrix m;
  for (const auto& f : files) {
    const auto records = read_telemetry(f);
    std::optional<PersonalityVector> p;
    for (const auto& r : records) {
      if (r.kind != RecordKind::RobotTurn) continue;
      try {
        p = make_personality(r.payload.at("wc").get<double>(), r.payload.at("we").get<double>(),
                             r.payload.at("wa").get<double>());
      } catch (const std::exception& e) {
        throw ParseError(f.string(), 0, std::string("RobotTurn without a valid personality: ") + e.what());
      }
      break;
    }
    if (!p) continue;
    const EmotionCounts c = count_robot_emotions(records);
    for (auto pole : active_poles(*p)) m.add_trial(pole, TrialCounts{f.filename().string(), c});
  }
  return m;
}

std::vector<std::filesystem::path> telemetry_files(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw ConfigError("not a directory: " + dir.string());
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") out.push_back(entry.path());
  std::sort(out.begin(), out.end());
  return out;
}

PoleComparison compare_poles(const OccurrenceMatrix& m, TraitAxis axis, Emotion emotion) {
  const TraitPole hi{axis, Polarity::High};
  const TraitPole lo{axis, Polarity::Low};
  const auto a = m.trial_counts(hi, emotion);
  const auto b = m.trial_counts(lo, emotion);
  if (a.size() < 2 || b.size() < 2)
    throw InsufficientTrials("need at least 2 trials per pole, have " + std::to_string(a.size()) + " " +
                             std::string(to_string(hi)) + " and " + std::to_string(b.size()) + " " +
                             std::string(to_string(lo)));
  PoleComparison c{axis, emotion, a.size(), b.size(), {}};
  c.result = mann_whitney_u({a, std::string(to_string(hi))}, {b, std::string(to_string(lo))});
  return c;
}

std::string comparison_csv(const std::vector<PoleComparison>& rows) {
  std::ostringstream out;
  out << "axis,emotion,u,p,method,n_high,n_low\n";
  char buf[96];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.1f,%.6f", r.result.u, r.result.p_two_sided);
    out << to_string(r.axis) << ',' << to_string(r.emotion) << ',' << buf << ',' << to_string(r.result.method)
        << ',' << r.n_high << ',' << r.n_low << '\n';
  }
  return out.str();
}

}  // namespace persona

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "persona/action.hpp"
#include "persona/memory.hpp"
#include "persona/perception.hpp"
#include "persona/personality.hpp"

namespace persona {

// Comfort dynamics and memory constants. All of them are configuration; the
// defaults below are what ships in data/dynamics.cfg.
//
//   initial 0.8          starting fluent value
//   theta 0.3            comfort threshold (numeric action precondition)
//   eta 0.1              stimulus gain
//   margin 0.05          replan / discomfort margin above theta
//   beta 0.2             episodic reinforcement scale
//   delta 0.05           prediction-error comfort step
//   stim <pole> <emotion> <v>
//   gaze <pole> <gain>   gaze term = 2 * (mutual_fraction - 0.5) * gain
struct Dynamics {
  double initial = 0.8;
  double theta = 0.3;
  double eta = 0.1;
  double margin = 0.05;
  double beta = 0.2;
  double delta = 0.05;
  std::array<std::array<double, kEmotionCount>, 6> stim{};
  std::array<double, 6> gaze_gain{};

  Dynamics();
  static Dynamics load(const std::filesystem::path& path);
  static Dynamics parse(std::string_view text);

  double stim_sensitivity(TraitPole pole, Emotion e) const { return stim[index(pole)][index(e)]; }
  double gaze_term(TraitPole pole, double mutual_fraction) const {
    return 2.0 * (mutual_fraction - 0.5) * gaze_gain[index(pole)];
  }
  EpisodicParams episodic() const { return {beta, delta}; }
};

// One comfort fluent per trait axis, each kept in [0, 1].
class ComfortabilityState {
 public:
  ComfortabilityState() = default;
  ComfortabilityState(double fc, double fe, double fa, double theta);

  double fluent(TraitAxis a) const { return f_[index(a)]; }
  double fc() const { return f_[0]; }
  double fe() const { return f_[1]; }
  double fa() const { return f_[2]; }
  double theta() const { return theta_; }

  // Stores clamp(v, 0, 1).
  void set(TraitAxis a, double v);
  void add(TraitAxis a, double dv) { set(a, fluent(a) + dv); }

  friend bool operator==(const ComfortabilityState&, const ComfortabilityState&) = default;

 private:
  std::array<double, 3> f_{0.8, 0.8, 0.8};
  double theta_ = 0.3;
};

double clamp01(double v);

// True iff any active-axis fluent is below theta + margin.
bool is_uncomfortable(const ComfortabilityState& c, const PersonalityVector& p, double margin);

struct FactLiteral {
  Fact fact;
  bool negated = false;
};

struct ActionSchema {
  ActionKind kind = ActionKind::StaySilent;
  std::vector<FactLiteral> pre;
  std::vector<Fact> add;
  std::vector<Fact> del;
  std::array<double, 6> comfort_delta{};  // per pole, in [-1, 1]
  std::array<double, 6> base_reward{};    // per pole
  OutcomeObservation expected;
  int line = 0;  // where the block starts in its source

  double delta(TraitPole p) const { return comfort_delta[index(p)]; }
  double reward(TraitPole p) const { return base_reward[index(p)]; }
};

struct DomainSpec {
  std::vector<ActionSchema> actions;

  const ActionSchema* find(ActionKind kind) const;
};

// Domain DSL. Clauses end at ';', a newline or the closing brace:
//
//   action AskQuestion {
//     pre (robot greeted user) !(robot said farewell)
//     add (conversation has topic)
//     del (robot idle now)
//     delta HE +0.10 LE -0.10      # per-pole comfort deltas
//     delta_a 0.05                 # shorthand: HA +0.05, LA -0.05
//     reward HE 0.8 LE 0.1
//     expect happiness mutual
//   }
//
// Throws SyntaxError(line, col) or ValidationError.
DomainSpec parse_domain(std::string_view text);
DomainSpec load_domain(const std::filesystem::path& path);

struct WorldState {
  FactSet facts;
  ComfortabilityState comfort;
  int turn_index = 0;
};

WorldState initial_world(const Dynamics& dyn, FactSet facts = {});

// Symbolic preconditions hold and, for every active axis, the post-action
// fluent (clamped) stays >= theta. Inactive axes impose no numeric check.
bool applicable(const ActionSchema& a, const WorldState& s, const PersonalityVector& p);

// Throws NotApplicable when !applicable(a, s, p).
WorldState apply(const ActionSchema& a, const WorldState& s, const PersonalityVector& p);

// Episodic bonus per (action kind, pole), frozen for one planning call.
struct ReinforcementTable {
  std::array<std::array<double, 6>, kActionKindCount> bonus{};

  double at(ActionKind k, TraitPole p) const { return bonus[index(k)][index(p)]; }
  static ReinforcementTable from(const EpisodicMemory& memory);
};

// Sum over active poles (C, E, A order) of |w| * (base_reward + bonus).
double step_reward(const ActionSchema& a, const PersonalityVector& p, const ReinforcementTable& bonus = {});

struct PlanStep {
  AbstractAction action;
  ComfortabilityState predicted_comfort;
  OutcomeObservation predicted_outcome;
  double reward = 0.0;
};

struct Plan {
  std::vector<PlanStep> steps;
  double total_reward = 0.0;

  bool empty() const { return steps.empty(); }
  std::vector<ActionKind> kinds() const;
};

// Best-first branch and bound over action sequences. A candidate sequence
// either reaches `horizon` or ends where no action is applicable. Returns the
// candidate with the largest total reward (left-to-right sum of step rewards);
// equal totals go to the lexicographically smallest sequence of action-kind
// names, so a strict prefix wins over its extensions. `seed` is unused.
Plan plan(const DomainSpec& d, const WorldState& s, const PersonalityVector& p, int horizon,
          std::uint64_t seed = 0, const ReinforcementTable& bonus = {});

// Applies the stimulus response of each active pole:
// f += eta * stim(pole, fused) + eta * gaze_term(pole, gaze fraction).
ComfortabilityState stimulus_update(const ComfortabilityState& c, const PerceptSnapshot& snapshot,
                                    const PersonalityVector& p, const Dynamics& dyn = Dynamics{});

// Adds `dv` to every active-axis fluent (clamped).
ComfortabilityState shift_active(const ComfortabilityState& c, const PersonalityVector& p, double dv);

// Any active fluent below theta + margin, or nothing left of the current plan.
bool needs_replan(const WorldState& s, const PersonalityVector& p, std::size_t remaining_steps,
                  double margin = 0.05);

}  // namespace persona

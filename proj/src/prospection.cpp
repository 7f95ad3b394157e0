#include "persona/prospection.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

#include "persona/errors.hpp"
#include "text_util.hpp"

namespace persona {

// ---------------------------------------------------------------- dynamics

Dynamics::Dynamics() {
  auto s = [this](std::string_view pole, Emotion e, double v) { stim[index(*parse_pole(pole))][index(e)] = v; };
  s("HE", Emotion::Happiness, 1.0);
  s("HE", Emotion::Surprise, 1.0);
  s("HE", Emotion::Neutral, -0.5);
  s("HA", Emotion::Happiness, 1.0);
  s("HA", Emotion::Anger, -1.0);
  s("HA", Emotion::Sadness, -1.0);
  s("LA", Emotion::Anger, 1.0);
  s("LA", Emotion::Disgust, 1.0);
  s("LA", Emotion::Happiness, -0.5);
  s("HC", Emotion::Happiness, 0.25);
  s("HC", Emotion::Anger, -0.25);
  s("HC", Emotion::Disgust, -0.25);
  s("LC", Emotion::Surprise, 0.25);
  s("LC", Emotion::Happiness, 0.25);
  s("LC", Emotion::Neutral, -0.25);
  gaze_gain[index(*parse_pole("HE"))] = 0.5;
  gaze_gain[index(*parse_pole("LE"))] = -0.25;
}

Dynamics Dynamics::parse(std::string_view text) {
  Dynamics d;
  // A file that mentions any stim/gaze row replaces the whole table.
  bool table_reset = false;
  auto reset = [&] {
    if (table_reset) return;
    table_reset = true;
    for (auto& row : d.stim) row.fill(0.0);
    d.gaze_gain.fill(0.0);
  };
  int lineno = 0;
  for (auto raw : detail::split_lines(text)) {
    ++lineno;
    auto tok = detail::split_ws(detail::strip_comment(raw));
    if (tok.empty()) continue;
    auto num = [&](std::size_t i) {
      auto v = detail::parse_double(tok[i]);
      if (!v || !std::isfinite(*v))
        throw SyntaxError(lineno, static_cast<int>(tok[i].data() - raw.data()) + 1, "expected a number");
      return *v;
    };
    const auto key = detail::lower(tok[0]);
    if (tok.size() == 2 && key == "initial") d.initial = num(1);
    else if (tok.size() == 2 && key == "theta") d.theta = num(1);
    else if (tok.size() == 2 && key == "eta") d.eta = num(1);
    else if (tok.size() == 2 && key == "margin") d.margin = num(1);
    else if (tok.size() == 2 && key == "beta") d.beta = num(1);
    else if (tok.size() == 2 && key == "delta") d.delta = num(1);
    else if (tok.size() == 4 && key == "stim") {
      auto pole = parse_pole(tok[1]);
      auto e = parse_emotion(tok[2]);
      if (!pole || !e) throw SyntaxError(lineno, 1, "bad stim row");
      reset();
      d.stim[index(*pole)][index(*e)] = num(3);
    } else if (tok.size() == 3 && key == "gaze") {
      auto pole = parse_pole(tok[1]);
      if (!pole) throw SyntaxError(lineno, 1, "bad gaze row");
      reset();
      d.gaze_gain[index(*pole)] = num(2);
    } else {
      throw SyntaxError(lineno, 1, "unknown dynamics entry '" + std::string(tok[0]) + "'");
    }
  }
  if (!(d.theta > 0.0 && d.theta < 1.0)) throw ValidationError("theta must lie in (0, 1)");
  if (!(d.initial >= 0.0 && d.initial <= 1.0)) throw ValidationError("initial fluent must lie in [0, 1]");
  if (d.margin < 0.0 || d.eta < 0.0 || d.beta < 0.0 || d.delta < 0.0)
    throw ValidationError("gains and margins must be non-negative");
  return d;
}

Dynamics Dynamics::load(const std::filesystem::path& path) { return parse(detail::read_file(path.string())); }

// ---------------------------------------------------------------- comfort

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

ComfortabilityState::ComfortabilityState(double fc, double fe, double fa, double theta)
    : f_{clamp01(fc), clamp01(fe), clamp01(fa)}, theta_(theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw OutOfRange("theta must lie in (0, 1)");
}

void ComfortabilityState::set(TraitAxis a, double v) { f_[index(a)] = clamp01(v); }

bool is_uncomfortable(const ComfortabilityState& c, const PersonalityVector& p, double margin) {
  for (auto a : kAllAxes)
    if (p.is_active(a) && c.fluent(a) < c.theta() + margin) return true;
  return false;
}

// ---------------------------------------------------------------- domain DSL

const ActionSchema* DomainSpec::find(ActionKind kind) const {
  for (const auto& a : actions)
    if (a.kind == kind) return &a;
  return nullptr;
}

namespace {

struct Token {
  enum Kind { Word, LBrace, RBrace, LParen, RParen, Bang, Semi, Newline, End } kind;
  std::string text;
  int line;
  int col;
};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto single = [&](Token::Kind k) {
    out.push_back({k, std::string(1, src[i]), line, col});
    ++i;
    ++col;
  };
  while (i < src.size()) {
    const char c = src[i];
    if (c == '\n') {
      out.push_back({Token::Newline, "\n", line, col});
      ++i;
      ++line;
      col = 1;
    } else if (c == '#') {
      while (i < src.size() && src[i] != '\n') ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      ++col;
    } else if (c == '{') {
      single(Token::LBrace);
    } else if (c == '}') {
      single(Token::RBrace);
    } else if (c == '(') {
      single(Token::LParen);
    } else if (c == ')') {
      single(Token::RParen);
    } else if (c == '!') {
      single(Token::Bang);
    } else if (c == ';') {
      single(Token::Semi);
    } else {
      const int start_col = col;
      std::size_t j = i;
      while (j < src.size() && !std::isspace(static_cast<unsigned char>(src[j])) &&
             std::string_view("{}()!;#").find(src[j]) == std::string_view::npos)
        ++j;
      out.push_back({Token::Word, std::string(src.substr(i, j - i)), line, start_col});
      col += static_cast<int>(j - i);
      i = j;
    }
  }
  out.push_back({Token::End, "", line, col});
  return out;
}

class DomainParser {
 public:
  explicit DomainParser(std::string_view src) : toks_(lex(src)) {}

  DomainSpec run() {
    DomainSpec d;
    while (true) {
      skip_separators();
      const Token& t = peek();
      if (t.kind == Token::End) break;
      if (t.kind == Token::RBrace) throw SyntaxError(t.line, t.col, "unbalanced '}'");
      if (t.kind != Token::Word || t.text != "action")
        throw SyntaxError(t.line, t.col, "expected 'action', got '" + t.text + "'");
      d.actions.push_back(action_block());
    }
    for (std::size_t i = 0; i < d.actions.size(); ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (d.actions[i].kind == d.actions[j].kind)
          throw ValidationError("line " + std::to_string(d.actions[i].line) + ": duplicate action " +
                                std::string(to_string(d.actions[i].kind)));
    return d;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  void skip_separators() {
    while (peek().kind == Token::Newline || peek().kind == Token::Semi) ++pos_;
  }
  void skip_newlines() {
    while (peek().kind == Token::Newline) ++pos_;
  }

  ActionSchema action_block() {
    const Token& kw = next();
    ActionSchema a;
    a.line = kw.line;
    const Token& kind_tok = next();
    if (kind_tok.kind != Token::Word) throw SyntaxError(kind_tok.line, kind_tok.col, "expected action kind");
    auto kind = parse_action_kind(kind_tok.text);
    if (!kind) throw ValidationError("line " + std::to_string(kind_tok.line) + ": unknown action kind '" + kind_tok.text + "'");
    a.kind = *kind;
    skip_newlines();
    const Token open = next();
    if (open.kind != Token::LBrace) throw SyntaxError(open.line, open.col, "expected '{'");
    while (true) {
      skip_separators();
      const Token& t = peek();
      if (t.kind == Token::RBrace) {
        ++pos_;
        break;
      }
      if (t.kind == Token::End || (t.kind == Token::Word && t.text == "action"))
        throw SyntaxError(open.line, open.col, "unbalanced '{': block is never closed");
      if (t.kind != Token::Word) throw SyntaxError(t.line, t.col, "unexpected '" + t.text + "'");
      clause(a);
    }
    return a;
  }

  // Tokens up to (not including) the clause terminator.
  std::vector<Token> clause_args() {
    std::vector<Token> args;
    while (true) {
      const Token& t = peek();
      if (t.kind == Token::Newline || t.kind == Token::Semi || t.kind == Token::RBrace || t.kind == Token::End)
        break;
      if (t.kind == Token::LBrace) throw SyntaxError(t.line, t.col, "unbalanced '{'");
      args.push_back(next());
    }
    return args;
  }

  static double number(const Token& t) {
    auto v = detail::parse_double(t.text);
    if (t.kind != Token::Word || !v || !std::isfinite(*v))
      throw SyntaxError(t.line, t.col, "expected a number, got '" + t.text + "'");
    return *v;
  }

  static TraitPole pole(const Token& t) {
    auto p = t.kind == Token::Word ? parse_pole(t.text) : std::nullopt;
    if (!p) throw SyntaxError(t.line, t.col, "expected a pole (HC LC HE LE HA LA), got '" + t.text + "'");
    return *p;
  }

  static double checked_delta(const Token& t) {
    const double v = number(t);
    if (v < -1.0 || v > 1.0)
      throw ValidationError("line " + std::to_string(t.line) + ": comfort delta " + t.text + " outside [-1, 1]");
    return v;
  }

  static Fact fact(const std::vector<Token>& args, std::size_t& i) {
    auto at = [&](std::size_t k) -> const Token& { return args[std::min(k, args.size() - 1)]; };
    if (i >= args.size() || args[i].kind != Token::LParen)
      throw SyntaxError(at(i).line, at(i).col, "expected '(' to start a fact");
    if (i + 4 >= args.size() || args[i + 4].kind != Token::RParen)
      throw SyntaxError(at(i).line, at(i).col, "fact must be '(subject predicate object)'");
    for (std::size_t k = i + 1; k <= i + 3; ++k)
      if (args[k].kind != Token::Word) throw SyntaxError(args[k].line, args[k].col, "expected a symbol");
    Fact f = make_fact(args[i + 1].text, args[i + 2].text, args[i + 3].text);
    i += 5;
    return f;
  }

  void clause(ActionSchema& a) {
    const Token head = next();
    const std::vector<Token> args = clause_args();
    const std::string& kw = head.text;
    if (kw == "pre") {
      for (std::size_t i = 0; i < args.size();) {
        bool negated = false;
        if (args[i].kind == Token::Bang || (args[i].kind == Token::Word && args[i].text == "not")) {
          negated = true;
          ++i;
        }
        a.pre.push_back({fact(args, i), negated});
      }
    } else if (kw == "add" || kw == "del") {
      auto& dst = kw == "add" ? a.add : a.del;
      for (std::size_t i = 0; i < args.size();) dst.push_back(fact(args, i));
    } else if (kw == "delta" || kw == "reward") {
      if (args.size() % 2 != 0 || args.empty())
        throw SyntaxError(head.line, head.col, "'" + kw + "' takes <pole> <value> pairs");
      for (std::size_t i = 0; i < args.size(); i += 2) {
        const TraitPole p = pole(args[i]);
        if (kw == "delta")
          a.comfort_delta[index(p)] = checked_delta(args[i + 1]);
        else
          a.base_reward[index(p)] = number(args[i + 1]);
      }
    } else if (kw == "delta_c" || kw == "delta_e" || kw == "delta_a") {
      if (args.size() != 1) throw SyntaxError(head.line, head.col, "'" + kw + "' takes one value");
      const double v = checked_delta(args[0]);
      const TraitAxis axis = *parse_axis(kw.substr(6));
      a.comfort_delta[index(TraitPole{axis, Polarity::High})] = v;
      a.comfort_delta[index(TraitPole{axis, Polarity::Low})] = -v;
    } else if (kw == "expect") {
      if (args.size() != 2) throw SyntaxError(head.line, head.col, "'expect' takes <emotion> <mutual|averted>");
      auto e = parse_emotion(args[0].text);
      if (!e) throw SyntaxError(args[0].line, args[0].col, "unknown emotion '" + args[0].text + "'");
      const std::string g = detail::lower(args[1].text);
      if (g != "mutual" && g != "averted")
        throw SyntaxError(args[1].line, args[1].col, "expected 'mutual' or 'averted'");
      a.expected = {*e, g == "mutual"};
    } else {
      throw SyntaxError(head.line, head.col, "unknown clause '" + kw + "'");
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

DomainSpec parse_domain(std::string_view text) { return DomainParser(text).run(); }

DomainSpec load_domain(const std::filesystem::path& path) {
  return parse_domain(detail::read_file(path.string()));
}

// ---------------------------------------------------------------- state

WorldState initial_world(const Dynamics& dyn, FactSet facts) {
  return WorldState{std::move(facts), ComfortabilityState(dyn.initial, dyn.initial, dyn.initial, dyn.theta), 0};
}

namespace {

bool symbolic_ok(const ActionSchema& a, const FactSet& facts) {
  for (const auto& lit : a.pre)
    if ((facts.count(lit.fact) != 0) == lit.negated) return false;
  return true;
}

}  // namespace

bool applicable(const ActionSchema& a, const WorldState& s, const PersonalityVector& p) {
  if (!symbolic_ok(a, s.facts)) return false;
  for (auto axis : kAllAxes) {
    auto pole = p.pole(axis);
    if (!pole) continue;
    if (clamp01(s.comfort.fluent(axis) + a.delta(*pole)) < s.comfort.theta()) return false;
  }
  return true;
}

WorldState apply(const ActionSchema& a, const WorldState& s, const PersonalityVector& p) {
  if (!applicable(a, s, p))
    throw NotApplicable(std::string(to_string(a.kind)) + " is not applicable in this state");
  WorldState out = s;
  for (const auto& f : a.del) out.facts.erase(f);
  for (const auto& f : a.add) out.facts.insert(f);
  for (auto axis : kAllAxes)
    if (auto pole = p.pole(axis)) out.comfort.add(axis, a.delta(*pole));
  ++out.turn_index;
  return out;
}

// ---------------------------------------------------------------- planning

ReinforcementTable ReinforcementTable::from(const EpisodicMemory& memory) {
  ReinforcementTable t;
  for (auto k : kAllActionKinds)
    for (auto p : kAllPoles) t.bonus[index(k)][index(p)] = memory.reinforcement_bonus(k, {p});
  return t;
}

double step_reward(const ActionSchema& a, const PersonalityVector& p, const ReinforcementTable& bonus) {
  double r = 0.0;
  for (auto axis : kAllAxes) {
    auto pole = p.pole(axis);
    if (!pole) continue;
    r += std::fabs(p.weight(axis)) * (a.reward(*pole) + bonus.at(a.kind, *pole));
  }
  return r;
}

std::vector<ActionKind> Plan::kinds() const {
  std::vector<ActionKind> out;
  for (const auto& s : steps) out.push_back(s.action.kind);
  return out;
}

namespace {

struct SearchNode {
  std::vector<std::size_t> seq;  // indices into the domain's action list
  std::vector<int> names;        // name ranks, for lexicographic tie-breaks
  WorldState state;
  double g = 0.0;
  double bound = 0.0;
};

// Upper bounds are sums of doubles too; allow for rounding before pruning.
double slack(double v) { return 1e-9 * (1.0 + std::fabs(v)); }

}  // namespace

Plan plan(const DomainSpec& d, const WorldState& s, const PersonalityVector& p, int horizon,
          std::uint64_t /*seed*/, const ReinforcementTable& bonus) {
  if (horizon < 1) throw OutOfRange("planning horizon must be >= 1");
  const std::size_t n = d.actions.size();
  if (n == 0) return {};

  std::vector<double> reward(n);
  double best_step = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    reward[i] = step_reward(d.actions[i], p, bonus);
    best_step = std::max(best_step, reward[i]);
  }
  std::vector<std::size_t> by_name(n);
  for (std::size_t i = 0; i < n; ++i) by_name[i] = i;
  std::sort(by_name.begin(), by_name.end(), [&](std::size_t x, std::size_t y) {
    return to_string(d.actions[x].kind) < to_string(d.actions[y].kind);
  });
  std::vector<int> name_rank(n);
  for (std::size_t r = 0; r < n; ++r) name_rank[by_name[r]] = static_cast<int>(r);

  auto worse = [](const SearchNode& a, const SearchNode& b) {
    if (a.bound != b.bound) return a.bound < b.bound;
    return b.names < a.names;
  };
  std::priority_queue<SearchNode, std::vector<SearchNode>, decltype(worse)> open(worse);
  open.push(SearchNode{{}, {}, s, 0.0, horizon * best_step});

  std::optional<SearchNode> best;
  while (!open.empty()) {
    SearchNode node = open.top();
    open.pop();
    if (best && node.bound + slack(node.bound) < best->g) break;

    bool expanded = false;
    if (static_cast<int>(node.seq.size()) < horizon) {
      const int remaining_after = horizon - static_cast<int>(node.seq.size()) - 1;
      for (std::size_t i = 0; i < n; ++i) {
        const ActionSchema& a = d.actions[i];
        if (!applicable(a, node.state, p)) continue;
        expanded = true;
        SearchNode child{node.seq, node.names, apply(a, node.state, p), node.g + reward[i], 0.0};
        child.seq.push_back(i);
        child.names.push_back(name_rank[i]);
        child.bound = child.g + remaining_after * best_step;
        open.push(std::move(child));
      }
    }
    if (expanded) continue;
    if (!best || node.g > best->g || (node.g == best->g && node.names < best->names)) best = std::move(node);
  }

  Plan out;
  if (!best) return out;
  WorldState cur = s;
  for (std::size_t i : best->seq) {
    const ActionSchema& a = d.actions[i];
    cur = apply(a, cur, p);
    PlanStep step;
    step.action = AbstractAction{std::string(to_string(a.kind)), a.kind, std::nullopt};
    step.predicted_comfort = cur.comfort;
    step.predicted_outcome = a.expected;
    step.reward = reward[i];
    out.steps.push_back(std::move(step));
  }
  out.total_reward = best->g;
  return out;
}

// ---------------------------------------------------------------- allostasis

ComfortabilityState stimulus_update(const ComfortabilityState& c, const PerceptSnapshot& snapshot,
                                    const PersonalityVector& p, const Dynamics& dyn) {
  ComfortabilityState out = c;
  for (auto axis : kAllAxes) {
    auto pole = p.pole(axis);
    if (!pole) continue;
    const double dv = dyn.eta * dyn.stim_sensitivity(*pole, snapshot.fused_emotion) +
                      dyn.eta * dyn.gaze_term(*pole, snapshot.gaze_mutual_fraction);
    out.add(axis, dv);
  }
  return out;
}

ComfortabilityState shift_active(const ComfortabilityState& c, const PersonalityVector& p, double dv) {
  ComfortabilityState out = c;
  for (auto axis : kAllAxes)
    if (p.is_active(axis)) out.add(axis, dv);
  return out;
}

bool needs_replan(const WorldState& s, const PersonalityVector& p, std::size_t remaining_steps, double margin) {
  return remaining_steps == 0 || is_uncomfortable(s.comfort, p, margin);
}

}  // namespace persona

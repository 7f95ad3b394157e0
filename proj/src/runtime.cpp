#include "persona/runtime.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "persona/errors.hpp"
#include "text_util.hpp"

namespace persona {

// ---------------------------------------------------------------- config

void SessionConfig::validate() const {
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  if (session_duration <= 0) throw ConfigError("session_duration_ms must be > 0");
  if (silence_timeout <= 0) throw ConfigError("silence_timeout_ms must be > 0");
}

SessionConfig SessionConfig::parse(std::string_view text, const std::filesystem::path& base_dir) {
  SessionConfig cfg;
  double w[3] = {0.0, 0.0, 0.0};
  int lineno = 0;
  for (auto raw : detail::split_lines(text)) {
    ++lineno;
    auto line = detail::trim(detail::strip_comment(raw));
    if (line.empty()) continue;
    std::string_view key;
    std::string_view value;
    if (auto eq = line.find('='); eq != std::string_view::npos) {
      key = detail::trim(line.substr(0, eq));
      value = detail::trim(line.substr(eq + 1));
    } else {
      auto tok = detail::split_ws(line);
      if (tok.size() != 2) throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
      key = tok[0];
      value = tok[1];
    }
    const std::string k = detail::lower(key);
    const std::string where = "config line " + std::to_string(lineno) + ": ";
    auto real = [&] {
      auto v = detail::parse_double(value);
      if (!v) throw ConfigError(where + "'" + k + "' expects a number");
      return *v;
    };
    auto integer = [&] {
      auto v = detail::parse_int(value);
      if (!v) throw ConfigError(where + "'" + k + "' expects an integer");
      return *v;
    };
    auto path = [&] {
      std::filesystem::path p{std::string(value)};
      return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    };
    if (k == "wc") w[0] = real();
    else if (k == "we") w[1] = real();
    else if (k == "wa") w[2] = real();
    else if (k == "seed") cfg.seed = static_cast<std::uint64_t>(integer());
    else if (k == "horizon") cfg.horizon = static_cast<int>(integer());
    else if (k == "session_duration_ms" || k == "session_duration") cfg.session_duration = integer();
    else if (k == "silence_timeout_ms" || k == "silence_timeout") cfg.silence_timeout = integer();
    else if (k == "domain") cfg.domain_path = path();
    else if (k == "behavior_table") cfg.behavior_path = path();
    else if (k == "emotion_rules") cfg.rules_path = path();
    else if (k == "sensitivity") cfg.sensitivity_path = path();
    else if (k == "dynamics") cfg.dynamics_path = path();
    else if (k == "lexicon") cfg.lexicon_path = path();
    else if (k == "facts") cfg.facts_path = path();
    else throw ConfigError(where + "unknown key '" + std::string(key) + "'");
  }
  try {
    cfg.personality = make_personality(w[0], w[1], w[2]);
  } catch (const OutOfRange& e) {
    throw ConfigError(e.what());
  }
  cfg.validate();
  return cfg;
}

SessionConfig SessionConfig::load(const std::filesystem::path& path) {
  return parse(detail::read_file(path.string()), path.parent_path());
}

std::shared_ptr<const AgentResources> AgentResources::load(const SessionConfig& cfg) {
  cfg.validate();
  auto res = std::make_shared<AgentResources>();
  auto guarded = [](const std::filesystem::path& p, const char* what, auto&& fn) {
    try {
      fn();
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(std::string(what) + " " + p.string() + ": " + e.what());
    }
  };
  guarded(cfg.domain_path, "domain", [&] {
    res->domain = cfg.domain_path.empty() ? parse_domain(shipped_domain_text()) : load_domain(cfg.domain_path);
  });
  guarded(cfg.behavior_path, "behavior table", [&] {
    if (!cfg.behavior_path.empty()) res->behavior = BehaviorTable::load(cfg.behavior_path);
  });
  guarded(cfg.rules_path, "emotion rules", [&] {
    if (!cfg.rules_path.empty()) res->rules = RulePolicyTable::load(cfg.rules_path);
  });
  guarded(cfg.sensitivity_path, "sensitivity", [&] {
    if (!cfg.sensitivity_path.empty()) res->sensitivity = SensitivityTable::load(cfg.sensitivity_path);
  });
  guarded(cfg.dynamics_path, "dynamics", [&] {
    if (!cfg.dynamics_path.empty()) res->dynamics = Dynamics::load(cfg.dynamics_path);
  });
  guarded(cfg.lexicon_path, "lexicon", [&] {
    res->lexicon = cfg.lexicon_path.empty() ? LexiconSentiment::parse(shipped_lexicon_text())
                                            : LexiconSentiment::load(cfg.lexicon_path);
  });
  guarded(cfg.facts_path, "facts", [&] {
    res->facts = cfg.facts_path.empty() ? SemanticMemory::parse(shipped_facts_text())
                                        : SemanticMemory::load(cfg.facts_path);
  });
  return res;
}

// ---------------------------------------------------------------- requests

std::string GenerationRequest::to_prompt() const {
  std::ostringstream out;
  out << "Human sentence: " << human_sentence << ", Human emotion: " << adjective(human_emotion)
      << ", Robot personality: " << robot_personality << ", Language style: " << join_style(language_style)
      << ", Action: " << action_phrase(action) << ", Robot emotion: " << adjective(robot_emotion);
  return out.str();
}

GenerationRequest build_generation_request(std::string_view human_sentence, Emotion human_emotion,
                                           const PersonalityVector& personality,
                                           const std::vector<std::string>& language_style, ActionKind action,
                                           Emotion robot_emotion) {
  return GenerationRequest{std::string(human_sentence), human_emotion, personality_description(personality),
                           language_style, action, robot_emotion};
}

namespace {

std::vector<std::string> split_style(const std::string& joined) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= joined.size() && !joined.empty()) {
    auto pos = joined.find(", ", start);
    out.push_back(joined.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 2;
  }
  return out;
}

Emotion emotion_field(const Json& j, const char* key) {
  auto e = parse_emotion(j.at(key).get<std::string>());
  if (!e) throw ValidationError(std::string("bad emotion in field ") + key);
  return *e;
}

}  // namespace

GenerationRequest request_from_record(const TelemetryRecord& r) {
  if (r.kind != RecordKind::RobotTurn) throw ValidationError("not a RobotTurn record");
  const Json& j = r.payload;
  GenerationRequest req;
  req.human_sentence = j.at("req_human_sentence").get<std::string>();
  req.human_emotion = emotion_field(j, "req_human_emotion");
  req.robot_personality = j.at("req_robot_personality").get<std::string>();
  req.language_style = split_style(j.at("req_language_style").get<std::string>());
  auto kind = parse_action_kind(j.at("req_action").get<std::string>());
  if (!kind) throw ValidationError("bad action in req_action");
  req.action = *kind;
  req.robot_emotion = emotion_field(j, "req_robot_emotion");
  return req;
}

// ---------------------------------------------------------------- templates

namespace {

enum Bucket { kHostile, kWarm, kLively, kTerse, kPrecise, kSloppy, kPlain, kBucketCount };

Bucket style_bucket(const std::vector<std::string>& style) {
  auto has = [&](std::string_view d) { return std::find(style.begin(), style.end(), d) != style.end(); };
  // Checked in A > E > C order.
  if (has("rude")) return kHostile;
  if (has("empathic")) return kWarm;
  if (has("talkative")) return kLively;
  if (has("quiet")) return kTerse;
  if (has("precise")) return kPrecise;
  if (has("lazy")) return kSloppy;
  return kPlain;
}

// [action kind][bucket]; "{topic}" is replaced by the action's topic.
constexpr std::string_view kTemplates[kActionKindCount][kBucketCount] = {
    // AskQuestion
    {"What's so great about {topic} anyway?", "How do you feel about {topic}? I'd love to hear.",
     "Ooh, tell me everything about {topic}!", "{topic}?", "Could you tell me precisely what you think of {topic}?",
     "Wait, what were we... oh, {topic}, do you like it?", "What do you think about {topic}?"},
    // MakeAffirmation
    {"I said that {topic} is overrated, and I don't really care about that.",
     "I really appreciate what you said about {topic}.", "{topic} is absolutely amazing, I love it!",
     "Yes. {topic}.", "To be exact, {topic} is worth discussing carefully.",
     "I said that the cats have taken over the space base, or something about {topic}.",
     "I think {topic} is interesting."},
    // TellJoke
    {"Here's a joke: your taste in {topic}.", "Want a gentle joke about {topic}? It always makes me smile.",
     "Haha, okay, okay, a {topic} joke, you'll love this one!", "A joke. About {topic}. Never mind.",
     "I have one well-structured joke about {topic}.", "I forgot the punchline, but it was about {topic}.",
     "Here's a little joke about {topic}."},
    // ChangeTopic
    {"This is boring. Let's talk about {topic} instead.", "If you like, we could talk about {topic} for a while.",
     "Oh! New idea, let's talk about {topic}!", "Maybe {topic}.", "Let us move on to {topic}, in order.",
     "Oh look, {topic}! Anyway.", "Shall we talk about {topic}?"},
    // AttractAttention
    {"Hey. Are you even listening?", "Hey, are you still with me? I'm here if you want to talk.",
     "Hey hey! Over here! Let's chat!", "Hm.", "Excuse me, may I have your attention for a moment?",
     "Hellooo? Wait, where was I?", "Hello? Are you there?"},
    // Greet
    {"Oh. It's you.", "Hello! It's really nice to meet you.", "Hi there! So great to see you!", "Hello.",
     "Good day. I am pleased to meet you.", "Hey... hi. Sorry, I was elsewhere.", "Hello."},
    // Farewell
    {"Finally, goodbye.", "Goodbye, take care of yourself!", "Bye bye! This was so much fun!", "Bye.",
     "Goodbye, it was a pleasure.", "Oh, are we done? Bye, I guess.", "Goodbye."},
    // StaySilent
    {"...", "...", "...", "...", "...", "...", "..."},
};

}  // namespace

std::string TemplateRenderer::render(const GenerationRequest& req, const AbstractAction& action) {
  std::string out(kTemplates[index(req.action)][style_bucket(req.language_style)]);
  const std::string topic = action.payload_topic.value_or("that");
  for (auto pos = out.find("{topic}"); pos != std::string::npos; pos = out.find("{topic}", pos + topic.size()))
    out.replace(pos, 7, topic);
  if (!out.empty() && std::islower(static_cast<unsigned char>(out[0])))
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out;
}

// ---------------------------------------------------------------- session

namespace {

std::string poles_field(const std::vector<TraitPole>& poles) {
  std::string out;
  for (auto p : poles) {
    if (!out.empty()) out += ',';
    out += to_string(p);
  }
  return out;
}

Json opt_string(const std::optional<std::string>& s) { return s ? Json(*s) : Json(nullptr); }

}  // namespace

struct Session::Impl {
  SessionConfig cfg;
  std::shared_ptr<const AgentResources> res;
  std::unique_ptr<TelemetrySink> sink;
  std::shared_ptr<TextBackend> text_backend = std::make_shared<TemplateRenderer>();
  SentimentAdapter sentiment;
  std::function<void(TimestampMs, const ComfortabilityState&)> comfort_cb;
  PerceptionBuffers buffers;
  Rng rng;
  std::vector<TraitPole> poles;
  WorldState world;
  SemanticMemory semantic;
  EpisodicMemory episodic;
  std::deque<PlanStep> plan;
  struct Pending {
    ActionKind kind;
    OutcomeObservation expected;
  };
  std::optional<Pending> pending;
  TimestampMs last_activity = 0;
  TimestampMs last_t = 0;
  int robot_turns = 0;
  bool closed = false;

  const PersonalityVector& p() const { return cfg.personality; }
  const Dynamics& dyn() const { return res->dynamics; }

  void write(const Json& j) {
    if (sink) sink->write_line(dump_record(j));
  }

  void check_time(TimestampMs t) {
    if (t < last_t) throw ValidationError("session time went backwards");
    last_t = t;
  }

  void set_comfort(TimestampMs t, const ComfortabilityState& c) {
    world.comfort = c;
    if (comfort_cb) comfort_cb(t, c);
  }

  void replan() {
    Plan fresh = persona::plan(res->domain, world, p(), cfg.horizon, cfg.seed, ReinforcementTable::from(episodic));
    plan.assign(fresh.steps.begin(), fresh.steps.end());
  }

  bool front_applicable() const {
    if (plan.empty()) return false;
    const ActionSchema* a = res->domain.find(plan.front().action.kind);
    return a && applicable(*a, world, p());
  }

  std::optional<std::string> topic_for(ActionKind kind) const {
    switch (kind) {
      case ActionKind::AskQuestion:
      case ActionKind::MakeAffirmation:
      case ActionKind::TellJoke:
      case ActionKind::ChangeTopic: {
        auto likes = semantic.query(FactPattern::from_tokens("user", "likes", "?"));
        if (likes.empty()) return std::nullopt;
        return likes[static_cast<std::size_t>(robot_turns) % likes.size()].object;
      }
      default:
        return std::nullopt;
    }
  }

  void record_user_turn(std::string_view text, const PerceptSnapshot& snap) {
    Json j;
    j["t"] = snap.t;
    j["kind"] = "UserTurn";
    j["text"] = std::string(text);
    j["face"] = to_string(snap.face_emotion);
    j["text_emotion"] = snap.text_emotion ? Json(to_string(*snap.text_emotion)) : Json(nullptr);
    j["fused"] = to_string(snap.fused_emotion);
    j["gaze"] = snap.gaze_mutual_fraction;
    write(j);
  }

  void record_episode(const EpisodeRecord& ep, double pe) {
    Json j;
    j["t"] = ep.t;
    j["kind"] = "Episode";
    j["action"] = to_string(ep.action_kind);
    j["poles"] = poles_field(ep.poles);
    j["predicted_emotion"] = to_string(ep.predicted.user_emotion);
    j["predicted_gaze"] = ep.predicted.gaze_mutual ? "mutual" : "averted";
    j["actual_emotion"] = to_string(ep.actual.user_emotion);
    j["actual_gaze"] = ep.actual.gaze_mutual ? "mutual" : "averted";
    j["match"] = ep.match;
    j["pe"] = pe;
    write(j);
  }

  void record_comfort(TimestampMs t) {
    Json j;
    j["t"] = t;
    j["kind"] = "Comfort";
    j["f_c"] = world.comfort.fc();
    j["f_e"] = world.comfort.fe();
    j["f_a"] = world.comfort.fa();
    j["theta"] = world.comfort.theta();
    write(j);
  }

  void record_robot_turn(const RobotTurn& r) {
    Json j;
    j["t"] = r.t;
    j["kind"] = "RobotTurn";
    j["proactive"] = r.proactive;
    j["action"] = to_string(r.action.kind);
    j["action_id"] = r.action.id;
    j["topic"] = opt_string(r.action.payload_topic);
    j["robot_emotion"] = to_string(r.robot_emotion);
    j["pole"] = r.sampled_pole ? Json(to_string(*r.sampled_pole)) : Json(nullptr);
    j["wc"] = p().wc();
    j["we"] = p().we();
    j["wa"] = p().wa();
    j["f_c"] = r.comfort.fc();
    j["f_e"] = r.comfort.fe();
    j["f_a"] = r.comfort.fa();
    j["gaze"] = to_string(r.params.gaze_mode);
    j["gesture"] = to_string(r.params.gesture_amplitude);
    j["volume"] = to_string(r.params.volume);
    j["head"] = to_string(r.params.head_movement);
    j["rate"] = to_string(r.params.speech_rate);
    j["pitch"] = to_string(r.params.pitch);
    j["req_human_sentence"] = r.request.human_sentence;
    j["req_human_emotion"] = adjective(r.request.human_emotion);
    j["req_robot_personality"] = r.request.robot_personality;
    j["req_language_style"] = join_style(r.request.language_style);
    j["req_action"] = to_string(r.request.action);
    j["req_robot_emotion"] = adjective(r.request.robot_emotion);
    j["text"] = r.text;
    write(j);
  }

  // Executes one robot action. `forced` bypasses the plan queue.
  RobotTurn act(TimestampMs t, std::string_view user_text, const PerceptSnapshot& snap, ComfortLabel label,
                bool proactive, const ActionSchema* forced) {
    const ActionSchema* schema = forced;
    if (!schema) {
      if (needs_replan(world, p(), plan.size(), dyn().margin) || !front_applicable()) replan();
      if (!plan.empty()) {
        schema = res->domain.find(plan.front().action.kind);
        plan.pop_front();
      }
    }

    RobotTurn turn;
    turn.t = t;
    turn.proactive = proactive;
    turn.action.id = "r" + std::to_string(robot_turns + 1);
    if (schema) {
      WorldState next = apply(*schema, world, p());
      for (const auto& f : schema->del) semantic.retract_fact(f);
      for (const auto& f : schema->add) semantic.assert_fact(f);
      world.facts = next.facts;
      world.turn_index = next.turn_index;
      set_comfort(t, next.comfort);
      turn.action.kind = schema->kind;
      pending = Pending{schema->kind, schema->expected};
    } else {
      // Nothing is applicable; stay silent without touching comfort.
      turn.action.kind = ActionKind::StaySilent;
      pending.reset();
    }
    turn.action.payload_topic = topic_for(turn.action.kind);

    const EmotionRequest ereq{std::string(user_text), snap.fused_emotion, label};
    if (!poles.empty()) {
      const GeneratedEmotion g = generate_emotion(p(), ereq, rng, res->rules, res->sensitivity);
      turn.robot_emotion = g.emotion;
      turn.sampled_pole = g.pole;
    }
    turn.params = map_parameters(p(), turn.action, res->behavior);
    turn.request = build_generation_request(user_text, snap.fused_emotion, p(), turn.params.language_style,
                                            turn.action.kind, turn.robot_emotion);
    turn.text = text_backend->render(turn.request, turn.action);
    turn.comfort = world.comfort;

    record_comfort(t);
    record_robot_turn(turn);
    ++robot_turns;
    last_activity = t;
    return turn;
  }
};

Session::Session(SessionConfig cfg, std::shared_ptr<const AgentResources> resources,
                 std::unique_ptr<TelemetrySink> sink)
    : impl_(std::make_unique<Impl>()) {
  cfg.validate();
  if (!resources) throw ConfigError("session needs resources");
  impl_->cfg = std::move(cfg);
  impl_->res = std::move(resources);
  impl_->sink = std::move(sink);
  impl_->rng.seed(impl_->cfg.seed);
  impl_->poles = active_poles(impl_->cfg.personality);
  impl_->semantic = impl_->res->facts;
  impl_->episodic = EpisodicMemory(impl_->res->dynamics.episodic());
  impl_->world = initial_world(impl_->res->dynamics, impl_->semantic.facts());
  const LexiconSentiment* lex = &impl_->res->lexicon;
  impl_->sentiment = [lex](std::string_view text) { return lex->classify(text); };
  impl_->replan();
}

Session::~Session() {
  if (impl_) close();
}
Session::Session(Session&&) noexcept = default;
Session& Session::operator=(Session&&) noexcept = default;

RobotTurn Session::step(std::string_view user_text, const PerceptSnapshot& percept) {
  Impl& s = *impl_;
  if (s.closed) throw SessionClosed();
  s.check_time(percept.t);

  PerceptSnapshot snap = percept;
  if (!snap.text_emotion && !detail::trim(user_text).empty()) snap.text_emotion = s.sentiment(user_text);
  snap.fused_emotion = fuse_emotions(snap.face_emotion, snap.text_emotion);
  s.record_user_turn(user_text, snap);

  ComfortabilityState c = stimulus_update(s.world.comfort, snap, s.p(), s.dyn());
  if (s.pending) {
    const OutcomeObservation actual{snap.fused_emotion, snap.gaze_mutual_fraction >= 0.5};
    const double pe = prediction_error(s.pending->expected, actual, s.dyn().delta);
    c = shift_active(c, s.p(), pe);
    EpisodeRecord ep = make_episode(s.poles, s.pending->kind, s.pending->expected, actual, snap.t);
    s.record_episode(ep, pe);
    s.episodic.record_episode(std::move(ep));
    s.pending.reset();
  }
  s.set_comfort(snap.t, c);

  const ComfortLabel label =
      is_uncomfortable(c, s.p(), s.dyn().margin) ? ComfortLabel::Uncomfortable : ComfortLabel::Comfortable;
  return s.act(snap.t, user_text, snap, label, false, nullptr);
}

std::optional<RobotTurn> Session::proactive_tick(TimestampMs now) {
  Impl& s = *impl_;
  if (s.closed) throw SessionClosed();
  if (now - s.last_activity <= s.cfg.silence_timeout) return std::nullopt;
  s.check_time(now);

  // Emotion extraction continues during silence; each silence window feeds
  // prospection once.
  const PerceptSnapshot snap = s.buffers.snapshot(now);
  s.set_comfort(now, stimulus_update(s.world.comfort, snap, s.p(), s.dyn()));
  s.last_activity = now;
  if (!is_uncomfortable(s.world.comfort, s.p(), s.dyn().margin)) {
    s.record_comfort(now);
    return std::nullopt;
  }

  s.replan();
  const ActionSchema* chosen = nullptr;
  auto usable = [&](ActionKind k) -> const ActionSchema* {
    const ActionSchema* a = s.res->domain.find(k);
    return a && applicable(*a, s.world, s.p()) ? a : nullptr;
  };
  if (!s.plan.empty() && (s.plan.front().action.kind == ActionKind::AttractAttention ||
                          s.plan.front().action.kind == ActionKind::AskQuestion)) {
    chosen = usable(s.plan.front().action.kind);
    s.plan.pop_front();
  }
  if (!chosen) chosen = usable(ActionKind::AttractAttention);
  if (!chosen) chosen = usable(ActionKind::AskQuestion);
  if (!chosen && !s.plan.empty()) {
    chosen = usable(s.plan.front().action.kind);
    s.plan.pop_front();
  }
  if (!chosen) {
    s.record_comfort(now);
    return std::nullopt;
  }
  // A forced motivational action invalidates the rest of the plan.
  s.plan.clear();
  return s.act(now, "", snap, ComfortLabel::Uncomfortable, true, chosen);
}

PerceptionBuffers& Session::perception() { return impl_->buffers; }
const WorldState& Session::world() const { return impl_->world; }
std::vector<PlanStep> Session::current_plan() const { return {impl_->plan.begin(), impl_->plan.end()}; }
const EpisodicMemory& Session::episodes() const { return impl_->episodic; }
const SemanticMemory& Session::semantic() const { return impl_->semantic; }
const SessionConfig& Session::config() const { return impl_->cfg; }
const AgentResources& Session::resources() const { return *impl_->res; }

void Session::set_text_backend(std::shared_ptr<TextBackend> backend) {
  if (!backend) throw ConfigError("text backend must not be null");
  impl_->text_backend = std::move(backend);
}

void Session::set_sentiment(SentimentAdapter adapter) {
  if (!adapter) throw ConfigError("sentiment adapter must not be empty");
  impl_->sentiment = std::move(adapter);
}

void Session::on_comfort(std::function<void(TimestampMs, const ComfortabilityState&)> cb) {
  impl_->comfort_cb = std::move(cb);
}

void Session::close() {
  if (impl_->closed) return;
  impl_->closed = true;
  if (impl_->sink) impl_->sink->close();
}

bool Session::closed() const { return impl_->closed; }

Session start_session(const SessionConfig& cfg, std::unique_ptr<TelemetrySink> sink) {
  return Session(cfg, AgentResources::load(cfg), std::move(sink));
}

}  // namespace persona

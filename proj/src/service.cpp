#include "persona/service.hpp"

#include <cmath>

#include "persona/errors.hpp"

namespace persona {

struct SessionService::Entry {
  std::mutex mu;
  std::chrono::steady_clock::time_point created = std::chrono::steady_clock::now();
  MemorySink* sink = nullptr;  // owned by the session
  std::optional<Session> session;
  std::vector<Json> pending;  // comfort messages collected during a call
  TimestampMs last = 0;

  TimestampMs clock() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - created).count();
  }
  // Session time never runs backwards, whatever the caller passes.
  TimestampMs resolve(std::optional<TimestampMs> now) {
    last = std::max(last, now.value_or(clock()));
    return last;
  }
};

Json comfort_message(const ComfortabilityState& c) {
  Json j;
  j["type"] = "comfort";
  j["f_c"] = c.fc();
  j["f_e"] = c.fe();
  j["f_a"] = c.fa();
  j["theta"] = c.theta();
  return j;
}

Json robot_turn_message(const RobotTurn& turn) {
  Json j;
  j["type"] = "robot_turn";
  j["t"] = turn.t;
  j["proactive"] = turn.proactive;
  j["action"] = {{"id", turn.action.id},
                 {"kind", to_string(turn.action.kind)},
                 {"topic", turn.action.payload_topic ? Json(*turn.action.payload_topic) : Json(nullptr)}};
  j["robot_emotion"] = to_string(turn.robot_emotion);
  j["sampled_pole"] = turn.sampled_pole ? Json(to_string(*turn.sampled_pole)) : Json(nullptr);
  j["params"] = {{"gaze", to_string(turn.params.gaze_mode)},
                 {"gesture", to_string(turn.params.gesture_amplitude)},
                 {"volume", to_string(turn.params.volume)},
                 {"head", to_string(turn.params.head_movement)},
                 {"rate", to_string(turn.params.speech_rate)},
                 {"pitch", to_string(turn.params.pitch)},
                 {"language_style", turn.params.language_style}};
  j["request"] = {{"human_sentence", turn.request.human_sentence},
                  {"human_emotion", adjective(turn.request.human_emotion)},
                  {"robot_personality", turn.request.robot_personality},
                  {"language_style", join_style(turn.request.language_style)},
                  {"action", to_string(turn.request.action)},
                  {"robot_emotion", adjective(turn.request.robot_emotion)}};
  j["text"] = turn.text;
  j["comfort"] = {{"f_c", turn.comfort.fc()}, {"f_e", turn.comfort.fe()}, {"f_a", turn.comfort.fa()}};
  return j;
}

SessionService::SessionService(SessionConfig base) : base_(std::move(base)) {
  resources_ = AgentResources::load(base_);
}

namespace {

double number_field(const Json& body, const char* key, double fallback) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) return fallback;
  if (!it->is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  return it->get<double>();
}

long long integer_field(const Json& body, const char* key, long long fallback) {
  const double v = number_field(body, key, static_cast<double>(fallback));
  if (v != std::floor(v)) throw ConfigError(std::string("'") + key + "' must be an integer");
  return static_cast<long long>(v);
}

Json error_message(const std::string& what) { return Json{{"type", "error"}, {"message", what}}; }

}  // namespace

Json SessionService::create(const Json& body) {
  if (!body.is_object()) throw ConfigError("session request must be a JSON object");
  SessionConfig cfg = base_;
  const auto& p = base_.personality;
  try {
    cfg.personality = make_personality(number_field(body, "wc", p.wc()), number_field(body, "we", p.we()),
                                       number_field(body, "wa", p.wa()));
  } catch (const OutOfRange& e) {
    throw ConfigError(e.what());
  }
  cfg.seed = static_cast<std::uint64_t>(integer_field(body, "seed", static_cast<long long>(base_.seed)));
  cfg.horizon = static_cast<int>(integer_field(body, "horizon", base_.horizon));
  cfg.session_duration = integer_field(body, "session_duration_ms", base_.session_duration);
  cfg.silence_timeout = integer_field(body, "silence_timeout_ms", base_.silence_timeout);
  cfg.validate();

  auto entry = std::make_shared<Entry>();
  auto sink = std::make_unique<MemorySink>();
  entry->sink = sink.get();
  entry->session.emplace(cfg, resources_, std::move(sink));
  Entry* raw = entry.get();
  entry->session->on_comfort(
      [raw](TimestampMs, const ComfortabilityState& c) { raw->pending.push_back(comfort_message(c)); });

  std::string id;
  {
    std::lock_guard lock(mu_);
    id = "s" + std::to_string(next_id_++);
    sessions_.emplace(id, entry);
  }
  return Json{{"id", id},
              {"personality", personality_description(cfg.personality)},
              {"banner", personality_description(cfg.personality, ", ")}};
}

bool SessionService::destroy(const std::string& id) {
  std::shared_ptr<Entry> entry;
  {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) return false;
    entry = it->second;
    sessions_.erase(it);
  }
  std::lock_guard lock(entry->mu);
  entry->session->close();
  return true;
}

std::shared_ptr<SessionService::Entry> SessionService::find(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFound("no session '" + id + "'");
  return it->second;
}

std::string SessionService::telemetry(const std::string& id) const {
  auto entry = find(id);
  std::lock_guard lock(entry->mu);
  return entry->sink->text();
}

std::vector<std::string> SessionService::ids() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& [id, _] : sessions_) out.push_back(id);
  return out;
}

TimestampMs SessionService::elapsed(const std::string& id) const { return find(id)->clock(); }

std::vector<Json> SessionService::handle(const std::string& id, const Json& message, std::optional<TimestampMs> now) {
  auto entry = find(id);
  std::lock_guard lock(entry->mu);
  if (!message.is_object() || message.value("type", "") != "user_turn")
    return {error_message("expected {\"type\":\"user_turn\", \"text\": ...}")};
  auto text_it = message.find("text");
  if (text_it == message.end() || !text_it->is_string()) return {error_message("'text' must be a string")};

  std::optional<Emotion> face;
  if (auto it = message.find("face_emotion"); it != message.end() && !it->is_null()) {
    if (!it->is_string() || !(face = parse_emotion(it->get<std::string>())))
      return {error_message("unknown face_emotion")};
  }
  std::optional<bool> mutual;
  if (auto it = message.find("gaze"); it != message.end() && !it->is_null()) {
    if (it->is_boolean()) mutual = it->get<bool>();
    else if (it->is_string() && (*it == "mutual" || *it == "averted")) mutual = *it == "mutual";
    else return {error_message("gaze must be \"mutual\", \"averted\" or a boolean")};
  }

  const TimestampMs t = entry->resolve(now);
  Session& s = *entry->session;
  try {
    if (face) s.perception().push_face({t, *face});
    if (mutual) s.perception().push_gaze({t, *mutual});
    entry->pending.clear();
    RobotTurn turn = s.step(text_it->get<std::string>(), s.perception().snapshot(t));
    std::vector<Json> out = std::move(entry->pending);
    entry->pending.clear();
    out.push_back(robot_turn_message(turn));
    return out;
  } catch (const SessionClosed&) {
    return {error_message("session is closed")};
  }
}

std::vector<Json> SessionService::tick(const std::string& id, std::optional<TimestampMs> now) {
  auto entry = find(id);
  std::lock_guard lock(entry->mu);
  if (entry->session->closed()) return {};
  const TimestampMs t = entry->resolve(now);
  entry->pending.clear();
  auto turn = entry->session->proactive_tick(t);
  std::vector<Json> out = std::move(entry->pending);
  entry->pending.clear();
  if (turn) out.push_back(robot_turn_message(*turn));
  return out;
}

}  // namespace persona

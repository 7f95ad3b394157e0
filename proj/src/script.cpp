#include <algorithm>
#include <limits>
#include <sstream>

#include "persona/errors.hpp"
#include "persona/runtime.hpp"
#include "text_util.hpp"

namespace persona {

std::vector<ScriptEvent> parse_script(std::string_view text) {
  std::vector<ScriptEvent> out;
  int lineno = 0;
  TimestampMs last = std::numeric_limits<TimestampMs>::min();
  for (auto raw : detail::split_lines(text)) {
    ++lineno;
    auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto tok = detail::split_ws(line);
    if (tok.size() < 2) throw ScriptError(lineno, "expected '<t_ms> <FACE|GAZE|SAY> ...'");
    auto t = detail::parse_int(tok[0]);
    if (!t || *t < 0) throw ScriptError(lineno, "bad timestamp '" + std::string(tok[0]) + "'");
    if (*t < last) throw ScriptError(lineno, "timestamp goes backwards");
    last = *t;

    ScriptEvent ev;
    ev.t = *t;
    const std::string verb = detail::lower(tok[1]);
    if (verb == "face") {
      if (tok.size() != 3) throw ScriptError(lineno, "FACE takes one emotion");
      auto e = parse_emotion(tok[2]);
      if (!e) throw ScriptError(lineno, "unknown emotion '" + std::string(tok[2]) + "'");
      ev.kind = ScriptEvent::Kind::Face;
      ev.emotion = *e;
    } else if (verb == "gaze") {
      if (tok.size() != 3) throw ScriptError(lineno, "GAZE takes mutual or averted");
      const std::string g = detail::lower(tok[2]);
      if (g == "mutual") ev.mutual = true;
      else if (g == "averted" || g == "avoidant") ev.mutual = false;
      else throw ScriptError(lineno, "unknown gaze '" + std::string(tok[2]) + "'");
      ev.kind = ScriptEvent::Kind::Gaze;
    } else if (verb == "say") {
      // Keep the text as written after the verb.
      auto pos = line.find(tok[1]) + tok[1].size();
      ev.kind = ScriptEvent::Kind::Say;
      ev.text = std::string(detail::trim(line.substr(pos)));
    } else {
      throw ScriptError(lineno, "unknown event '" + std::string(tok[1]) + "'");
    }
    out.push_back(std::move(ev));
  }
  return out;
}

std::vector<ScriptEvent> load_script(const std::filesystem::path& path) {
  return parse_script(detail::read_file(path.string()));
}

std::string format_script(const std::vector<ScriptEvent>& events) {
  std::ostringstream out;
  for (const auto& ev : events) {
    out << ev.t << ' ';
    switch (ev.kind) {
      case ScriptEvent::Kind::Face: out << "FACE " << to_string(ev.emotion); break;
      case ScriptEvent::Kind::Gaze: out << "GAZE " << (ev.mutual ? "mutual" : "averted"); break;
      case ScriptEvent::Kind::Say: out << "SAY " << ev.text; break;
    }
    out << '\n';
  }
  return out.str();
}

void run_events(Session& session, const std::vector<ScriptEvent>& events) {
  constexpr TimestampMs kNever = std::numeric_limits<TimestampMs>::max();
  const TimestampMs end = session.config().session_duration;
  std::size_t i = 0;
  TimestampMs next_tick = kTickMs;
  for (;;) {
    TimestampMs te = i < events.size() ? events[i].t : kNever;
    if (te > end) te = kNever;
    if (next_tick <= end && next_tick < te) {
      session.proactive_tick(next_tick);
      next_tick += kTickMs;
      continue;
    }
    if (te == kNever) break;
    const ScriptEvent& ev = events[i++];
    switch (ev.kind) {
      case ScriptEvent::Kind::Face: session.perception().push_face({ev.t, ev.emotion}); break;
      case ScriptEvent::Kind::Gaze: session.perception().push_gaze({ev.t, ev.mutual}); break;
      case ScriptEvent::Kind::Say: session.step(ev.text, session.perception().snapshot(ev.t)); break;
    }
  }
}

std::string personality_tag(const PersonalityVector& p) {
  std::string tag;
  for (auto pole : active_poles(p)) {
    if (!tag.empty()) tag += '-';
    tag += to_string(pole);
  }
  return tag.empty() ? "neutral" : tag;
}

std::filesystem::path run_scripted(const SessionConfig& cfg, const std::filesystem::path& script,
                                   const std::filesystem::path& out_dir) {
  const auto events = load_script(script);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw ConfigError("cannot create " + out_dir.string() + ": " + ec.message());
  const auto path =
      out_dir / ("session_" + personality_tag(cfg.personality) + "_s" + std::to_string(cfg.seed) + ".jsonl");
  Session session = start_session(cfg, std::make_unique<FileSink>(path));
  run_events(session, events);
  session.close();
  return path;
}

std::vector<PersonalityVector> study_personalities() {
  std::vector<PersonalityVector> out;
  const int pairs[3][2] = {{1, 2}, {0, 1}, {0, 2}};  // E-A, C-E, C-A
  for (const auto& pr : pairs) {
    for (int s1 : {1, -1}) {
      for (int s2 : {1, -1}) {
        double w[3] = {0, 0, 0};
        w[pr[0]] = s1;
        w[pr[1]] = s2;
        out.push_back(make_personality(w[0], w[1], w[2]));
      }
    }
  }
  return out;
}

}  // namespace persona

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "persona/analysis.hpp"
#include "persona/emotion_engine.hpp"
#include "persona/errors.hpp"
#include "persona/runtime.hpp"

namespace py = pybind11;
using namespace persona;

namespace {

Emotion emotion_arg(const std::string& s) {
  auto e = parse_emotion(s);
  if (!e) throw py::value_error("unknown emotion '" + s + "'");
  return *e;
}

ActionKind action_arg(const std::string& s) {
  auto k = parse_action_kind(s);
  if (!k) throw py::value_error("unknown action '" + s + "'");
  return *k;
}

PersonalityVector personality_arg(const std::tuple<double, double, double>& w) {
  return make_personality(std::get<0>(w), std::get<1>(w), std::get<2>(w));
}

py::dict request_dict(const GenerationRequest& r) {
  py::dict d;
  d["human_sentence"] = r.human_sentence;
  d["human_emotion"] = std::string(to_string(r.human_emotion));
  d["robot_personality"] = r.robot_personality;
  d["language_style"] = r.language_style;
  d["action"] = std::string(to_string(r.action));
  d["robot_emotion"] = std::string(to_string(r.robot_emotion));
  d["prompt"] = r.to_prompt();
  return d;
}

py::dict turn_dict(const RobotTurn& t) {
  py::dict d;
  d["t"] = t.t;
  d["action"] = std::string(to_string(t.action.kind));
  d["topic"] = t.action.payload_topic ? py::cast(*t.action.payload_topic) : py::none();
  d["robot_emotion"] = std::string(to_string(t.robot_emotion));
  d["pole"] = t.sampled_pole ? py::cast(std::string(to_string(*t.sampled_pole))) : py::none();
  d["request"] = request_dict(t.request);
  d["text"] = t.text;
  d["proactive"] = t.proactive;
  d["comfort"] = std::make_tuple(t.comfort.fc(), t.comfort.fe(), t.comfort.fa());
  return d;
}

// A session that keeps its telemetry in memory.
class PySession {
 public:
  PySession(const std::tuple<double, double, double>& w, std::uint64_t seed, int horizon) {
    SessionConfig cfg;
    cfg.personality = personality_arg(w);
    cfg.seed = seed;
    cfg.horizon = horizon;
    auto sink = std::make_unique<MemorySink>();
    sink_ = sink.get();
    session_ = std::make_unique<Session>(start_session(cfg, std::move(sink)));
  }

  py::dict step(const std::string& text, std::int64_t t, const std::optional<std::string>& face,
                std::optional<bool> gaze_mutual) {
    if (face) session_->perception().push_face({t, emotion_arg(*face)});
    if (gaze_mutual) session_->perception().push_gaze({t, *gaze_mutual});
    return turn_dict(session_->step(text, session_->perception().snapshot(t)));
  }

  py::object tick(std::int64_t now) {
    auto turn = session_->proactive_tick(now);
    return turn ? py::object(turn_dict(*turn)) : py::none();
  }

  std::string telemetry() const { return sink_->text(); }
  void close() { session_->close(); }

 private:
  MemorySink* sink_ = nullptr;
  std::unique_ptr<Session> session_;
};

}  // namespace

PYBIND11_MODULE(_persona, m) {
  m.doc() = "Personality-driven social robot agent";

  auto base = py::register_exception<Error>(m, "PersonaError");
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<OutOfRange>(m, "OutOfRange", base.ptr());
  py::register_exception<SyntaxError>(m, "DomainSyntaxError", base.ptr());
  py::register_exception<SessionClosed>(m, "SessionClosed", base.ptr());
  py::register_exception<Degenerate>(m, "Degenerate", base.ptr());
  py::register_exception<ZeroTotalVariance>(m, "ZeroTotalVariance", base.ptr());
  py::register_exception<InsufficientTrials>(m, "InsufficientTrials", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());

  m.def(
      "describe_personality", [](const std::tuple<double, double, double>& w) {
        return personality_description(personality_arg(w));
      },
      py::arg("weights"));

  m.def(
      "plan",
      [](const std::string& domain_text, const std::tuple<double, double, double>& w, int horizon,
         const std::tuple<double, double, double>& fluents) {
        const auto d = parse_domain(domain_text);
        Dynamics dyn;
        WorldState s{{}, ComfortabilityState(std::get<0>(fluents), std::get<1>(fluents), std::get<2>(fluents), dyn.theta),
                     0};
        const auto p = plan(d, s, personality_arg(w), horizon);
        std::vector<std::string> names;
        for (auto k : p.kinds()) names.emplace_back(to_string(k));
        return py::make_tuple(names, p.total_reward);
      },
      py::arg("domain_text"), py::arg("weights"), py::arg("horizon") = 3,
      py::arg("fluents") = std::make_tuple(0.8, 0.8, 0.8));

  m.def("shipped_domain", [] { return std::string(shipped_domain_text()); });

  m.def(
      "generate_emotion_rule",
      [](const std::string& pole, const std::string& user, bool comfortable) {
        auto p = parse_pole(pole);
        if (!p) throw py::value_error("unknown pole '" + pole + "'");
        return std::string(to_string(generate_emotion_rule(
            *p, emotion_arg(user), comfortable ? ComfortLabel::Comfortable : ComfortLabel::Uncomfortable)));
      },
      py::arg("pole"), py::arg("user_emotion"), py::arg("comfortable") = true);

  m.def(
      "build_generation_request",
      [](const std::string& sentence, const std::string& human_emotion, const std::tuple<double, double, double>& w,
         const std::string& action, const std::string& robot_emotion) {
        const auto p = personality_arg(w);
        return request_dict(build_generation_request(sentence, emotion_arg(human_emotion), p, language_style(p),
                                                     action_arg(action), emotion_arg(robot_emotion)));
      },
      py::arg("sentence"), py::arg("human_emotion"), py::arg("weights"), py::arg("action"), py::arg("robot_emotion"));

  m.def(
      "mann_whitney_u",
      [](const std::vector<double>& a, const std::vector<double>& b, const std::optional<std::string>& method) {
        std::optional<TestMethod> mth;
        if (method == std::string("exact")) mth = TestMethod::Exact;
        else if (method == std::string("normal")) mth = TestMethod::NormalApprox;
        else if (method) throw py::value_error("method must be 'exact' or 'normal'");
        auto r = mann_whitney_u({a, "a"}, {b, "b"}, mth);
        return py::make_tuple(r.u, r.p_two_sided, std::string(to_string(r.method)));
      },
      py::arg("a"), py::arg("b"), py::arg("method") = py::none());

  m.def("cronbach_alpha", &cronbach_alpha, py::arg("rows"));

  m.def(
      "run_scripted",
      [](const std::filesystem::path& config, const std::filesystem::path& script, const std::filesystem::path& out,
         std::optional<std::uint64_t> seed) {
        auto cfg = SessionConfig::load(config);
        if (seed) cfg.seed = *seed;
        return run_scripted(cfg, script, out);
      },
      py::arg("config"), py::arg("script"), py::arg("out"), py::arg("seed") = py::none());

  m.def(
      "occurrence_matrix",
      [](const std::filesystem::path& dir) { return emotion_occurrences(telemetry_files(dir)).to_csv(); },
      py::arg("directory"));

  py::class_<PySession>(m, "Session")
      .def(py::init<const std::tuple<double, double, double>&, std::uint64_t, int>(), py::arg("weights"),
           py::arg("seed") = 0, py::arg("horizon") = 3)
      .def("step", &PySession::step, py::arg("text"), py::arg("t"), py::arg("face") = py::none(),
           py::arg("gaze_mutual") = py::none())
      .def("tick", &PySession::tick, py::arg("now"))
      .def("telemetry", &PySession::telemetry)
      .def("close", &PySession::close);
}

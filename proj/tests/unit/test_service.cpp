#include <thread>

#include "doctest.h"
#include "persona/errors.hpp"
#include "persona/service.hpp"

#ifdef PERSONA_HAVE_SERVER
#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "httplib.h"
#endif

using namespace persona;

namespace {
Json user_turn(const std::string& text, const char* face = nullptr) {
  Json m{{"type", "user_turn"}, {"text", text}};
  if (face) m["face_emotion"] = face;
  return m;
}

const Json& last_of_type(const std::vector<Json>& replies, const std::string& type) {
  for (auto it = replies.rbegin(); it != replies.rend(); ++it)
    if ((*it)["type"] == type) return *it;
  throw std::runtime_error("no " + type + " reply");
}
}  // namespace

TEST_SUITE("service") {
  TEST_CASE("session lifecycle") {
    SessionService svc;
    auto a = svc.create({{"wc", 0}, {"we", 1}, {"wa", -1}});
    CHECK(a["banner"] == "Extravert, Disagreeable");
    CHECK(svc.create(Json::object())["banner"] == "Neutral");
    CHECK(svc.ids().size() == 2);
    const std::string id = a["id"];
    CHECK(svc.telemetry(id).empty());
    CHECK(svc.destroy(id));
    CHECK_FALSE(svc.destroy(id));
    CHECK_THROWS_AS(svc.telemetry(id), NotFound);
    CHECK_THROWS_AS(svc.handle(id, user_turn("hi"), 0), NotFound);
    CHECK_THROWS_AS(svc.create({{"wc", 3}}), ConfigError);
    CHECK_THROWS_AS(svc.create({{"horizon", "deep"}}), ConfigError);
  }

  TEST_CASE("turn protocol") {
    SessionService svc;
    const std::string id = svc.create({{"wc", 0}, {"we", 1}, {"wa", -1}, {"seed", 4}})["id"];
    auto replies = svc.handle(id, user_turn("What did you say?", "happy"), 1000);
    REQUIRE(replies.size() >= 2);
    CHECK(replies.front()["type"] == "comfort");
    const auto& turn = replies.back();
    CHECK(turn["type"] == "robot_turn");
    CHECK(turn["request"]["human_sentence"] == "What did you say?");
    CHECK(turn["request"]["human_emotion"] == "Happy");
    CHECK(turn["request"]["robot_personality"] == "Extravert and Disagreeable");
    for (const char* key : {"human_sentence", "human_emotion", "robot_personality", "language_style", "action",
                            "robot_emotion"})
      CHECK(turn["request"].contains(key));
    CHECK(last_of_type(replies, "comfort").contains("f_e"));

    // Averted gaze lowers the extraversion fluent.
    const double before = last_of_type(replies, "comfort")["f_e"];
    Json averted = user_turn("hmm");
    averted["gaze"] = "averted";
    auto next = svc.handle(id, averted, 6000);
    CHECK(static_cast<double>(next.front()["f_e"]) < before);

    CHECK(svc.handle(id, Json{{"type", "hello"}}, 7000).front()["type"] == "error");
    CHECK(svc.handle(id, Json{{"type", "user_turn"}}, 7000).front()["type"] == "error");
    CHECK(svc.handle(id, user_turn("x", "sleepy"), 7000).front()["type"] == "error");

    const auto lines = svc.telemetry(id);
    CHECK(parse_telemetry(lines).size() >= 6);
  }

  TEST_CASE("ticks emit proactive turns during silence") {
    SessionService svc;
    const std::string id = svc.create({{"we", 1}, {"seed", 2}})["id"];
    bool proactive = false;
    for (TimestampMs t = 1000; t <= 120000 && !proactive; t += 1000)
      for (const auto& m : svc.tick(id, t))
        if (m["type"] == "robot_turn" && m["proactive"] == true) proactive = true;
    // An extravert with no one looking at it loses comfort and reaches out.
    CHECK(proactive);
  }

#ifdef PERSONA_HAVE_SERVER
  TEST_CASE("http and websocket front end") {
    namespace beast = boost::beast;
    namespace asio = boost::asio;
    SessionService svc;
    Server server(svc, 0);
    std::thread th([&] { server.run(); });
    const int port = server.port();

    httplib::Client http("127.0.0.1", port);
    auto created = http.Post("/sessions", R"({"wc":0,"we":1,"wa":-1})", "application/json");
    REQUIRE(created);
    CHECK(created->status == 201);
    const std::string id = Json::parse(created->body)["id"];
    CHECK(http.Post("/sessions", "{not json", "application/json")->status == 400);

    {
      asio::io_context io;
      asio::ip::tcp::resolver resolver(io);
      beast::websocket::stream<asio::ip::tcp::socket> ws(io);
      asio::connect(ws.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
      ws.handshake("127.0.0.1", "/sessions/" + id + "/ws");
      ws.write(asio::buffer(user_turn("What did you say?", "happy").dump()));
      bool got_comfort = false;
      Json turn;
      while (turn.is_null()) {
        beast::flat_buffer buf;
        ws.read(buf);
        auto m = Json::parse(beast::buffers_to_string(buf.data()));
        if (m["type"] == "comfort") got_comfort = true;
        if (m["type"] == "robot_turn" && m["proactive"] == false) turn = m;
      }
      CHECK(got_comfort);
      CHECK(turn["request"]["human_sentence"] == "What did you say?");
      ws.close(beast::websocket::close_code::normal);
    }

    auto tel = http.Get("/sessions/" + id + "/telemetry");
    REQUIRE(tel);
    CHECK(tel->status == 200);
    CHECK(parse_telemetry(tel->body).size() >= 3);
    CHECK(http.Delete("/sessions/" + id)->status == 204);
    CHECK(http.Delete("/sessions/" + id)->status == 404);
    CHECK(http.Get("/sessions/" + id + "/telemetry")->status == 404);

    server.stop();
    th.join();
  }
#endif
}

#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "persona/errors.hpp"
#include "persona/runtime.hpp"
#include "persona/telemetry.hpp"

namespace persona {

class NotFound : public Error {
 public:
  using Error::Error;
};

// Session lifecycle and the turn protocol, independent of any transport.
// Every session keeps its telemetry in memory. Thread-safe: sessions are
// isolated, and calls on one session are serialized.
class SessionService {
 public:
  // `base` supplies data paths and defaults for fields a request omits.
  explicit SessionService(SessionConfig base = {});

  // Body fields (all optional): wc we wa seed horizon session_duration_ms
  // silence_timeout_ms. Returns {"id", "personality", "banner"}. Throws
  // ConfigError with the config problem as its message.
  Json create(const Json& body);
  // False when the id is unknown.
  bool destroy(const std::string& id);
  // Telemetry lines so far. Throws NotFound.
  std::string telemetry(const std::string& id) const;
  std::vector<std::string> ids() const;

  // Handles one client message and returns the replies in order: a comfort
  // message after each comfort update, then the robot turn. Malformed input
  // yields a single {"type":"error"} reply. `now` is session time in ms;
  // omitted, the wall clock since creation is used. Throws NotFound.
  std::vector<Json> handle(const std::string& id, const Json& message, std::optional<TimestampMs> now = {});
  // 1 Hz dispatcher tick; replies as for handle(). Throws NotFound.
  std::vector<Json> tick(const std::string& id, std::optional<TimestampMs> now = {});

  // Session time of `id` by the wall clock.
  TimestampMs elapsed(const std::string& id) const;

 private:
  struct Entry;
  std::shared_ptr<Entry> find(const std::string& id) const;

  SessionConfig base_;
  std::shared_ptr<const AgentResources> resources_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::uint64_t next_id_ = 1;
};

// Wire form of a robot turn (`type` = "robot_turn").
Json robot_turn_message(const RobotTurn& turn);
Json comfort_message(const ComfortabilityState& c);

// HTTP + WebSocket front end:
//   POST   /sessions                  create (JSON body), 201 + {"id", ...}
//   DELETE /sessions/{id}             204, or 404
//   GET    /sessions/{id}/telemetry   200 application/x-ndjson
//   GET    /sessions/{id}/ws          WebSocket upgrade for the turn channel
class Server {
 public:
  // Binds immediately; port 0 picks a free port.
  Server(SessionService& service, unsigned short port, const std::string& address = "127.0.0.1");
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  unsigned short port() const;
  // Serves until stop(); single-threaded.
  void run();
  // Safe from any thread.
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace persona

#include <boost/asio/awaitable.hpp>
#include <boost/asio/co_spawn.hpp>
#include <boost/asio/detached.hpp>
#include <boost/asio/io_context.hpp>
#include <boost/asio/redirect_error.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/asio/use_awaitable.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <deque>
#include <iostream>

#include "persona/errors.hpp"
#include "persona/service.hpp"

namespace persona {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using asio::awaitable;
using asio::use_awaitable;

namespace {

using Request = http::request<http::string_body>;
using Response = http::response<http::string_body>;

Response make_response(const Request& req, http::status status, std::string body,
                       std::string_view type = "application/json") {
  Response res{status, req.version()};
  res.set(http::field::server, "persona");
  res.set(http::field::content_type, std::string(type));
  res.set(http::field::access_control_allow_origin, "*");
  res.keep_alive(req.keep_alive());
  res.body() = std::move(body);
  res.prepare_payload();
  return res;
}

Response json_error(const Request& req, http::status status, const std::string& what) {
  return make_response(req, status, Json{{"error", what}}.dump());
}

std::vector<std::string> path_parts(std::string_view target) {
  if (auto q = target.find('?'); q != std::string_view::npos) target = target.substr(0, q);
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start < target.size()) {
    auto slash = target.find('/', start);
    if (slash == std::string_view::npos) slash = target.size();
    if (slash > start) parts.emplace_back(target.substr(start, slash - start));
    start = slash + 1;
  }
  return parts;
}

Response route(SessionService& svc, const Request& req) {
  const auto parts = path_parts(std::string_view(req.target().data(), req.target().size()));
  try {
    if (parts.size() == 1 && parts[0] == "sessions" && req.method() == http::verb::post) {
      Json body = req.body().empty() ? Json::object() : Json::parse(req.body());
      return make_response(req, http::status::created, svc.create(body).dump());
    }
    if (parts.size() == 2 && parts[0] == "sessions" && req.method() == http::verb::delete_) {
      if (!svc.destroy(parts[1])) return json_error(req, http::status::not_found, "no session '" + parts[1] + "'");
      return make_response(req, http::status::no_content, "");
    }
    if (parts.size() == 3 && parts[0] == "sessions" && parts[2] == "telemetry" && req.method() == http::verb::get)
      return make_response(req, http::status::ok, svc.telemetry(parts[1]), "application/x-ndjson");
    if (req.method() == http::verb::options) {
      Response res = make_response(req, http::status::no_content, "");
      res.set(http::field::access_control_allow_methods, "GET, POST, DELETE, OPTIONS");
      res.set(http::field::access_control_allow_headers, "Content-Type");
      return res;
    }
    return json_error(req, http::status::not_found, "no route for " + std::string(req.target()));
  } catch (const Json::parse_error& e) {
    return json_error(req, http::status::bad_request, std::string("bad JSON: ") + e.what());
  } catch (const NotFound& e) {
    return json_error(req, http::status::not_found, e.what());
  } catch (const ConfigError& e) {
    return json_error(req, http::status::bad_request, e.what());
  } catch (const Error& e) {
    return json_error(req, http::status::bad_request, e.what());
  }
}

// One WebSocket connection bound to a session. Replies and tick output share
// one outbox drained by a single writer.
class Channel : public std::enable_shared_from_this<Channel> {
 public:
  Channel(websocket::stream<beast::tcp_stream> ws, SessionService& svc, std::string id)
      : ws_(std::move(ws)), svc_(svc), id_(std::move(id)), ticker_(ws_.get_executor()), wake_(ws_.get_executor()) {
    wake_.expires_at(asio::steady_timer::time_point::max());
  }

  awaitable<void> run() {
    auto self = shared_from_this();
    asio::co_spawn(ws_.get_executor(), self->write_loop(), asio::detached);
    asio::co_spawn(ws_.get_executor(), self->tick_loop(), asio::detached);
    try {
      for (;;) {
        beast::flat_buffer buf;
        co_await ws_.async_read(buf, use_awaitable);
        std::vector<Json> replies;
        try {
          replies = svc_.handle(id_, Json::parse(beast::buffers_to_string(buf.data())));
        } catch (const Json::parse_error& e) {
          replies = {Json{{"type", "error"}, {"message", std::string("bad JSON: ") + e.what()}}};
        } catch (const NotFound&) {
          break;
        }
        enqueue(replies);
      }
    } catch (const boost::system::system_error&) {
    }
    done_ = true;
    ticker_.cancel();
    wake_.cancel();
  }

 private:
  void enqueue(const std::vector<Json>& msgs) {
    for (const auto& m : msgs) outbox_.push_back(m.dump());
    if (!msgs.empty()) wake_.cancel();
  }

  awaitable<void> write_loop() {
    auto self = shared_from_this();
    try {
      while (!done_) {
        while (!outbox_.empty() && !done_) {
          const std::string msg = std::move(outbox_.front());
          outbox_.pop_front();
          ws_.text(true);
          co_await ws_.async_write(asio::buffer(msg), use_awaitable);
        }
        if (done_) break;
        wake_.expires_at(asio::steady_timer::time_point::max());
        boost::system::error_code ec;
        co_await wake_.async_wait(asio::redirect_error(use_awaitable, ec));
      }
    } catch (const boost::system::system_error&) {
    }
  }

  awaitable<void> tick_loop() {
    auto self = shared_from_this();
    while (!done_) {
      ticker_.expires_after(std::chrono::milliseconds(kTickMs));
      boost::system::error_code ec;
      co_await ticker_.async_wait(asio::redirect_error(use_awaitable, ec));
      if (done_) break;
      try {
        enqueue(svc_.tick(id_));
      } catch (const NotFound&) {
        break;
      }
    }
  }

  websocket::stream<beast::tcp_stream> ws_;
  SessionService& svc_;
  std::string id_;
  asio::steady_timer ticker_;
  asio::steady_timer wake_;
  std::deque<std::string> outbox_;
  bool done_ = false;
};

awaitable<void> serve_connection(tcp::socket socket, SessionService& svc) {
  beast::tcp_stream stream(std::move(socket));
  beast::flat_buffer buf;
  try {
    for (;;) {
      Request req;
      co_await http::async_read(stream, buf, req, use_awaitable);
      if (websocket::is_upgrade(req)) {
        const auto parts = path_parts(std::string_view(req.target().data(), req.target().size()));
        const auto ids = svc.ids();
        if (parts.size() != 3 || parts[0] != "sessions" || parts[2] != "ws" ||
            std::find(ids.begin(), ids.end(), parts[1]) == ids.end()) {
          co_await http::async_write(stream, json_error(req, http::status::not_found, "no such session channel"),
                                     use_awaitable);
          break;
        }
        websocket::stream<beast::tcp_stream> ws(std::move(stream));
        beast::get_lowest_layer(ws).expires_never();
        co_await ws.async_accept(req, use_awaitable);
        auto channel = std::make_shared<Channel>(std::move(ws), svc, parts[1]);
        co_await channel->run();
        co_return;
      }
      const Response res = route(svc, req);
      const bool keep = res.keep_alive();
      co_await http::async_write(stream, res, use_awaitable);
      if (!keep) break;
    }
  } catch (const boost::system::system_error&) {
    co_return;
  }
  boost::system::error_code ec;
  stream.socket().shutdown(tcp::socket::shutdown_send, ec);
}

}  // namespace

struct Server::Impl {
  SessionService& svc;
  asio::io_context io{1};
  tcp::acceptor acceptor{io};

  explicit Impl(SessionService& s) : svc(s) {}

  awaitable<void> accept_loop() {
    for (;;) {
      boost::system::error_code ec;
      tcp::socket socket = co_await acceptor.async_accept(asio::redirect_error(use_awaitable, ec));
      if (ec) {
        if (!acceptor.is_open()) co_return;
        continue;
      }
      asio::co_spawn(io, serve_connection(std::move(socket), svc), asio::detached);
    }
  }
};

Server::Server(SessionService& service, unsigned short port, const std::string& address)
    : impl_(std::make_unique<Impl>(service)) {
  const tcp::endpoint ep{asio::ip::make_address(address), port};
  impl_->acceptor.open(ep.protocol());
  impl_->acceptor.set_option(asio::socket_base::reuse_address(true));
  impl_->acceptor.bind(ep);
  impl_->acceptor.listen();
  asio::co_spawn(impl_->io, impl_->accept_loop(), asio::detached);
}

Server::~Server() { stop(); }

unsigned short Server::port() const { return impl_->acceptor.local_endpoint().port(); }

void Server::run() { impl_->io.run(); }

void Server::stop() {
  asio::post(impl_->io, [this] {
    boost::system::error_code ec;
    impl_->acceptor.close(ec);
    impl_->io.stop();
  });
}

}  // namespace persona

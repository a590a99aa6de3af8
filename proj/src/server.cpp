// Copyright 2026 The AMS Strands Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <ams/server.hpp>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include <chrono>
#include <condition_variable>
#include <deque>
#include <map>
#include <thread>

namespace ams {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using nlohmann::json;
using Text = std::shared_ptr<const std::string>;

namespace {

Text make_text(std::string s) { return std::make_shared<const std::string>(std::move(s)); }

struct Outgoing {
  enum Kind { Message, Frame, Close } kind = Message;
  Text text;     // JSON message, or the frame header
  Text payload;  // binary frame body
};

}  // namespace

class Connection;

struct SessionServer::Impl {
  Impl(Session& s, ServerOptions o) : session(s), options(std::move(o)), acceptor(ioc) {}

  Session& session;
  ServerOptions options;
  net::io_context ioc;
  std::optional<net::executor_work_guard<net::io_context::executor_type>> work;
  tcp::acceptor acceptor;
  std::thread io_thread, sim_thread;
  std::atomic<bool> stopping{false};
  std::atomic<bool> running{false};
  std::mutex wait_mutex;
  std::condition_variable wait_cv;

  // io-thread state
  std::map<std::uint64_t, std::shared_ptr<Connection>> clients;
  std::uint64_t next_client = 1;
  std::optional<std::uint64_t> editor;
  Text topology;
  Text last_header, last_payload;

  std::atomic<std::uint64_t> frames_broadcast{0};
  std::atomic<std::size_t> client_count{0};

  void do_accept();
  void broadcast(const Outgoing& out);
  void send_to(std::uint64_t client, const Outgoing& out);
  void remove(std::uint64_t id);
  void sim_loop();
};

class Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(tcp::socket socket, SessionServer::Impl& server, std::uint64_t id)
      : ws_(std::move(socket)), server_(server), id_(id) {}

  std::uint64_t id() const { return id_; }
  bool greeted() const { return greeted_; }

  void start() {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->server_.clients[self->id_] = self;
      self->server_.client_count = self->server_.clients.size();
      self->read();
    });
  }

  void send(Outgoing out) {
    if (closing_) return;
    if (out.kind == Outgoing::Frame) {
      // Latest-frame mailbox: an unsent older frame is replaced.
      for (auto it = queue_.begin(); it != queue_.end();) {
        const bool in_flight = writing_ && it == queue_.begin();
        if (it->kind == Outgoing::Frame && !in_flight) it = queue_.erase(it);
        else ++it;
      }
    }
    if (out.kind == Outgoing::Close) closing_ = true;
    queue_.push_back(std::move(out));
    if (!writing_) write_next();
  }

  void shutdown() {
    beast::error_code ec;
    beast::get_lowest_layer(ws_).socket().shutdown(tcp::socket::shutdown_both, ec);
    beast::get_lowest_layer(ws_).socket().close(ec);
  }

 private:
  void send_json(const json& j) { send({Outgoing::Message, make_text(j.dump()), nullptr}); }

  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->server_.remove(self->id_);
        return;
      }
      if (!self->ws_.got_text()) {
        self->send_json(error_message("malformed-message", "control messages must be JSON text"));
      } else {
        self->handle(beast::buffers_to_string(self->buffer_.data()));
      }
      self->buffer_.consume(self->buffer_.size());
      if (!self->closing_) self->read();
    });
  }

  void handle(const std::string& text) {
    json msg;
    try {
      msg = json::parse(text);
    } catch (const json::parse_error& e) {
      send_json(error_message("malformed-message", e.what()));
      return;
    }
    if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string()) {
      send_json(error_message("malformed-message", "message must be an object with a string \"type\""));
      return;
    }
    const std::string type = msg["type"];
    if (!greeted_) {
      if (type != "hello") {
        send_json(error_message("hello-required", "send hello before any other message"));
        return;
      }
      const std::string version = msg.value("version", std::string());
      if (version != kProtocolVersion) {
        const std::string why = "protocol version mismatch: server speaks " + std::string(kProtocolVersion) +
                                ", client sent '" + version + "'";
        send_json(error_message("version-mismatch", why));
        send({Outgoing::Close, make_text("version mismatch"), nullptr});
        return;
      }
      greeted_ = true;
      std::string role = "viewer";
      json reply = {{"type", "hello"}, {"version", kProtocolVersion}, {"client", id_}, {"fps", server_.options.fps}};
      if (msg.value("role", std::string("viewer")) == "editor") {
        if (!server_.editor) {
          server_.editor = id_;
          editor_ = true;
          role = "editor";
        } else {
          reply["notice"] = "editor-taken";
        }
      }
      reply["role"] = role;
      send_json(reply);
      send({Outgoing::Message, server_.topology, nullptr});
      if (server_.last_header) send({Outgoing::Frame, server_.last_header, server_.last_payload});
      return;
    }
    if (type == "hello") {
      send_json(error_message("malformed-message", "hello already received"));
      return;
    }
    if (!editor_) {
      send_json(error_message("read-only", "this connection is a viewer"));
      return;
    }
    try {
      server_.session.submit(msg, id_);
    } catch (const ProtocolError& e) {
      send_json(error_message(e.code(), e.what()));
    }
  }

  void write_next() {
    if (queue_.empty()) {
      writing_ = false;
      return;
    }
    writing_ = true;
    Outgoing& out = queue_.front();
    auto done = [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_write(ec); };
    if (out.kind == Outgoing::Close) {
      ws_.async_close(websocket::close_reason(websocket::close_code::policy_error, *out.text),
                      [self = shared_from_this()](beast::error_code) { self->server_.remove(self->id_); });
      return;
    }
    const bool binary_part = out.kind == Outgoing::Frame && frame_part_ == 1;
    ws_.text(!binary_part);
    const Text& data = binary_part ? out.payload : out.text;
    ws_.async_write(net::buffer(*data), std::move(done));
  }

  void on_write(beast::error_code ec) {
    if (ec) {
      queue_.clear();
      writing_ = false;
      server_.remove(id_);
      return;
    }
    if (queue_.front().kind == Outgoing::Frame && frame_part_ == 0) {
      frame_part_ = 1;
    } else {
      frame_part_ = 0;
      queue_.pop_front();
    }
    write_next();
  }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  SessionServer::Impl& server_;
  std::uint64_t id_;
  std::deque<Outgoing> queue_;
  int frame_part_ = 0;
  bool writing_ = false;
  bool greeted_ = false;
  bool editor_ = false;
  bool closing_ = false;
};

void SessionServer::Impl::do_accept() {
  acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
    if (ec) return;  // acceptor closed
    std::make_shared<Connection>(std::move(socket), *this, next_client++)->start();
    do_accept();
  });
}

void SessionServer::Impl::broadcast(const Outgoing& out) {
  for (auto& [id, c] : clients)
    if (c->greeted()) c->send(out);
}

void SessionServer::Impl::send_to(std::uint64_t client, const Outgoing& out) {
  auto it = clients.find(client);
  if (it != clients.end()) it->second->send(out);
}

void SessionServer::Impl::remove(std::uint64_t id) {
  clients.erase(id);
  client_count = clients.size();
  if (editor == id) editor.reset();
}

void SessionServer::Impl::sim_loop() {
  using Clock = std::chrono::steady_clock;
  const auto period = std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(1.0 / options.fps));
  auto next = Clock::now();
  while (!stopping) {
    TickResult r = session.tick();
    std::vector<std::pair<std::uint64_t, Text>> replies;
    for (const auto& e : r.edits)
      if (e.client != 0) replies.emplace_back(e.client, make_text(e.to_json().dump()));
    Text topo = r.topology_changed ? make_text(session.topology_message().dump()) : nullptr;
    Text failure = r.divergence ? make_text(error_message(r.divergence->code, r.divergence->message).dump()) : nullptr;
    Text header, payload;
    if (r.frame) {
      const FrameDiagnostics& d = r.frame->diagnostics;
      header = make_text(json{{"type", "frame"},
                              {"index", r.frame->sequence},
                              {"particles", r.frame->frame.particle_count()},
                              {"time", d.time},
                              {"max_velocity", d.max_velocity},
                              {"max_edge_strain", d.max_edge_strain}}
                             .dump());
      payload = make_text(encode_frame(r.frame->frame));
    }
    net::post(ioc, [this, replies = std::move(replies), topo, failure, header, payload] {
      // Acks go out before the topology and frame that reflect the edit.
      for (const auto& [client, text] : replies) send_to(client, {Outgoing::Message, text, nullptr});
      if (topo) {
        topology = topo;
        broadcast({Outgoing::Message, topo, nullptr});
      }
      if (failure) broadcast({Outgoing::Message, failure, nullptr});
      if (header) {
        last_header = header;
        last_payload = payload;
        broadcast({Outgoing::Frame, header, payload});
        ++frames_broadcast;
      }
    });
    next += period;
    const auto now = Clock::now();
    if (next < now) next = now;
    std::this_thread::sleep_until(next);
  }
}

SessionServer::SessionServer(Session& session, ServerOptions options)
    : impl_(std::make_unique<Impl>(session, std::move(options))) {
  if (!(impl_->options.fps > 0.0)) throw InvalidArgument("server fps must be positive");
}

SessionServer::~SessionServer() { stop(); }

unsigned short SessionServer::start() {
  Impl& s = *impl_;
  if (s.running) throw InvalidArgument("server already running");
  beast::error_code ec;
  const auto address = net::ip::make_address(s.options.address, ec);
  if (ec) throw IoError("invalid listen address '" + s.options.address + "'");
  const tcp::endpoint endpoint(address, s.options.port);
  s.acceptor.open(endpoint.protocol(), ec);
  if (!ec) s.acceptor.set_option(net::socket_base::reuse_address(true), ec);
  if (!ec) s.acceptor.bind(endpoint, ec);
  if (!ec) s.acceptor.listen(net::socket_base::max_listen_connections, ec);
  if (ec) {
    beast::error_code ignored;
    s.acceptor.close(ignored);
    throw IoError("cannot listen on " + s.options.address + ":" + std::to_string(s.options.port) + ": " + ec.message());
  }
  const unsigned short port = s.acceptor.local_endpoint().port();
  s.topology = make_text(s.session.topology_message().dump());
  s.work.emplace(net::make_work_guard(s.ioc));
  s.do_accept();
  s.stopping = false;
  s.running = true;
  s.io_thread = std::thread([&s] { s.ioc.run(); });
  s.sim_thread = std::thread([&s] { s.sim_loop(); });
  return port;
}

void SessionServer::stop() {
  Impl& s = *impl_;
  if (!s.running.exchange(false)) return;
  s.stopping = true;
  if (s.sim_thread.joinable()) s.sim_thread.join();
  net::post(s.ioc, [&s] {
    beast::error_code ec;
    s.acceptor.close(ec);
    for (auto& [id, c] : s.clients) c->shutdown();
    s.clients.clear();
    s.client_count = 0;
    s.work.reset();
  });
  if (s.io_thread.joinable()) s.io_thread.join();
  {
    std::lock_guard lock(s.wait_mutex);
  }
  s.wait_cv.notify_all();
}

bool SessionServer::running() const { return impl_->running; }

void SessionServer::wait() {
  std::unique_lock lock(impl_->wait_mutex);
  impl_->wait_cv.wait(lock, [this] { return !impl_->running; });
}

std::uint64_t SessionServer::frames_broadcast() const { return impl_->frames_broadcast; }
std::size_t SessionServer::client_count() const { return impl_->client_count; }

}  // namespace ams

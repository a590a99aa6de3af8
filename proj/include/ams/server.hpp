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

#pragma once

#include <ams/session.hpp>

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>

namespace ams {

class Connection;

struct ServerOptions {
  std::string address = "127.0.0.1";
  unsigned short port = 0;  // 0 picks a free port
  double fps = 30.0;        // simulation and broadcast rate
};

// Serves one Session over websockets ("ams-proto/1"). The simulation runs on
// its own thread; network I/O runs on another and only sees immutable frame
// snapshots. Clients send hello first; the first editor-role client may edit,
// everyone else is a read-only viewer.
class SessionServer {
 public:
  SessionServer(Session& session, ServerOptions options);
  ~SessionServer();
  SessionServer(const SessionServer&) = delete;
  SessionServer& operator=(const SessionServer&) = delete;

  // Binds and starts both threads; returns the bound port. Throws IoError
  // when the address cannot be bound.
  unsigned short start();
  void stop();
  bool running() const;
  // Blocks until stop() is called from another thread or a signal handler.
  void wait();

  std::uint64_t frames_broadcast() const;
  std::size_t client_count() const;

 private:
  friend class Connection;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ams

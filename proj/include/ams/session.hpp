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

#include <ams/errors.hpp>
#include <ams/frame_io.hpp>
#include <ams/simulation.hpp>

#include <json.hpp>

#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace ams {

inline constexpr const char* kProtocolVersion = "ams-proto/1";

// Protocol-level failure with a stable machine-readable code.
class ProtocolError : public Error {
 public:
  ProtocolError(std::string code, const std::string& message) : Error(message), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

nlohmann::json error_message(const std::string& code, const std::string& message);

enum class EditOp { Trim, Grab, GrabMove, Release, Param, Wind, Play, Pause, Reset };
const char* to_string(EditOp op);

struct Edit {
  std::uint64_t id = 0;
  std::uint64_t client = 0;  // originating connection, 0 for local callers
  EditOp op = EditOp::Play;
  nlohmann::json args = nlohmann::json::object();
};

// Parses a client control message (edit / param / wind / play / pause /
// reset) into an edit. Throws ProtocolError("malformed-edit" or "unknown-op").
Edit parse_edit(const nlohmann::json& message);

struct EditOutcome {
  std::uint64_t id = 0;
  std::uint64_t client = 0;
  EditOp op = EditOp::Play;
  bool ok = true;
  std::string code;  // error code when !ok
  std::string message;
  bool topology_changed = false;

  nlohmann::json to_json() const;  // ack or error message
};

struct FrameSnapshot {
  std::uint64_t sequence = 0;  // strictly increasing across the session
  Frame frame;                 // frame.index == sequence
  FrameDiagnostics diagnostics;
};

struct TickResult {
  std::vector<EditOutcome> edits;
  bool topology_changed = false;
  std::optional<FrameSnapshot> frame;
  std::optional<EditOutcome> divergence;  // set when the step diverged
};

// Simulation plus play state and an ordered edit queue. submit() may be
// called from any thread; tick() runs on the simulation thread and applies
// queued edits strictly between frames.
class Session {
 public:
  explicit Session(Simulation simulation, bool playing = true);

  std::uint64_t submit(Edit edit);
  std::uint64_t submit(const nlohmann::json& message, std::uint64_t client = 0);

  TickResult tick();
  std::vector<EditOutcome> apply_pending();

  bool playing() const;
  std::uint64_t sequence() const { return sequence_; }
  std::vector<std::uint32_t> topology() const;
  nlohmann::json topology_message() const;
  FrameSnapshot snapshot() const;  // current state without stepping
  Simulation& simulation() { return sim_; }
  const Simulation& simulation() const { return sim_; }

 private:
  EditOutcome apply(const Edit& edit);

  Simulation sim_;
  mutable std::mutex mutex_;  // guards queue_, next_id_, playing_
  std::deque<Edit> queue_;
  std::uint64_t next_id_ = 1;
  bool playing_;
  std::uint64_t sequence_ = 0;
};

}  // namespace ams

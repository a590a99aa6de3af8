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

#include <ams/session.hpp>

namespace ams {

using nlohmann::json;

json error_message(const std::string& code, const std::string& message) {
  return {{"type", "error"}, {"code", code}, {"message", message}};
}

const char* to_string(EditOp op) {
  switch (op) {
    case EditOp::Trim: return "trim";
    case EditOp::Grab: return "grab";
    case EditOp::GrabMove: return "grab-move";
    case EditOp::Release: return "release";
    case EditOp::Param: return "param";
    case EditOp::Wind: return "wind";
    case EditOp::Play: return "play";
    case EditOp::Pause: return "pause";
    case EditOp::Reset: return "reset";
  }
  return "unknown";
}

namespace {

[[noreturn]] void malformed(const std::string& why) { throw ProtocolError("malformed-edit", why); }

void require_index(const json& args, const char* key) {
  const bool ok = args.contains(key) && args[key].is_number_integer() &&
                  (args[key].is_number_unsigned() || args[key].get<std::int64_t>() >= 0);
  if (!ok) malformed(std::string("'") + key + "' must be a non-negative integer");
}

void require_number(const json& args, const char* key) {
  if (!args.contains(key) || !args[key].is_number()) malformed(std::string("'") + key + "' must be a number");
}

void require_vec3(const json& args, const char* key) {
  const bool ok = args.contains(key) && args[key].is_array() && args[key].size() == 3 &&
                  std::all_of(args[key].begin(), args[key].end(), [](const json& v) { return v.is_number(); });
  if (!ok) malformed(std::string("'") + key + "' must be a 3-number array");
}

Vec3 vec3(const json& j) { return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()}; }

}  // namespace

Edit parse_edit(const json& message) {
  if (!message.is_object() || !message.contains("type") || !message["type"].is_string())
    malformed("message must be an object with a string \"type\"");
  const std::string type = message["type"];
  Edit edit;
  if (type == "play" || type == "pause" || type == "reset") {
    edit.op = type == "play" ? EditOp::Play : type == "pause" ? EditOp::Pause : EditOp::Reset;
    return edit;
  }
  if (type == "param") {
    if (!message.contains("key") || !message["key"].is_string()) malformed("'key' must be a string");
    require_number(message, "value");
    edit.op = EditOp::Param;
    edit.args = {{"key", message["key"]}, {"value", message["value"]}};
    return edit;
  }
  if (type == "wind") {
    edit.op = EditOp::Wind;
    if (message.contains("acceleration")) require_vec3(message, "acceleration");
    if (message.contains("noise") && !message["noise"].is_object()) malformed("'noise' must be an object");
    edit.args = message;
    edit.args.erase("type");
    return edit;
  }
  if (type != "edit") throw ProtocolError("unknown-op", "unknown message type '" + type + "'");
  if (!message.contains("op") || !message["op"].is_string()) malformed("edit needs a string 'op'");
  const json args = message.value("args", json::object());
  if (!args.is_object()) malformed("'args' must be an object");
  const std::string op = message["op"];
  if (op == "trim") {
    edit.op = EditOp::Trim;
    require_index(args, "strand");
    require_number(args, "fraction");
  } else if (op == "grab") {
    edit.op = EditOp::Grab;
    require_index(args, "strand");
    require_index(args, "particle");
    require_vec3(args, "target");
    if (args.contains("stiffness")) require_number(args, "stiffness");
  } else if (op == "grab-move") {
    edit.op = EditOp::GrabMove;
    require_index(args, "strand");
    require_vec3(args, "target");
  } else if (op == "release") {
    edit.op = EditOp::Release;
    require_index(args, "strand");
  } else {
    throw ProtocolError("unknown-op", "unknown edit op '" + op + "'");
  }
  edit.args = args;
  return edit;
}

json EditOutcome::to_json() const {
  if (!ok) {
    json j = error_message(code, message);
    j["edit"] = id;
    return j;
  }
  return {{"type", "ack"}, {"edit", id}, {"op", to_string(op)}};
}

Session::Session(Simulation simulation, bool playing) : sim_(std::move(simulation)), playing_(playing) {}

std::uint64_t Session::submit(Edit edit) {
  std::lock_guard lock(mutex_);
  edit.id = next_id_++;
  queue_.push_back(std::move(edit));
  return queue_.back().id;
}

std::uint64_t Session::submit(const json& message, std::uint64_t client) {
  Edit edit = parse_edit(message);
  edit.client = client;
  return submit(std::move(edit));
}

bool Session::playing() const {
  std::lock_guard lock(mutex_);
  return playing_;
}

std::vector<std::uint32_t> Session::topology() const { return sim_.topology(); }

json Session::topology_message() const {
  return {{"type", "topology"}, {"strands", sim_.topology()}, {"frame", sequence_}};
}

FrameSnapshot Session::snapshot() const {
  FrameSnapshot snap;
  snap.sequence = sequence_;
  snap.frame = sim_.capture();
  snap.frame.index = static_cast<std::uint32_t>(sequence_);
  snap.diagnostics = sim_.last_diagnostics();
  return snap;
}

EditOutcome Session::apply(const Edit& edit) {
  EditOutcome out;
  out.id = edit.id;
  out.client = edit.client;
  out.op = edit.op;
  const json& a = edit.args;
  auto fail = [&](std::string code, std::string message) {
    out.ok = false;
    out.code = std::move(code);
    out.message = std::move(message);
    return out;
  };
  auto strand_ok = [&](const char* key) { return a[key].get<std::size_t>() < sim_.strand_count(); };
  try {
    switch (edit.op) {
      case EditOp::Trim: {
        if (!strand_ok("strand")) return fail("unknown-strand", "no strand " + a["strand"].dump());
        const std::size_t s = a["strand"];
        const std::size_t before = sim_.strands()[s].particle_count();
        sim_.trim(s, a["fraction"].get<double>());
        out.topology_changed = sim_.strands()[s].particle_count() != before;
        break;
      }
      case EditOp::Grab: {
        if (!strand_ok("strand")) return fail("unknown-strand", "no strand " + a["strand"].dump());
        const std::size_t s = a["strand"], p = a["particle"];
        if (p == 0 || p >= sim_.strands()[s].particle_count())
          return fail("unknown-particle", "no grabbable particle " + std::to_string(p) + " on strand " + std::to_string(s));
        sim_.grab(s, p, vec3(a["target"]), a.value("stiffness", 1.0));
        break;
      }
      case EditOp::GrabMove:
        if (!strand_ok("strand")) return fail("unknown-strand", "no strand " + a["strand"].dump());
        sim_.move_grab(a["strand"], vec3(a["target"]));
        break;
      case EditOp::Release:
        if (!strand_ok("strand")) return fail("unknown-strand", "no strand " + a["strand"].dump());
        sim_.release(a["strand"]);
        break;
      case EditOp::Param:
        sim_.set_param(a["key"].get<std::string>(), a["value"].get<double>());
        break;
      case EditOp::Wind: {
        WindConfig wind = sim_.scene().wind;
        if (a.contains("acceleration")) wind.uniform = VectorTrack({{0.0, vec3(a["acceleration"])}});
        if (a.contains("noise")) {
          const json& n = a["noise"];
          wind.noise.amplitude = n.value("amplitude", wind.noise.amplitude);
          wind.noise.frequency = n.value("frequency", wind.noise.frequency);
          wind.noise.speed = n.value("speed", wind.noise.speed);
          wind.noise.octaves = n.value("octaves", wind.noise.octaves);
          if (wind.noise.amplitude < 0.0 || wind.noise.octaves < 0 || wind.noise.octaves > 16)
            return fail("invalid-value", "wind noise amplitude must be >= 0 and octaves in [0, 16]");
        }
        sim_.set_wind(wind);
        break;
      }
      case EditOp::Play:
      case EditOp::Pause: {
        std::lock_guard lock(mutex_);
        playing_ = edit.op == EditOp::Play;
        break;
      }
      case EditOp::Reset:
        sim_.reset();
        out.topology_changed = true;
        break;
    }
  } catch (const InvalidArgument& e) {
    return fail("invalid-value", e.what());
  } catch (const json::exception& e) {
    return fail("malformed-edit", e.what());
  }
  return out;
}

std::vector<EditOutcome> Session::apply_pending() {
  std::deque<Edit> pending;
  {
    std::lock_guard lock(mutex_);
    pending.swap(queue_);
  }
  std::vector<EditOutcome> out;
  for (const Edit& e : pending) out.push_back(apply(e));
  return out;
}

TickResult Session::tick() {
  TickResult result;
  result.edits = apply_pending();
  for (const auto& e : result.edits) result.topology_changed = result.topology_changed || e.topology_changed;
  if (!playing()) return result;
  try {
    sim_.step_frame();
  } catch (const DivergenceError& e) {
    {
      std::lock_guard lock(mutex_);
      playing_ = false;
    }
    EditOutcome d;
    d.ok = false;
    d.code = "divergence";
    d.message = e.what();
    result.divergence = d;
    return result;
  }
  ++sequence_;
  result.frame = snapshot();
  return result;
}

}  // namespace ams

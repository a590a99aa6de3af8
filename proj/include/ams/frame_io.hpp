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

#include <ams/types.hpp>

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string_view>
#include <ostream>
#include <string>
#include <vector>

namespace ams {

// One captured frame: "AMSF", u32 frame index, u32 particle count, f32 xyz.
struct Frame {
  std::uint32_t index = 0;
  std::vector<float> positions;  // xyz triples in asset strand order

  std::size_t particle_count() const { return positions.size() / 3; }
  bool operator==(const Frame&) const = default;
};

Frame make_frame(std::uint32_t index, std::span<const Vec3List> strand_positions);

void write_frame(const Frame& frame, std::ostream& out);
std::string encode_frame(const Frame& frame);
Frame read_frame(std::istream& in);
Frame decode_frame(std::string_view bytes);

std::string frame_file_name(std::uint32_t index);  // frame_000042.amsf

// Writes every `stride`-th frame into a directory and rejects frames whose
// particle count differs from the first one written.
class FrameSequenceWriter {
 public:
  FrameSequenceWriter(std::filesystem::path directory, int stride = 1);
  // Returns the written path, or nullopt when the stride skips the frame.
  std::optional<std::filesystem::path> write(const Frame& frame);
  const std::filesystem::path& directory() const { return directory_; }

 private:
  std::filesystem::path directory_;
  int stride_;
  std::optional<std::size_t> particles_;
};

// Loads all frames of a directory in index order; throws FormatError on
// inconsistent particle counts.
std::vector<Frame> read_frame_sequence(const std::filesystem::path& directory);

}  // namespace ams

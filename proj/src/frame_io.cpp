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

#include <ams/frame_io.hpp>

#include <ams/binary_io.hpp>
#include <ams/errors.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

namespace ams {

Frame make_frame(std::uint32_t index, std::span<const Vec3List> strand_positions) {
  Frame frame;
  frame.index = index;
  for (const Vec3List& strand : strand_positions)
    for (const Vec3& p : strand)
      for (int a = 0; a < 3; ++a) frame.positions.push_back(static_cast<float>(p[a]));
  return frame;
}

std::string encode_frame(const Frame& frame) {
  if (frame.positions.size() % 3 != 0) throw InvalidArgument("frame position array is not a multiple of 3");
  std::string out = "AMSF";
  out.reserve(12 + 4 * frame.positions.size());
  binary::append_u32(out, frame.index);
  binary::append_u32(out, static_cast<std::uint32_t>(frame.particle_count()));
  for (float f : frame.positions) binary::append_f32(out, f);
  return out;
}

void write_frame(const Frame& frame, std::ostream& out) {
  const std::string bytes = encode_frame(frame);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

Frame decode_frame(std::string_view bytes) {
  if (bytes.size() < 12 || bytes.substr(0, 3) != "AMS") throw FormatError(FormatErrorKind::MalformedHeader, "missing AMSF header");
  if (bytes[3] != 'F') throw FormatError(FormatErrorKind::VersionMismatch, "not an AMSF frame");
  Frame frame;
  frame.index = binary::read_u32(bytes, 4);
  const std::size_t count = binary::read_u32(bytes, 8);
  if ((bytes.size() - 12) / 12 < count) throw FormatError(FormatErrorKind::TruncatedPayload, "truncated frame payload");
  if (bytes.size() != 12 + 12 * count) throw FormatError(FormatErrorKind::MalformedBody, "trailing bytes after frame");
  frame.positions.resize(3 * count);
  for (std::size_t k = 0; k < frame.positions.size(); ++k)
    frame.positions[k] = std::bit_cast<float>(binary::read_u32(bytes, 12 + 4 * k));
  return frame;
}

Frame read_frame(std::istream& in) {
  const std::string data{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return decode_frame(data);
}

std::string frame_file_name(std::uint32_t index) {
  char name[32];
  std::snprintf(name, sizeof name, "frame_%06u.amsf", index);
  return name;
}

FrameSequenceWriter::FrameSequenceWriter(std::filesystem::path directory, int stride)
    : directory_(std::move(directory)), stride_(stride) {
  if (stride_ < 1) throw InvalidArgument("frame stride must be at least 1");
  std::error_code ec;
  std::filesystem::create_directories(directory_, ec);
  if (ec || !std::filesystem::is_directory(directory_))
    throw IoError("cannot create output directory " + directory_.string());
}

std::optional<std::filesystem::path> FrameSequenceWriter::write(const Frame& frame) {
  if (particles_ && *particles_ != frame.particle_count())
    throw FormatError(FormatErrorKind::MalformedBody, "frame " + std::to_string(frame.index) + " has " +
                                                          std::to_string(frame.particle_count()) + " particles, expected " +
                                                          std::to_string(*particles_));
  particles_ = frame.particle_count();
  if (frame.index % static_cast<std::uint32_t>(stride_) != 0) return std::nullopt;
  const auto path = directory_ / frame_file_name(frame.index);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write frame " + path.string());
  write_frame(frame, out);
  if (!out) throw IoError("failed writing frame " + path.string());
  return path;
}

std::vector<Frame> read_frame_sequence(const std::filesystem::path& directory) {
  std::vector<std::filesystem::path> files;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(directory, ec))
    if (entry.is_regular_file() && entry.path().extension() == ".amsf") files.push_back(entry.path());
  if (ec) throw IoError("cannot read frame directory " + directory.string());
  std::sort(files.begin(), files.end());
  std::vector<Frame> frames;
  for (const auto& path : files) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open frame " + path.string());
    frames.push_back(read_frame(in));
    if (frames.front().particle_count() != frames.back().particle_count())
      throw FormatError(FormatErrorKind::MalformedBody, "inconsistent particle counts in " + path.string());
  }
  std::sort(frames.begin(), frames.end(), [](const Frame& a, const Frame& b) { return a.index < b.index; });
  return frames;
}

}  // namespace ams

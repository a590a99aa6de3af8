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

#include "support.hpp"

#include <ams/errors.hpp>
#include <ams/frame_io.hpp>
#include <ams/strand_io.hpp>

#include <gtest/gtest.h>

#include <bit>
#include <fstream>
#include <sstream>

using namespace ams;

namespace {

// Little-endian bytes written by hand, independent of the library writers.
void le32(std::string& s, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) s.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
}
void lef(std::string& s, float f) { le32(s, std::bit_cast<std::uint32_t>(f)); }

StrandAsset two_strands() {
  StrandAsset a;
  a.add_strand({Vec3(0, 0, 0), Vec3(0, 0, 1)});
  a.add_strand({Vec3(0.1, 0.2, 0.3), Vec3(-1e-7, 5e3, 0.1), Vec3(1.0 / 3.0, 2, 3)});
  return a;
}

template <class Fn>
void expect_format_error(Fn&& fn, FormatErrorKind kind) {
  try {
    fn();
    ADD_FAILURE() << "expected FormatError " << to_string(kind);
  } catch (const FormatError& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
  }
}

void write_file(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream(p, std::ios::binary) << bytes;
}

}  // namespace

TEST(StrandBinary, LayoutMatchesHandEncoding) {
  const StrandAsset a = two_strands();
  std::string expect = "AMS1";
  le32(expect, 2);
  le32(expect, 2);
  for (float f : {0.f, 0.f, 0.f, 0.f, 0.f, 1.f}) lef(expect, f);
  le32(expect, 3);
  for (std::size_t k = 6; k < a.positions.size(); ++k) lef(expect, a.positions[k]);
  std::ostringstream out;
  write_strands_binary(a, out);
  EXPECT_EQ(out.str(), expect);
}

TEST(StrandBinary, RoundTripBitExact) {
  amstest::TempDir dir("io");
  const StrandAsset a = two_strands();
  save_strands(a, dir / "a.ams");
  const StrandAsset b = load_strands(dir / "a.ams");
  ASSERT_EQ(b.positions.size(), a.positions.size());
  for (std::size_t k = 0; k < a.positions.size(); ++k)
    EXPECT_EQ(std::bit_cast<std::uint32_t>(a.positions[k]), std::bit_cast<std::uint32_t>(b.positions[k]));
  EXPECT_EQ(a, b);
}

TEST(StrandBinary, Errors) {
  amstest::TempDir dir("io");
  std::ostringstream out;
  write_strands_binary(two_strands(), out);
  const std::string good = out.str();

  write_file(dir / "empty.ams", "");
  expect_format_error([&] { load_strands(dir / "empty.ams"); }, FormatErrorKind::MalformedHeader);
  write_file(dir / "v2.ams", "AMS2" + good.substr(4));
  expect_format_error([&] { load_strands(dir / "v2.ams"); }, FormatErrorKind::VersionMismatch);
  write_file(dir / "short.ams", good.substr(0, good.size() - 5));
  expect_format_error([&] { load_strands(dir / "short.ams"); }, FormatErrorKind::TruncatedPayload);
  write_file(dir / "long.ams", good + "xx");
  expect_format_error([&] { load_strands(dir / "long.ams"); }, FormatErrorKind::MalformedBody);

  std::string one_vertex = "AMS1";
  le32(one_vertex, 1);
  le32(one_vertex, 1);
  for (int k = 0; k < 3; ++k) lef(one_vertex, 0.f);
  write_file(dir / "one.ams", one_vertex);
  expect_format_error([&] { load_strands(dir / "one.ams"); }, FormatErrorKind::MalformedBody);
  EXPECT_THROW(load_strands(dir / "missing.ams"), IoError);
}

TEST(StrandText, ParsesMinimalExample) {
  std::istringstream in("1\n2\n0 0 0\n0 0 1\n");
  const StrandAsset a = read_strands_text(in);
  ASSERT_EQ(a.strand_count(), 1u);
  EXPECT_EQ(a.vertex_counts[0], 2u);
  EXPECT_EQ(a.positions, (std::vector<float>{0, 0, 0, 0, 0, 1}));
}

TEST(StrandText, RoundTripAndSniffing) {
  amstest::TempDir dir("io");
  const StrandAsset a = two_strands();
  save_strands(a, dir / "a.txt");
  {
    std::ifstream in(dir / "a.txt");
    std::string first;
    std::getline(in, first);
    EXPECT_EQ(first, "2");
  }
  EXPECT_EQ(load_strands(dir / "a.txt"), a);
}

TEST(StrandText, Errors) {
  auto parse = [](const std::string& s) {
    std::istringstream in(s);
    return read_strands_text(in);
  };
  expect_format_error([&] { parse(""); }, FormatErrorKind::MalformedHeader);
  expect_format_error([&] { parse("two\n"); }, FormatErrorKind::MalformedHeader);
  expect_format_error([&] { parse("1\n2\n0 0 0\n"); }, FormatErrorKind::TruncatedPayload);
  expect_format_error([&] { parse("1\n2\n0 0 0\n0 x 1\n"); }, FormatErrorKind::MalformedBody);
  expect_format_error([&] { parse("1\n1\n0 0 0\n"); }, FormatErrorKind::MalformedBody);
  expect_format_error([&] { parse("1\n2\n0 0 0\n0 0 1\n5 5 5\n"); }, FormatErrorKind::MalformedBody);
}

TEST(Frame, EncodingMatchesHandLayout) {
  const std::vector<Vec3List> strands{{Vec3(1, 2, 3), Vec3(4, 5, 6)}, {Vec3(-1, 0.5, 0.25), Vec3(0, 0, 0)}};
  const Frame f = make_frame(7, strands);
  std::string expect = "AMSF";
  le32(expect, 7);
  le32(expect, 4);
  for (float v : {1.f, 2.f, 3.f, 4.f, 5.f, 6.f, -1.f, 0.5f, 0.25f, 0.f, 0.f, 0.f}) lef(expect, v);
  EXPECT_EQ(encode_frame(f), expect);
  EXPECT_EQ(decode_frame(expect), f);
}

TEST(Frame, DecodeErrors) {
  const std::string good = encode_frame(make_frame(0, std::vector<Vec3List>{{Vec3(1, 2, 3), Vec3(0, 0, 0)}}));
  expect_format_error([&] { decode_frame(""); }, FormatErrorKind::MalformedHeader);
  expect_format_error([&] { decode_frame("AMSX" + good.substr(4)); }, FormatErrorKind::VersionMismatch);
  expect_format_error([&] { decode_frame(good.substr(0, good.size() - 1)); }, FormatErrorKind::TruncatedPayload);
  expect_format_error([&] { decode_frame(good + "z"); }, FormatErrorKind::MalformedBody);
}

TEST(FrameSequence, WritesStrideAndReadsBackInOrder) {
  amstest::TempDir dir("frames");
  FrameSequenceWriter writer(dir.path, 2);
  std::vector<Frame> written;
  for (std::uint32_t i = 0; i < 5; ++i) {
    const Frame f = make_frame(i, std::vector<Vec3List>{{Vec3(i, 0, 0), Vec3(0, i, 0)}});
    const auto path = writer.write(f);
    EXPECT_EQ(path.has_value(), i % 2 == 0);
    if (path) {
      EXPECT_EQ(path->filename(), frame_file_name(i));
      written.push_back(f);
    }
  }
  EXPECT_EQ(frame_file_name(42), "frame_000042.amsf");
  EXPECT_EQ(read_frame_sequence(dir.path), written);
}

TEST(FrameSequence, InconsistentCountsRejected) {
  amstest::TempDir dir("frames");
  FrameSequenceWriter writer(dir.path);
  writer.write(make_frame(0, std::vector<Vec3List>{{Vec3::Zero(), Vec3::Ones()}}));
  expect_format_error(
      [&] { writer.write(make_frame(1, std::vector<Vec3List>{{Vec3::Zero(), Vec3::Ones(), Vec3::Ones()}})); },
      FormatErrorKind::MalformedBody);

  // Same check on read, with a file dropped in by hand.
  std::ofstream(dir / frame_file_name(1), std::ios::binary)
      << encode_frame(make_frame(1, std::vector<Vec3List>{{Vec3::Zero(), Vec3::Ones(), Vec3::Ones()}}));
  expect_format_error([&] { read_frame_sequence(dir.path); }, FormatErrorKind::MalformedBody);
}

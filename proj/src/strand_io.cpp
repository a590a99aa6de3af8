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

#include <ams/strand_io.hpp>

#include <ams/binary_io.hpp>
#include <ams/errors.hpp>

#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>
#include <string>

namespace ams {

std::size_t StrandAsset::total_vertices() const {
  std::size_t total = 0;
  for (auto c : vertex_counts) total += c;
  return total;
}

std::size_t StrandAsset::offset(std::size_t strand) const {
  std::size_t total = 0;
  for (std::size_t s = 0; s < strand; ++s) total += vertex_counts[s];
  return total;
}

Vec3List StrandAsset::strand_positions(std::size_t strand) const {
  const std::size_t first = offset(strand);
  Vec3List out(vertex_counts[strand]);
  for (std::size_t v = 0; v < out.size(); ++v) {
    const float* p = &positions[3 * (first + v)];
    out[v] = Vec3(p[0], p[1], p[2]);
  }
  return out;
}

void StrandAsset::add_strand(const Vec3List& vertices) {
  vertex_counts.push_back(static_cast<std::uint32_t>(vertices.size()));
  for (const Vec3& v : vertices)
    for (int a = 0; a < 3; ++a) positions.push_back(static_cast<float>(v[a]));
}

void StrandAsset::validate() const {
  for (std::size_t s = 0; s < vertex_counts.size(); ++s)
    if (vertex_counts[s] < 2)
      throw FormatError(FormatErrorKind::MalformedBody, "strand " + std::to_string(s) + " has fewer than 2 vertices");
  if (positions.size() != 3 * total_vertices())
    throw FormatError(FormatErrorKind::MalformedBody, "position array does not match vertex counts");
}

void write_strands_binary(const StrandAsset& asset, std::ostream& out) {
  asset.validate();
  binary::put_magic(out, "AMS1");
  binary::put_u32(out, static_cast<std::uint32_t>(asset.strand_count()));
  std::size_t cursor = 0;
  for (std::uint32_t count : asset.vertex_counts) {
    binary::put_u32(out, count);
    for (std::size_t k = 0; k < 3 * static_cast<std::size_t>(count); ++k) binary::put_f32(out, asset.positions[cursor++]);
  }
}

StrandAsset read_strands_binary(std::istream& in) {
  const std::string data{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (data.size() < 4 || data.compare(0, 3, "AMS") != 0)
    throw FormatError(FormatErrorKind::MalformedHeader, "missing AMS strand magic");
  if (data[3] != '1') {
    if (data[3] >= '0' && data[3] <= '9')
      throw FormatError(FormatErrorKind::VersionMismatch, std::string("unsupported strand format version ") + data[3]);
    throw FormatError(FormatErrorKind::MalformedHeader, "bad strand magic");
  }
  if (data.size() < 8) throw FormatError(FormatErrorKind::MalformedHeader, "missing strand count");
  const std::uint32_t strands = binary::read_u32(data, 4);
  std::size_t cursor = 8;
  StrandAsset asset;
  for (std::uint32_t s = 0; s < strands; ++s) {
    if (cursor + 4 > data.size()) throw FormatError(FormatErrorKind::TruncatedPayload, "truncated strand table");
    const std::uint32_t count = binary::read_u32(data, cursor);
    cursor += 4;
    if (count < 2)
      throw FormatError(FormatErrorKind::MalformedBody, "strand " + std::to_string(s) + " has fewer than 2 vertices");
    const std::size_t bytes = 12 * static_cast<std::size_t>(count);
    if (bytes > data.size() - cursor) throw FormatError(FormatErrorKind::TruncatedPayload, "truncated strand positions");
    asset.vertex_counts.push_back(count);
    for (std::size_t k = 0; k < 3 * static_cast<std::size_t>(count); ++k, cursor += 4)
      asset.positions.push_back(std::bit_cast<float>(binary::read_u32(data, cursor)));
  }
  if (cursor != data.size()) throw FormatError(FormatErrorKind::MalformedBody, "trailing bytes after strand data");
  return asset;
}

void write_strands_text(const StrandAsset& asset, std::ostream& out) {
  asset.validate();
  out.precision(std::numeric_limits<float>::max_digits10);
  out << asset.strand_count() << '\n';
  std::size_t cursor = 0;
  for (std::uint32_t count : asset.vertex_counts) {
    out << count << '\n';
    for (std::uint32_t v = 0; v < count; ++v, cursor += 3)
      out << asset.positions[cursor] << ' ' << asset.positions[cursor + 1] << ' ' << asset.positions[cursor + 2] << '\n';
  }
}

namespace {

// Reads one non-empty line; false at EOF.
bool next_line(std::istream& in, std::string& line) {
  while (std::getline(in, line))
    if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
  return false;
}

bool parse_count(const std::string& line, long long& value) {
  std::istringstream ls(line);
  std::string rest;
  return static_cast<bool>(ls >> value) && !(ls >> rest);
}

}  // namespace

StrandAsset read_strands_text(std::istream& in) {
  std::string line;
  long long strands = 0;
  if (!next_line(in, line)) throw FormatError(FormatErrorKind::MalformedHeader, "empty strand file");
  if (!parse_count(line, strands) || strands < 0)
    throw FormatError(FormatErrorKind::MalformedHeader, "expected a strand count, got '" + line + "'");
  StrandAsset asset;
  for (long long s = 0; s < strands; ++s) {
    long long count = 0;
    if (!next_line(in, line)) throw FormatError(FormatErrorKind::TruncatedPayload, "missing strand " + std::to_string(s));
    if (!parse_count(line, count)) throw FormatError(FormatErrorKind::MalformedBody, "bad vertex count '" + line + "'");
    if (count < 2)
      throw FormatError(FormatErrorKind::MalformedBody, "strand " + std::to_string(s) + " has fewer than 2 vertices");
    asset.vertex_counts.push_back(static_cast<std::uint32_t>(count));
    for (long long v = 0; v < count; ++v) {
      if (!next_line(in, line)) throw FormatError(FormatErrorKind::TruncatedPayload, "missing vertices");
      std::istringstream ls(line);
      float x, y, z;
      std::string rest;
      if (!(ls >> x >> y >> z) || (ls >> rest))
        throw FormatError(FormatErrorKind::MalformedBody, "bad vertex line '" + line + "'");
      asset.positions.insert(asset.positions.end(), {x, y, z});
    }
  }
  if (next_line(in, line)) throw FormatError(FormatErrorKind::MalformedBody, "trailing content after strand data");
  return asset;
}

StrandFormat format_for_path(const std::filesystem::path& path) {
  return path.extension() == ".txt" ? StrandFormat::Text : StrandFormat::Binary;
}

StrandAsset load_strands(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open strand asset " + path.string());
  char head[3] = {0, 0, 0};
  in.read(head, 3);
  const bool binary = in.gcount() == 3 && std::string_view(head, 3) == "AMS";
  in.clear();
  in.seekg(0);
  return binary ? read_strands_binary(in) : read_strands_text(in);
}

void save_strands(const StrandAsset& asset, const std::filesystem::path& path) {
  const bool text = format_for_path(path) == StrandFormat::Text;
  std::ofstream out(path, text ? std::ios::out : std::ios::binary);
  if (!out) throw IoError("cannot write strand asset " + path.string());
  if (text)
    write_strands_text(asset, out);
  else
    write_strands_binary(asset, out);
  if (!out) throw IoError("failed writing strand asset " + path.string());
}

}  // namespace ams

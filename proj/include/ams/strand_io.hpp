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
#include <ostream>
#include <vector>

namespace ams {

// Strand geometry as stored on disk (single precision, metres).
struct StrandAsset {
  std::vector<std::uint32_t> vertex_counts;
  std::vector<float> positions;  // xyz triples, strands back to back

  std::size_t strand_count() const { return vertex_counts.size(); }
  std::size_t total_vertices() const;
  std::size_t offset(std::size_t strand) const;  // first vertex of `strand`
  Vec3List strand_positions(std::size_t strand) const;
  void add_strand(const Vec3List& vertices);

  // Throws FormatError(MalformedBody) if the counts and array disagree.
  void validate() const;
  bool operator==(const StrandAsset&) const = default;
};

enum class StrandFormat { Binary, Text };

// Binary: "AMS1", u32 strand count, per strand u32 vertex count + f32 xyz.
void write_strands_binary(const StrandAsset& asset, std::ostream& out);
StrandAsset read_strands_binary(std::istream& in);
// Text: strand count line, then per strand a vertex count line and "x y z" lines.
void write_strands_text(const StrandAsset& asset, std::ostream& out);
StrandAsset read_strands_text(std::istream& in);

// Format is sniffed on load (binary files start with "AMS"); on save ".txt"
// selects text, anything else binary.
StrandAsset load_strands(const std::filesystem::path& path);
void save_strands(const StrandAsset& asset, const std::filesystem::path& path);
StrandFormat format_for_path(const std::filesystem::path& path);

}  // namespace ams

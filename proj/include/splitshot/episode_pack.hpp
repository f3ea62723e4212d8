// Copyright 2026 The splitshot Authors
// SPDX-License-Identifier: Apache-2.0
//
// On-disk episode pack:
//   pack_manifest.json          version, out_size, config echo, episode list
//   <id>_support.png            8-bit RGB
//   <id>_support_mask.png       8-bit gray, {0,1}
//   <id>_query.png              8-bit RGB
//   <id>_query_label.png        8-bit gray, {0,1,255}; 255 = ignore
// Every file's CRC32 (over raw bytes) is stored in the manifest.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "splitshot/episode_engine.hpp"
#include "splitshot/errors.hpp"

namespace splitshot {

inline constexpr const char* kPackManifestName = "pack_manifest.json";

struct PackFile {
  std::string path;
  std::uint32_t crc32 = 0;
  friend bool operator==(const PackFile&, const PackFile&) = default;
};

struct EpisodeRecord {
  std::string id;
  /// Keys: support, support_mask, query, query_label.
  std::map<std::string, PackFile> files;
  std::string source_image;
  bool applied_split = false;
  std::optional<int> class_id;
  EpisodeMeta meta;

  friend bool operator==(const EpisodeRecord&, const EpisodeRecord&) = default;
};

struct PackManifest {
  int version = 1;
  int out_size = 0;
  nlohmann::json config;
  std::vector<EpisodeRecord> episodes;

  friend bool operator==(const PackManifest&, const PackManifest&) = default;
};

/// Encodes and writes the four episode files; returns the manifest record.
EpisodeRecord write_episode(const std::filesystem::path& pack_dir, const Episode& episode);

/// Reads and validates one episode. Throws ChecksumMismatch, ValidationError
/// (label or mask value outside its alphabet, wrong dimensions) or
/// UnsupportedFormat, each naming the offending file.
Episode read_episode(const std::filesystem::path& pack_dir, const EpisodeRecord& record);

void write_pack_manifest(const std::filesystem::path& pack_dir, const PackManifest& manifest);
PackManifest read_pack_manifest(const std::filesystem::path& pack_dir);

struct Violation {
  std::string episode_id;
  ErrorKind kind;
  std::string message;
};

/// Re-checks every episode invariant: checksums, alphabets, dimensions,
/// non-empty foregrounds, and split disjointness from provenance counts.
std::vector<Violation> verify_pack(const std::filesystem::path& pack_dir);

}  // namespace splitshot

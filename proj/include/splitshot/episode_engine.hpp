// Copyright 2026 The splitshot Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "splitshot/augmentations.hpp"
#include "splitshot/binary_mask.hpp"
#include "splitshot/dataset_io.hpp"
#include "splitshot/geometry_splits.hpp"
#include "splitshot/image.hpp"
#include "splitshot/rng.hpp"

namespace splitshot {

struct EpisodeConfig {
  int out_size = 400;
  SplitConfig split;
  AugmentationSpec aug;
  std::uint64_t seed = 0;
  /// Images whose resized saliency mask has fewer foreground pixels are skipped.
  int min_image_fg = 200;
  int episodes_per_image = 1;
  /// Selects a fresh set of per-image streams; epoch e uses substreams
  /// [e * episodes_per_image, (e + 1) * episodes_per_image).
  int epoch = 0;
  std::uint8_t saliency_threshold = 128;
  /// Redraws of one augmented view when its foreground leaves the canvas.
  int max_view_attempts = 8;

  void validate() const;
};

nlohmann::json to_json(const EpisodeConfig& config);
/// Applies the fields present in `j` on top of `base`; unknown keys are a
/// ParseError so typos do not silently fall back to defaults.
EpisodeConfig episode_config_from_json(const nlohmann::json& j, EpisodeConfig base = {});

/// Provenance of one episode.
struct EpisodeMeta {
  std::string source_image;
  std::optional<int> class_id;
  bool applied_split = false;
  bool fell_back = false;
  bool swapped = false;
  std::optional<SplitLine> line;
  /// Foreground counts in the shared resized frame, before augmentation.
  std::uint64_t saliency_fg = 0;
  std::uint64_t support_fg = 0;
  std::uint64_t query_fg = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  std::uint32_t substream = 0;
  GeometricParams support_geometric;
  PhotometricParams support_photometric;
  GeometricParams query_geometric;
  PhotometricParams query_photometric;

  friend bool operator==(const EpisodeMeta&, const EpisodeMeta&) = default;
};

nlohmann::json to_json(const EpisodeMeta& meta);
EpisodeMeta episode_meta_from_json(const nlohmann::json& j);

struct Episode {
  std::string id;
  Image support_image;
  BinaryMask support_mask;
  Image query_image;
  LabelMap query_label;
  EpisodeMeta meta;

  friend bool operator==(const Episode&, const Episode&) = default;
};

/// 1 on query foreground, kIgnoreLabel on support foreground outside the
/// query foreground, 0 elsewhere. Throws DimensionMismatch.
LabelMap compute_ignore_label(const BinaryMask& query_fg, const BinaryMask& support_fg_in_query_frame);

/// Resize, split, augment two views, and label. Throws InsufficientForeground
/// when the resized saliency mask is below config.min_image_fg, EmptyView when
/// a view's foreground leaves the canvas in every allowed augmentation draw,
/// DimensionMismatch when the saliency mask and image disagree.
Episode make_episode(const Image& image, const BinaryMask& saliency, const EpisodeConfig& config,
                     RandomStream& rng);

struct GenerationStats {
  std::uint64_t images = 0;
  std::uint64_t generated = 0;
  std::uint64_t skipped_insufficient_fg = 0;
  std::uint64_t skipped_empty_view = 0;
  std::uint64_t fallback_no_split = 0;
  std::uint64_t applied_split = 0;
  double seconds = 0.0;

  nlohmann::json to_json() const;
};

/// Writes one pack under `out_dir`; output bytes do not depend on `workers`.
GenerationStats generate_dataset(const DatasetManifest& manifest, const EpisodeConfig& config,
                                 const std::filesystem::path& out_dir, int workers);

}  // namespace splitshot

// Copyright 2026 The splitshot Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "splitshot/binary_mask.hpp"
#include "splitshot/image.hpp"

namespace splitshot {

namespace fs = std::filesystem;

struct ManifestEntry {
  std::string image_id;
  fs::path image_path;
  std::optional<fs::path> saliency_path;
  std::optional<fs::path> gt_mask_path;
  std::optional<std::vector<int>> class_ids;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct DatasetManifest {
  std::string dataset_name;
  std::vector<ManifestEntry> entries;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

/// Parses a dataset manifest. Relative paths resolve against the manifest's
/// directory. Throws ParseError (with field context) on malformed JSON or
/// duplicate ids, MissingFile when `check_files` and a referenced file is
/// absent.
DatasetManifest load_manifest(const fs::path& path, bool check_files = true);
void write_manifest(const DatasetManifest& manifest, const fs::path& path);

// --- raster codecs --------------------------------------------------------

/// PNG or JPEG, decoded to RGB.
Image read_image(const fs::path& path);
/// 8-bit single-channel PNG; pixel is foreground iff value >= threshold.
BinaryMask read_mask(const fs::path& path, std::uint8_t threshold = 128);
/// 8-bit single-channel class-id raster.
ClassMap read_class_map(const fs::path& path);

std::vector<std::uint8_t> encode_png(const Image& image);
std::vector<std::uint8_t> encode_png_gray(int width, int height, std::span<const std::uint8_t> values);
/// Writes raw bytes; throws IoError naming the path.
void write_file(const fs::path& path, std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> read_file(const fs::path& path);
std::uint32_t crc32_of(std::span<const std::uint8_t> bytes);

/// Decode helpers over in-memory bytes; `name` only labels errors.
Image decode_rgb(std::span<const std::uint8_t> bytes, const std::string& name);
/// Returns the raw single-channel grid.
std::vector<std::uint8_t> decode_gray(std::span<const std::uint8_t> bytes, const std::string& name,
                                      int& width, int& height);

BinaryMask binarize_class_mask(const ClassMap& classes, int class_id);
/// Pixels carrying the conventional groundtruth ignore index (255).
BinaryMask ignore_region(const ClassMap& classes);

// --- folds ----------------------------------------------------------------

enum class FoldScheme { Block, Interleave };

struct FoldSpec {
  std::string dataset;
  int num_classes = 0;
  std::array<std::vector<int>, 4> folds;
};

/// "pascal" (20 classes) or "coco" (80). Block: fold i = classes
/// {k*i+1, ..., k*i+k}; Interleave: fold i = {4j+i+1}. Throws UnknownDataset.
FoldSpec make_fold_spec(const std::string& dataset, FoldScheme scheme = FoldScheme::Block);
std::vector<int> fold_classes(const std::string& dataset, int fold_index,
                              FoldScheme scheme = FoldScheme::Block);
std::optional<FoldScheme> parse_fold_scheme(const std::string& text);

// --- prediction sets --------------------------------------------------------

/// Directory of `<task>_pred.png` files indexed by `predictions.json`.
class PredictionSet {
 public:
  static PredictionSet open(const fs::path& dir);

  bool contains(const std::string& task_id) const { return files_.count(task_id) != 0; }
  std::size_t size() const { return files_.size(); }
  /// Throws MissingPrediction when the task has no entry.
  BinaryMask load(const std::string& task_id) const;
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::map<std::string, std::string> files_;
};

class PredictionWriter {
 public:
  explicit PredictionWriter(fs::path dir);
  void add(const std::string& task_id, const BinaryMask& prediction);
  /// Writes predictions.json.
  void finish() const;

 private:
  fs::path dir_;
  std::map<std::string, std::string> files_;
};

}  // namespace splitshot

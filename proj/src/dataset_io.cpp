// Copyright 2026 The splitshot Authors
// SPDX-License-Identifier: Apache-2.0

#include "splitshot/dataset_io.hpp"

#include <fmt/format.h>
#include <zlib.h>

#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <set>

#include "splitshot/errors.hpp"
#include "splitshot/simd/kernels.hpp"

namespace splitshot {

using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const fs::path& file, const std::string& where, const std::string& what) {
  throw Error(ErrorKind::ParseError, fmt::format("{}: {}: {}", file.string(), where, what));
}

const json& require(const json& obj, const char* key, const fs::path& file, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) parse_fail(file, where, fmt::format("missing field '{}'", key));
  return *it;
}

std::string as_string(const json& v, const fs::path& file, const std::string& where) {
  if (!v.is_string()) parse_fail(file, where, "expected a string");
  return v.get<std::string>();
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  if (path.is_relative()) path = base / path;
  return path.lexically_normal();
}

std::vector<std::uint8_t> encode(const cv::Mat& mat, const std::string& what) {
  std::vector<std::uint8_t> buf;
  const std::vector<int> params = {cv::IMWRITE_PNG_COMPRESSION, 3};
  if (!cv::imencode(".png", mat, buf, params)) {
    throw Error(ErrorKind::IoError, fmt::format("PNG encoding failed for {}", what));
  }
  return buf;
}

cv::Mat decode(std::span<const std::uint8_t> bytes, int flags, const std::string& name) {
  if (bytes.empty()) throw Error(ErrorKind::UnsupportedFormat, fmt::format("{}: empty file", name));
  const cv::Mat raw(1, static_cast<int>(bytes.size()), CV_8UC1,
                    const_cast<std::uint8_t*>(bytes.data()));
  cv::Mat mat;
  try {
    mat = cv::imdecode(raw, flags);
  } catch (const cv::Exception& e) {
    throw Error(ErrorKind::UnsupportedFormat, fmt::format("{}: {}", name, e.what()));
  }
  if (mat.empty()) {
    throw Error(ErrorKind::UnsupportedFormat, fmt::format("{}: not a decodable PNG/JPEG (truncated or corrupt)", name));
  }
  return mat;
}

}  // namespace

DatasetManifest load_manifest(const fs::path& path, bool check_files) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::MissingFile, fmt::format("cannot open manifest {}", path.string()));
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    parse_fail(path, "json", e.what());
  }
  if (!doc.is_object()) parse_fail(path, "root", "expected an object");

  const fs::path base = path.parent_path();
  DatasetManifest manifest;
  if (auto it = doc.find("dataset_name"); it != doc.end()) {
    manifest.dataset_name = as_string(*it, path, "dataset_name");
  }
  const json& entries = require(doc, "entries", path, "root");
  if (!entries.is_array()) parse_fail(path, "entries", "expected an array");

  std::set<std::string> seen;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string where = fmt::format("entries[{}]", i);
    const json& e = entries[i];
    if (!e.is_object()) parse_fail(path, where, "expected an object");
    ManifestEntry entry;
    entry.image_id = as_string(require(e, "image_id", path, where), path, where + ".image_id");
    if (entry.image_id.empty()) parse_fail(path, where + ".image_id", "empty id");
    if (!seen.insert(entry.image_id).second) {
      parse_fail(path, where + ".image_id", fmt::format("duplicate image_id '{}'", entry.image_id));
    }
    entry.image_path = resolve(base, as_string(require(e, "image_path", path, where), path, where + ".image_path"));
    auto optional_path = [&](const char* key) -> std::optional<fs::path> {
      auto it = e.find(key);
      if (it == e.end() || it->is_null()) return std::nullopt;
      return resolve(base, as_string(*it, path, where + "." + key));
    };
    entry.saliency_path = optional_path("saliency_path");
    entry.gt_mask_path = optional_path("gt_mask_path");
    if (auto it = e.find("class_ids"); it != e.end() && !it->is_null()) {
      if (!it->is_array()) parse_fail(path, where + ".class_ids", "expected an array of integers");
      std::vector<int> ids;
      for (const auto& c : *it) {
        if (!c.is_number_integer()) parse_fail(path, where + ".class_ids", "expected integers");
        ids.push_back(c.get<int>());
      }
      entry.class_ids = std::move(ids);
    }
    if (check_files) {
      for (const fs::path* p : {&entry.image_path, entry.saliency_path ? &*entry.saliency_path : nullptr,
                                entry.gt_mask_path ? &*entry.gt_mask_path : nullptr}) {
        if (p != nullptr && !fs::exists(*p)) {
          throw Error(ErrorKind::MissingFile,
                      fmt::format("{} (image '{}', {})", p->string(), entry.image_id, path.string()));
        }
      }
    }
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

void write_manifest(const DatasetManifest& manifest, const fs::path& path) {
  json entries = json::array();
  for (const auto& e : manifest.entries) {
    json j = {{"image_id", e.image_id}, {"image_path", e.image_path.string()}};
    if (e.saliency_path) j["saliency_path"] = e.saliency_path->string();
    if (e.gt_mask_path) j["gt_mask_path"] = e.gt_mask_path->string();
    if (e.class_ids) j["class_ids"] = *e.class_ids;
    entries.push_back(std::move(j));
  }
  const json doc = {{"dataset_name", manifest.dataset_name}, {"entries", std::move(entries)}};
  const std::string text = doc.dump(2) + "\n";
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::MissingFile, path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void write_file(const fs::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::IoError, fmt::format("cannot write {}", path.string()));
}

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks for very large files.
  std::size_t offset = 0;
  while (offset < bytes.size()) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(bytes.size() - offset, 1u << 30));
    crc = crc32(crc, bytes.data() + offset, chunk);
    offset += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

Image decode_rgb(std::span<const std::uint8_t> bytes, const std::string& name) {
  const cv::Mat bgr = decode(bytes, cv::IMREAD_COLOR, name);
  if (bgr.type() != CV_8UC3) {
    throw Error(ErrorKind::UnsupportedFormat, fmt::format("{}: expected 8-bit color", name));
  }
  Image image(bgr.cols, bgr.rows);
  for (int y = 0; y < bgr.rows; ++y) {
    const auto* src = bgr.ptr<std::uint8_t>(y);
    for (int x = 0; x < bgr.cols; ++x) {
      image.at(x, y, 0) = src[3 * x + 2];
      image.at(x, y, 1) = src[3 * x + 1];
      image.at(x, y, 2) = src[3 * x];
    }
  }
  return image;
}

std::vector<std::uint8_t> decode_gray(std::span<const std::uint8_t> bytes, const std::string& name,
                                      int& width, int& height) {
  const cv::Mat mat = decode(bytes, cv::IMREAD_UNCHANGED, name);
  if (mat.type() != CV_8UC1) {
    throw Error(ErrorKind::UnsupportedFormat,
                fmt::format("{}: expected 8-bit single-channel image, got {} channel(s) depth {}",
                            name, mat.channels(), mat.depth()));
  }
  width = mat.cols;
  height = mat.rows;
  std::vector<std::uint8_t> values(static_cast<std::size_t>(width) * height);
  for (int y = 0; y < height; ++y) {
    std::memcpy(values.data() + static_cast<std::size_t>(y) * width, mat.ptr<std::uint8_t>(y), width);
  }
  return values;
}

Image read_image(const fs::path& path) { return decode_rgb(read_file(path), path.string()); }

BinaryMask read_mask(const fs::path& path, std::uint8_t threshold) {
  int w = 0, h = 0;
  auto values = decode_gray(read_file(path), path.string(), w, h);
  std::vector<std::uint8_t> bits(values.size());
  simd::kernels().threshold(values.data(), threshold, bits.data(), values.size());
  return BinaryMask(w, h, std::move(bits));
}

ClassMap read_class_map(const fs::path& path) {
  int w = 0, h = 0;
  auto values = decode_gray(read_file(path), path.string(), w, h);
  return ClassMap(w, h, std::move(values));
}

std::vector<std::uint8_t> encode_png(const Image& image) {
  cv::Mat bgr(image.height(), image.width(), CV_8UC3);
  for (int y = 0; y < image.height(); ++y) {
    auto* dst = bgr.ptr<std::uint8_t>(y);
    for (int x = 0; x < image.width(); ++x) {
      dst[3 * x] = image.at(x, y, 2);
      dst[3 * x + 1] = image.at(x, y, 1);
      dst[3 * x + 2] = image.at(x, y, 0);
    }
  }
  return encode(bgr, "rgb image");
}

std::vector<std::uint8_t> encode_png_gray(int width, int height, std::span<const std::uint8_t> values) {
  if (values.size() != static_cast<std::size_t>(width) * height) {
    throw Error(ErrorKind::DimensionMismatch, "gray plane size does not match dimensions");
  }
  const cv::Mat mat(height, width, CV_8UC1, const_cast<std::uint8_t*>(values.data()));
  return encode(mat, "gray image");
}

BinaryMask binarize_class_mask(const ClassMap& classes, int class_id) {
  if (class_id < 1 || class_id > 254) {
    throw Error(ErrorKind::InvalidArgument, fmt::format("class id {} outside [1, 254]", class_id));
  }
  std::vector<std::uint8_t> bits(classes.values.size());
  simd::kernels().equals(classes.values.data(), static_cast<std::uint8_t>(class_id), bits.data(),
                         bits.size());
  return BinaryMask(classes.width, classes.height, std::move(bits));
}

BinaryMask ignore_region(const ClassMap& classes) {
  std::vector<std::uint8_t> bits(classes.values.size());
  simd::kernels().equals(classes.values.data(), 255, bits.data(), bits.size());
  return BinaryMask(classes.width, classes.height, std::move(bits));
}

FoldSpec make_fold_spec(const std::string& dataset, FoldScheme scheme) {
  FoldSpec spec;
  if (dataset == "pascal" || dataset == "pascal-5i") {
    spec.dataset = "pascal";
    spec.num_classes = 20;
  } else if (dataset == "coco" || dataset == "coco-20i") {
    spec.dataset = "coco";
    spec.num_classes = 80;
  } else {
    throw Error(ErrorKind::UnknownDataset, fmt::format("'{}' (expected pascal or coco)", dataset));
  }
  const int per_fold = spec.num_classes / 4;
  for (int fold = 0; fold < 4; ++fold) {
    for (int j = 0; j < per_fold; ++j) {
      spec.folds[fold].push_back(scheme == FoldScheme::Block ? per_fold * fold + j + 1
                                                             : 4 * j + fold + 1);
    }
  }
  return spec;
}

std::vector<int> fold_classes(const std::string& dataset, int fold_index, FoldScheme scheme) {
  if (fold_index < 0 || fold_index > 3) {
    throw Error(ErrorKind::InvalidArgument, fmt::format("fold index {} outside [0, 3]", fold_index));
  }
  return make_fold_spec(dataset, scheme).folds[fold_index];
}

std::optional<FoldScheme> parse_fold_scheme(const std::string& text) {
  if (text == "block") return FoldScheme::Block;
  if (text == "interleave") return FoldScheme::Interleave;
  return std::nullopt;
}

PredictionSet PredictionSet::open(const fs::path& dir) {
  const fs::path index = dir / "predictions.json";
  std::ifstream in(index);
  if (!in) throw Error(ErrorKind::MissingFile, index.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    parse_fail(index, "json", e.what());
  }
  const json& preds = require(doc, "predictions", index, "root");
  if (!preds.is_object()) parse_fail(index, "predictions", "expected an object");
  PredictionSet set;
  set.dir_ = dir;
  for (const auto& [task, file] : preds.items()) {
    set.files_[task] = as_string(file, index, "predictions." + task);
  }
  return set;
}

BinaryMask PredictionSet::load(const std::string& task_id) const {
  auto it = files_.find(task_id);
  if (it == files_.end()) {
    throw Error(ErrorKind::MissingPrediction, fmt::format("task '{}' has no prediction in {}", task_id, dir_.string()));
  }
  const fs::path path = dir_ / it->second;
  if (!fs::exists(path)) {
    throw Error(ErrorKind::MissingPrediction, fmt::format("task '{}': file {} not found", task_id, path.string()));
  }
  int w = 0, h = 0;
  auto values = decode_gray(read_file(path), path.string(), w, h);
  for (auto v : values) {
    if (v > 1) {
      throw Error(ErrorKind::ValidationError,
                  fmt::format("{}: prediction value {} outside {{0,1}}", path.string(), v));
    }
  }
  return BinaryMask(w, h, std::move(values));
}

PredictionWriter::PredictionWriter(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

void PredictionWriter::add(const std::string& task_id, const BinaryMask& prediction) {
  const std::string name = task_id + "_pred.png";
  write_file(dir_ / name, encode_png_gray(prediction.width(), prediction.height(), prediction.data()));
  files_[task_id] = name;
}

void PredictionWriter::finish() const {
  const json doc = {{"version", 1}, {"predictions", files_}};
  const std::string text = doc.dump(2) + "\n";
  write_file(dir_ / "predictions.json",
             std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace splitshot

// Copyright 2026 The splitshot Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace splitshot {

/// Row-major foreground bitmap stored one byte per pixel (0 or 1) so the
/// SIMD kernels can stream it directly.
class BinaryMask {
 public:
  BinaryMask() = default;
  /// All-background mask. Throws InvalidArgument on a zero dimension.
  BinaryMask(int width, int height);
  /// Takes ownership of `data`; every byte must be 0 or 1.
  BinaryMask(int width, int height, std::vector<std::uint8_t> data);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  /// Bounds-checked; out-of-range coordinates throw InvalidArgument.
  bool at(int x, int y) const;
  void set(int x, int y, bool value);

  std::span<const std::uint8_t> data() const { return data_; }
  std::span<std::uint8_t> data() { return data_; }
  const std::uint8_t* row(int y) const { return data_.data() + static_cast<std::size_t>(y) * width_; }
  std::uint8_t* row(int y) { return data_.data() + static_cast<std::size_t>(y) * width_; }

  bool same_shape(const BinaryMask& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  void check_index(int x, int y) const;

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

std::uint64_t foreground_count(const BinaryMask& mask);

BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_or(const BinaryMask& a, const BinaryMask& b);
/// a and not b
BinaryMask mask_and_not(const BinaryMask& a, const BinaryMask& b);

/// Row-major single-channel byte grid with a tag distinguishing its meaning.
template <class Tag>
struct BytePlane {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> values;

  BytePlane() = default;
  BytePlane(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}
  BytePlane(int w, int h, std::vector<std::uint8_t> v) : width(w), height(h), values(std::move(v)) {}

  std::uint8_t at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }

  friend bool operator==(const BytePlane&, const BytePlane&) = default;
};

struct LabelTag {};
struct ClassTag {};

/// Query supervision: 0 background, 1 foreground, kIgnoreLabel excluded from loss.
using LabelMap = BytePlane<LabelTag>;
/// Groundtruth class-id raster (0 background, 255 conventional ignore).
using ClassMap = BytePlane<ClassTag>;

inline constexpr std::uint8_t kIgnoreLabel = 255;

}  // namespace splitshot

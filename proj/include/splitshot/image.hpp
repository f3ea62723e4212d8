// Copyright 2026 The splitshot Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace splitshot {

/// 8-bit RGB image, interleaved, row-major.
class Image {
 public:
  static constexpr int kChannels = 3;

  Image() = default;
  /// Black image; throws InvalidArgument on a zero dimension.
  Image(int width, int height);
  Image(int width, int height, std::vector<std::uint8_t> rgb);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return pixels_.empty(); }

  std::uint8_t at(int x, int y, int c) const { return pixels_[offset(x, y) + c]; }
  std::uint8_t& at(int x, int y, int c) { return pixels_[offset(x, y) + c]; }

  std::span<const std::uint8_t> pixels() const { return pixels_; }
  std::span<std::uint8_t> pixels() { return pixels_; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t offset(int x, int y) const {
    return (static_cast<std::size_t>(y) * width_ + x) * kChannels;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

}  // namespace splitshot

// Copyright 2026 The splitshot Authors
// SPDX-License-Identifier: Apache-2.0

#include "splitshot/image.hpp"

#include <fmt/format.h>

#include "splitshot/errors.hpp"

namespace splitshot {

Image::Image(int width, int height) : Image(width, height, {}) {}

Image::Image(int width, int height, std::vector<std::uint8_t> rgb)
    : width_(width), height_(height), pixels_(std::move(rgb)) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("image dimensions must be positive, got {}x{}", width, height));
  }
  const std::size_t expected = static_cast<std::size_t>(width) * height * kChannels;
  if (pixels_.empty()) pixels_.assign(expected, 0);
  if (pixels_.size() != expected) {
    throw Error(ErrorKind::DimensionMismatch,
                fmt::format("image data has {} bytes, expected {}", pixels_.size(), expected));
  }
}

}  // namespace splitshot

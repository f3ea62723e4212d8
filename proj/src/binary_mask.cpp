// Copyright 2026 The splitshot Authors
// SPDX-License-Identifier: Apache-2.0

#include "splitshot/binary_mask.hpp"

#include <fmt/format.h>

#include <algorithm>

#include "splitshot/errors.hpp"
#include "splitshot/simd/kernels.hpp"

namespace splitshot {

namespace {

void check_dims(int width, int height) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("mask dimensions must be positive, got {}x{}", width, height));
  }
}

void require_same_shape(const BinaryMask& a, const BinaryMask& b) {
  if (!a.same_shape(b)) {
    throw Error(ErrorKind::DimensionMismatch,
                fmt::format("{}x{} vs {}x{}", a.width(), a.height(), b.width(), b.height()));
  }
}

}  // namespace

BinaryMask::BinaryMask(int width, int height) : width_(width), height_(height) {
  check_dims(width, height);
  data_.assign(static_cast<std::size_t>(width) * height, 0);
}

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  check_dims(width, height);
  if (data_.size() != static_cast<std::size_t>(width) * height) {
    throw Error(ErrorKind::DimensionMismatch,
                fmt::format("mask data has {} bytes, expected {}x{}", data_.size(), width, height));
  }
  if (std::any_of(data_.begin(), data_.end(), [](std::uint8_t v) { return v > 1; })) {
    throw Error(ErrorKind::ValidationError, "mask bytes must be 0 or 1");
  }
}

void BinaryMask::check_index(int x, int y) const {
  if (x < 0 || y < 0 || x >= width_ || y >= height_) {
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("pixel ({}, {}) outside {}x{} mask", x, y, width_, height_));
  }
}

bool BinaryMask::at(int x, int y) const {
  check_index(x, y);
  return row(y)[x] != 0;
}

void BinaryMask::set(int x, int y, bool value) {
  check_index(x, y);
  row(y)[x] = value ? 1 : 0;
}

std::uint64_t foreground_count(const BinaryMask& mask) {
  return simd::kernels().count_set(mask.data().data(), mask.size());
}

BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b) {
  require_same_shape(a, b);
  BinaryMask out(a.width(), a.height());
  std::transform(a.data().begin(), a.data().end(), b.data().begin(), out.data().begin(),
                 [](std::uint8_t p, std::uint8_t q) { return static_cast<std::uint8_t>(p & q); });
  return out;
}

BinaryMask mask_or(const BinaryMask& a, const BinaryMask& b) {
  require_same_shape(a, b);
  BinaryMask out(a.width(), a.height());
  std::transform(a.data().begin(), a.data().end(), b.data().begin(), out.data().begin(),
                 [](std::uint8_t p, std::uint8_t q) { return static_cast<std::uint8_t>(p | q); });
  return out;
}

BinaryMask mask_and_not(const BinaryMask& a, const BinaryMask& b) {
  require_same_shape(a, b);
  BinaryMask out(a.width(), a.height());
  std::transform(a.data().begin(), a.data().end(), b.data().begin(), out.data().begin(),
                 [](std::uint8_t p, std::uint8_t q) { return static_cast<std::uint8_t>(p & (q ^ 1)); });
  return out;
}

}  // namespace splitshot

// Copyright 2026 The splitshot Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "splitshot/simd/kernels.hpp"

namespace splitshot::simd {

namespace {

std::uint64_t count_set(const std::uint8_t* src, std::size_t n) {
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < n; ++i) total += src[i];
  return total;
}

void accumulate_columns(const std::uint8_t* src, std::size_t width, std::size_t height,
                        std::uint32_t* counts) {
  for (std::size_t y = 0; y < height; ++y) {
    const std::uint8_t* row = src + y * width;
    for (std::size_t x = 0; x < width; ++x) counts[x] += row[x];
  }
}

void split_by_thresholds(const std::uint8_t* src, const std::int32_t* threshold, std::int32_t row,
                         std::uint8_t* side_a, std::uint8_t* side_b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t in_a = row >= threshold[i] ? 1 : 0;
    side_a[i] = src[i] & in_a;
    side_b[i] = src[i] & (in_a ^ 1);
  }
}

OverlapCounts overlap_counts(const std::uint8_t* pred, const std::uint8_t* gt,
                             const std::uint8_t* exclude, std::size_t n) {
  OverlapCounts c;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t keep = exclude ? (exclude[i] ^ 1) : 1;
    c.intersection += pred[i] & gt[i] & keep;
    c.union_ += (pred[i] | gt[i]) & keep;
  }
  return c;
}

void ignore_label(const std::uint8_t* query, const std::uint8_t* support, std::uint8_t* out,
                  std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = query[i] ? 1 : (support[i] ? 255 : 0);
  }
}

void threshold(const std::uint8_t* src, std::uint8_t t, std::uint8_t* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = src[i] >= t ? 1 : 0;
}

void equals(const std::uint8_t* src, std::uint8_t value, std::uint8_t* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = src[i] == value ? 1 : 0;
}

void affine(const std::uint8_t* src, float gain, float bias, std::uint8_t* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    float v = gain * static_cast<float>(src[i]);
    v = v + bias;
    v = std::min(std::max(v, 0.0f), 255.0f);
    out[i] = static_cast<std::uint8_t>(std::nearbyint(v));
  }
}

constexpr KernelTable kScalar{
    "scalar",       count_set,    accumulate_columns, split_by_thresholds, overlap_counts,
    ignore_label,   threshold,    equals,             affine,
};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace splitshot::simd

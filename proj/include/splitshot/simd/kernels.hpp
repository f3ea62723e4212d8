// Copyright 2026 The splitshot Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace splitshot::simd {

struct OverlapCounts {
  std::uint64_t intersection = 0;
  std::uint64_t union_ = 0;
};

// Inner loops over byte planes. Mask planes hold exactly 0 or 1 per byte.
// Every table entry must produce bit-identical results to the scalar table;
// tests/test_simd.cpp enforces this on random inputs of awkward lengths.
struct KernelTable {
  std::string_view name;

  // Number of set bytes in a 0/1 plane.
  std::uint64_t (*count_set)(const std::uint8_t* src, std::size_t n);

  // counts[x] += row[x] for x < width, for each of `height` rows of `src`.
  void (*accumulate_columns)(const std::uint8_t* src, std::size_t width, std::size_t height,
                             std::uint32_t* counts);

  // Horizontal-split row: side A iff row >= threshold[x].
  void (*split_by_thresholds)(const std::uint8_t* src, const std::int32_t* threshold,
                              std::int32_t row, std::uint8_t* side_a, std::uint8_t* side_b,
                              std::size_t n);

  // exclude may be null.
  OverlapCounts (*overlap_counts)(const std::uint8_t* pred, const std::uint8_t* gt,
                                  const std::uint8_t* exclude, std::size_t n);

  // out = 1 where query, 255 where support and not query, 0 elsewhere.
  void (*ignore_label)(const std::uint8_t* query, const std::uint8_t* support, std::uint8_t* out,
                       std::size_t n);

  // out = src >= threshold ? 1 : 0
  void (*threshold)(const std::uint8_t* src, std::uint8_t threshold, std::uint8_t* out,
                    std::size_t n);

  // out = src == value ? 1 : 0
  void (*equals)(const std::uint8_t* src, std::uint8_t value, std::uint8_t* out, std::size_t n);

  // out = round_half_even(clamp(gain * src + bias, 0, 255)), computed in float
  // as (gain * src) + bias.
  void (*affine)(const std::uint8_t* src, float gain, float bias, std::uint8_t* out,
                 std::size_t n);
};

const KernelTable& scalar_kernels();

/// Null when the AVX2 table was not compiled in or the CPU lacks AVX2.
const KernelTable* avx2_kernels();

/// Table used by the library. Chosen once: AVX2 when available, unless the
/// SPLITSHOT_SIMD environment variable is set to "scalar".
const KernelTable& kernels();

}  // namespace splitshot::simd

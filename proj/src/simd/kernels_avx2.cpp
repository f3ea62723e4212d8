// Copyright 2026 The splitshot Authors
// SPDX-License-Identifier: Apache-2.0
//
// Compiled with -mavx2 only; callers reach these through avx2_kernels(), which
// checks CPU support first.

#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "splitshot/simd/kernels.hpp"

namespace splitshot::simd {

namespace {

inline std::uint64_t hsum_epi64(__m256i v) {
  alignas(32) std::uint64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), v);
  return lanes[0] + lanes[1] + lanes[2] + lanes[3];
}

inline __m256i load32(const std::uint8_t* p) {
  return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p));
}

inline void store32(std::uint8_t* p, __m256i v) {
  _mm256_storeu_si256(reinterpret_cast<__m256i*>(p), v);
}

std::uint64_t count_set(const std::uint8_t* src, std::size_t n) {
  const __m256i zero = _mm256_setzero_si256();
  __m256i acc = zero;
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) acc = _mm256_add_epi64(acc, _mm256_sad_epu8(load32(src + i), zero));
  std::uint64_t total = hsum_epi64(acc);
  for (; i < n; ++i) total += src[i];
  return total;
}

void accumulate_columns(const std::uint8_t* src, std::size_t width, std::size_t height,
                        std::uint32_t* counts) {
  for (std::size_t y = 0; y < height; ++y) {
    const std::uint8_t* row = src + y * width;
    std::size_t x = 0;
    for (; x + 8 <= width; x += 8) {
      auto* dst = reinterpret_cast<__m256i*>(counts + x);
      const __m256i bytes = _mm256_cvtepu8_epi32(
          _mm_loadl_epi64(reinterpret_cast<const __m128i*>(row + x)));
      _mm256_storeu_si256(dst, _mm256_add_epi32(_mm256_loadu_si256(dst), bytes));
    }
    for (; x < width; ++x) counts[x] += row[x];
  }
}

void split_by_thresholds(const std::uint8_t* src, const std::int32_t* threshold, std::int32_t row,
                         std::uint8_t* side_a, std::uint8_t* side_b, std::size_t n) {
  const __m256i rowv = _mm256_set1_epi32(row);
  // packs leave 32-bit groups lane-interleaved; this restores element order.
  const __m256i order = _mm256_setr_epi32(0, 4, 1, 5, 2, 6, 3, 7);
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    auto thr = [&](std::size_t k) {
      return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(threshold + i + k));
    };
    const __m256i b0 = _mm256_cmpgt_epi32(thr(0), rowv);
    const __m256i b1 = _mm256_cmpgt_epi32(thr(8), rowv);
    const __m256i b2 = _mm256_cmpgt_epi32(thr(16), rowv);
    const __m256i b3 = _mm256_cmpgt_epi32(thr(24), rowv);
    __m256i in_b = _mm256_packs_epi16(_mm256_packs_epi32(b0, b1), _mm256_packs_epi32(b2, b3));
    in_b = _mm256_permutevar8x32_epi32(in_b, order);
    const __m256i s = load32(src + i);
    store32(side_a + i, _mm256_andnot_si256(in_b, s));
    store32(side_b + i, _mm256_and_si256(in_b, s));
  }
  for (; i < n; ++i) {
    const std::uint8_t in_a = row >= threshold[i] ? 1 : 0;
    side_a[i] = src[i] & in_a;
    side_b[i] = src[i] & (in_a ^ 1);
  }
}

OverlapCounts overlap_counts(const std::uint8_t* pred, const std::uint8_t* gt,
                             const std::uint8_t* exclude, std::size_t n) {
  const __m256i zero = _mm256_setzero_si256();
  const __m256i ones = _mm256_set1_epi8(1);
  __m256i inter = zero;
  __m256i uni = zero;
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i p = load32(pred + i);
    const __m256i g = load32(gt + i);
    const __m256i keep = exclude ? _mm256_xor_si256(load32(exclude + i), ones) : ones;
    inter = _mm256_add_epi64(inter,
                             _mm256_sad_epu8(_mm256_and_si256(_mm256_and_si256(p, g), keep), zero));
    uni = _mm256_add_epi64(uni,
                           _mm256_sad_epu8(_mm256_and_si256(_mm256_or_si256(p, g), keep), zero));
  }
  OverlapCounts c{hsum_epi64(inter), hsum_epi64(uni)};
  for (; i < n; ++i) {
    const std::uint8_t keep = exclude ? (exclude[i] ^ 1) : 1;
    c.intersection += pred[i] & gt[i] & keep;
    c.union_ += (pred[i] | gt[i]) & keep;
  }
  return c;
}

void ignore_label(const std::uint8_t* query, const std::uint8_t* support, std::uint8_t* out,
                  std::size_t n) {
  const __m256i zero = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i q = load32(query + i);
    const __m256i ignore = _mm256_sub_epi8(zero, _mm256_andnot_si256(q, load32(support + i)));
    store32(out + i, _mm256_or_si256(q, ignore));
  }
  for (; i < n; ++i) out[i] = query[i] ? 1 : (support[i] ? 255 : 0);
}

void threshold(const std::uint8_t* src, std::uint8_t t, std::uint8_t* out, std::size_t n) {
  const __m256i tv = _mm256_set1_epi8(static_cast<char>(t));
  const __m256i ones = _mm256_set1_epi8(1);
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i s = load32(src + i);
    store32(out + i, _mm256_and_si256(_mm256_cmpeq_epi8(_mm256_max_epu8(s, tv), s), ones));
  }
  for (; i < n; ++i) out[i] = src[i] >= t ? 1 : 0;
}

void equals(const std::uint8_t* src, std::uint8_t value, std::uint8_t* out, std::size_t n) {
  const __m256i vv = _mm256_set1_epi8(static_cast<char>(value));
  const __m256i ones = _mm256_set1_epi8(1);
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    store32(out + i, _mm256_and_si256(_mm256_cmpeq_epi8(load32(src + i), vv), ones));
  }
  for (; i < n; ++i) out[i] = src[i] == value ? 1 : 0;
}

void affine(const std::uint8_t* src, float gain, float bias, std::uint8_t* out, std::size_t n) {
  const __m256 g = _mm256_set1_ps(gain);
  const __m256 b = _mm256_set1_ps(bias);
  const __m256 lo = _mm256_setzero_ps();
  const __m256 hi = _mm256_set1_ps(255.0f);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256i in =
        _mm256_cvtepu8_epi32(_mm_loadl_epi64(reinterpret_cast<const __m128i*>(src + i)));
    __m256 v = _mm256_mul_ps(g, _mm256_cvtepi32_ps(in));
    v = _mm256_add_ps(v, b);
    v = _mm256_min_ps(_mm256_max_ps(v, lo), hi);
    // cvtps rounds with the MXCSR mode (nearest-even), matching nearbyint.
    const __m256i q = _mm256_cvtps_epi32(v);
    const __m128i w = _mm_packus_epi32(_mm256_castsi256_si128(q), _mm256_extracti128_si256(q, 1));
    _mm_storel_epi64(reinterpret_cast<__m128i*>(out + i), _mm_packus_epi16(w, w));
  }
  for (; i < n; ++i) {
    float v = gain * static_cast<float>(src[i]);
    v = v + bias;
    v = std::min(std::max(v, 0.0f), 255.0f);
    out[i] = static_cast<std::uint8_t>(std::nearbyint(v));
  }
}

constexpr KernelTable kAvx2{
    "avx2",       count_set, accumulate_columns, split_by_thresholds, overlap_counts,
    ignore_label, threshold, equals,             affine,
};

}  // namespace

const KernelTable& avx2_kernel_table() { return kAvx2; }

}  // namespace splitshot::simd

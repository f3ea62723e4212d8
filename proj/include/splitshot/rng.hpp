// Copyright 2026 The splitshot Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace splitshot {

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// 64-bit FNV-1a; used to turn stable string ids into stream ids.
std::uint64_t fnv1a64(std::string_view text);

/// Counter-based random stream. A stream is addressed by (seed, stream_id,
/// substream); two streams with different addresses never share blocks, so
/// parallel workers deriving their own streams produce schedule-independent
/// results. Distributions are implemented here rather than taken from
/// <random>, whose distribution algorithms are implementation-defined.
class RandomStream {
 public:
  using result_type = std::uint32_t;

  explicit RandomStream(std::uint64_t seed, std::uint64_t stream_id = 0,
                        std::uint32_t substream = 0);

  static RandomStream for_item(std::uint64_t seed, std::string_view item_id,
                               std::uint32_t substream = 0) {
    return RandomStream(seed, fnv1a64(item_id), substream);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next_u32(); }

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01();
  /// Uniform in [lo, hi); returns lo when lo == hi.
  double uniform_real(double lo, double hi);
  /// Uniform integer in the closed range [lo, hi]; unbiased.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  /// True with probability p; p <= 0 never, p >= 1 always.
  bool bernoulli(double p);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint32_t substream() const { return substream_; }
  std::uint64_t blocks_consumed() const { return block_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint32_t substream_;
  std::uint32_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  unsigned used_ = 4;
};

}  // namespace splitshot

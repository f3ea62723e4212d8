// Copyright 2026 The splitshot Authors
// SPDX-License-Identifier: Apache-2.0

#include "splitshot/geometry_splits.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <vector>

#include "splitshot/errors.hpp"
#include "splitshot/simd/kernels.hpp"

namespace splitshot {

namespace {

std::int64_t floor_div(std::int64_t num, std::int64_t den) {
  std::int64_t q = num / den;
  if ((num % den != 0) && ((num < 0) != (den < 0))) --q;
  return q;
}

std::int64_t ceil_div(std::int64_t num, std::int64_t den) { return -floor_div(-num, den); }

// First coordinate on side A at position `along` of a line spanning `extent`:
// side A iff coord * (extent - 1) >= (c + s) * (extent - 1) - 2 * s * along.
std::int64_t side_a_start(const SplitLine& line, std::int64_t along, std::int64_t extent) {
  if (extent <= 1) return line.balance;
  const std::int64_t den = extent - 1;
  const std::int64_t num = (static_cast<std::int64_t>(line.balance) + line.shift) * den -
                           2 * static_cast<std::int64_t>(line.shift) * along;
  return ceil_div(num, den);
}

void require_foreground(const BinaryMask& mask) {
  if (mask.empty() || foreground_count(mask) == 0) {
    throw Error(ErrorKind::EmptyMask, "mask has no foreground pixels");
  }
}

int draw_shift(bool slope_enabled, int slope_range, RandomStream& rng) {
  if (!slope_enabled || slope_range == 0) return 0;
  return static_cast<int>(rng.uniform_int(-slope_range, slope_range));
}

}  // namespace

std::string_view to_string(Axis axis) {
  return axis == Axis::Vertical ? "vertical" : "horizontal";
}

std::string_view to_string(SplitMode mode) {
  switch (mode) {
    case SplitMode::Vsplit: return "vsplit";
    case SplitMode::Hsplit: return "hsplit";
    case SplitMode::MixedSplit: return "mixed";
    case SplitMode::NoSplit: return "none";
  }
  return "none";
}

std::optional<SplitMode> parse_split_mode(std::string_view text) {
  if (text == "vsplit") return SplitMode::Vsplit;
  if (text == "hsplit") return SplitMode::Hsplit;
  if (text == "mixed" || text == "mixedsplit") return SplitMode::MixedSplit;
  if (text == "none" || text == "nosplit") return SplitMode::NoSplit;
  return std::nullopt;
}

void SplitConfig::validate() const {
  if (!(prob >= 0.0 && prob <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, fmt::format("split prob {} outside [0, 1]", prob));
  }
  if (slope_range < 0) {
    throw Error(ErrorKind::InvalidArgument, fmt::format("slope_range {} < 0", slope_range));
  }
  if (min_side_pixels < 0) {
    throw Error(ErrorKind::InvalidArgument, fmt::format("min_side_pixels {} < 0", min_side_pixels));
  }
  if (max_resample < 0) {
    throw Error(ErrorKind::InvalidArgument, fmt::format("max_resample {} < 0", max_resample));
  }
}

int balance_coordinate(const BinaryMask& mask, Axis axis) {
  require_foreground(mask);
  const auto& k = simd::kernels();
  std::vector<std::uint32_t> counts;
  if (axis == Axis::Vertical) {
    counts.assign(mask.width(), 0);
    k.accumulate_columns(mask.data().data(), mask.width(), mask.height(), counts.data());
  } else {
    counts.resize(mask.height());
    for (int y = 0; y < mask.height(); ++y) {
      counts[y] = static_cast<std::uint32_t>(k.count_set(mask.row(y), mask.width()));
    }
  }
  std::int64_t total = 0;
  for (auto c : counts) total += c;

  // Compare |2 * before - total| to stay in integers; strict < keeps the smallest c.
  int best = 0;
  std::int64_t best_gap = total;
  std::int64_t before = 0;
  for (std::size_t c = 1; c <= counts.size(); ++c) {
    before += counts[c - 1];
    const std::int64_t gap = std::abs(2 * before - total);
    if (gap < best_gap) {
      best_gap = gap;
      best = static_cast<int>(c);
    }
  }
  return best;
}

SplitLine sample_split_line(const BinaryMask& mask, Axis axis, bool slope_enabled,
                            int slope_range, RandomStream& rng) {
  if (slope_range < 0) throw Error(ErrorKind::InvalidArgument, "slope_range < 0");
  SplitLine line{axis, balance_coordinate(mask, axis), 0};
  line.shift = draw_shift(slope_enabled, slope_range, rng);
  return line;
}

double split_boundary(const SplitLine& line, int along, int extent) {
  if (extent <= 1) return line.balance;
  return line.balance + line.shift -
         (2.0 * line.shift / static_cast<double>(extent - 1)) * along;
}

Side side_of(const SplitLine& line, int x, int y, int width, int height) {
  if (line.axis == Axis::Vertical) {
    return x >= side_a_start(line, y, height) ? Side::A : Side::B;
  }
  return y >= side_a_start(line, x, width) ? Side::A : Side::B;
}

std::pair<BinaryMask, BinaryMask> partition_mask(const BinaryMask& mask, const SplitLine& line) {
  require_foreground(mask);
  const int w = mask.width();
  const int h = mask.height();
  BinaryMask side_a(w, h);
  BinaryMask side_b(w, h);

  if (line.axis == Axis::Vertical) {
    for (int y = 0; y < h; ++y) {
      const auto start = static_cast<std::size_t>(std::clamp<std::int64_t>(side_a_start(line, y, h), 0, w));
      std::memcpy(side_b.row(y), mask.row(y), start);
      std::memcpy(side_a.row(y) + start, mask.row(y) + start, w - start);
    }
  } else {
    std::vector<std::int32_t> thresholds(w);
    for (int x = 0; x < w; ++x) {
      thresholds[x] = static_cast<std::int32_t>(std::clamp<std::int64_t>(side_a_start(line, x, w), -1, h + 1));
    }
    const auto& k = simd::kernels();
    for (int y = 0; y < h; ++y) {
      k.split_by_thresholds(mask.row(y), thresholds.data(), y, side_a.row(y), side_b.row(y), w);
    }
  }
  return {std::move(side_a), std::move(side_b)};
}

SplitOutcome apply_split(const BinaryMask& mask, const SplitConfig& config, RandomStream& rng) {
  config.validate();
  require_foreground(mask);

  SplitOutcome outcome;
  auto no_split = [&] {
    outcome.applied = false;
    outcome.line.reset();
    outcome.support_fg = mask;
    outcome.query_fg = mask;
    return outcome;
  };

  if (config.mode == SplitMode::NoSplit || !rng.bernoulli(config.prob)) return no_split();

  Axis axis = Axis::Vertical;
  if (config.mode == SplitMode::Hsplit) axis = Axis::Horizontal;
  if (config.mode == SplitMode::MixedSplit) axis = rng.bernoulli(0.5) ? Axis::Vertical : Axis::Horizontal;

  const bool slope_varies = config.slope_enabled && config.slope_range > 0;
  const auto min_side = static_cast<std::uint64_t>(config.min_side_pixels);
  SplitLine line{axis, balance_coordinate(mask, axis), 0};

  // One initial line plus up to max_resample redraws of the slope.
  for (int attempt = 0; attempt <= config.max_resample; ++attempt) {
    line.shift = draw_shift(config.slope_enabled, config.slope_range, rng);
    auto [side_a, side_b] = partition_mask(mask, line);
    if (std::min(foreground_count(side_a), foreground_count(side_b)) >= min_side) {
      outcome.applied = true;
      outcome.line = line;
      outcome.swapped = config.alternate && rng.bernoulli(0.5);
      outcome.support_fg = outcome.swapped ? std::move(side_b) : std::move(side_a);
      outcome.query_fg = outcome.swapped ? std::move(side_a) : std::move(side_b);
      return outcome;
    }
    if (!slope_varies) break;
  }
  outcome.fell_back = true;
  return no_split();
}

}  // namespace splitshot

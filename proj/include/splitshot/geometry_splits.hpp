// Copyright 2026 The splitshot Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string_view>
#include <utility>

#include "splitshot/binary_mask.hpp"
#include "splitshot/rng.hpp"

namespace splitshot {

enum class Axis { Vertical, Horizontal };
enum class SplitMode { Vsplit, Hsplit, MixedSplit, NoSplit };
enum class Side { A, B };

std::string_view to_string(Axis axis);
std::string_view to_string(SplitMode mode);
/// Accepts "vsplit", "hsplit", "mixed"/"mixedsplit", "none"/"nosplit".
std::optional<SplitMode> parse_split_mode(std::string_view text);

/// Oriented dividing line. `balance` is a column (Vertical) or row
/// (Horizontal) coordinate; the line crosses c + shift at the first row
/// (column) and c - shift at the last.
struct SplitLine {
  Axis axis = Axis::Vertical;
  int balance = 0;
  int shift = 0;

  friend bool operator==(const SplitLine&, const SplitLine&) = default;
};

struct SplitConfig {
  SplitMode mode = SplitMode::Vsplit;
  int slope_range = 40;
  bool slope_enabled = true;
  bool alternate = true;
  double prob = 1.0;
  int min_side_pixels = 100;
  int max_resample = 10;

  /// Throws InvalidArgument naming the offending field.
  void validate() const;
};

struct SplitOutcome {
  bool applied = false;
  std::optional<SplitLine> line;
  BinaryMask support_fg;
  BinaryMask query_fg;
  bool swapped = false;
  /// A split was drawn but every candidate line left a side below
  /// min_side_pixels, so the outcome degraded to no-split.
  bool fell_back = false;
};

/// Smallest c in [0, extent] minimizing |#{fg with coord < c} - total/2|.
/// Throws EmptyMask when the mask has no foreground.
int balance_coordinate(const BinaryMask& mask, Axis axis);

SplitLine sample_split_line(const BinaryMask& mask, Axis axis, bool slope_enabled,
                            int slope_range, RandomStream& rng);

/// Real-valued boundary position at coordinate `along` (row for Vertical,
/// column for Horizontal) of a line spanning `extent` rows (columns).
double split_boundary(const SplitLine& line, int along, int extent);

/// Pixels on the boundary belong to side A (right for Vertical, bottom for
/// Horizontal). Evaluated in exact integer arithmetic.
Side side_of(const SplitLine& line, int x, int y, int width, int height);

/// (side A foreground, side B foreground). Throws EmptyMask.
std::pair<BinaryMask, BinaryMask> partition_mask(const BinaryMask& mask, const SplitLine& line);

SplitOutcome apply_split(const BinaryMask& mask, const SplitConfig& config, RandomStream& rng);

}  // namespace splitshot

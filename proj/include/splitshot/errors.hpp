// Copyright 2026 The splitshot Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace splitshot {

enum class ErrorKind {
  EmptyMask,
  DimensionMismatch,
  InsufficientForeground,
  EmptyView,
  InvalidArgument,
  ParseError,
  MissingFile,
  UnsupportedFormat,
  IoError,
  ChecksumMismatch,
  ValidationError,
  UnknownDataset,
  InsufficientImages,
  MissingPrediction,
  MissingSaliency,
  UnknownEpisode,
};

std::string_view to_string(ErrorKind kind);

/// All library failures surface as this exception; `kind()` identifies the
/// failure class, `what()` carries file/id context.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace splitshot

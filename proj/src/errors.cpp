// Copyright 2026 The splitshot Authors
// SPDX-License-Identifier: Apache-2.0

#include "splitshot/errors.hpp"

namespace splitshot {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyMask: return "EmptyMask";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InsufficientForeground: return "InsufficientForeground";
    case ErrorKind::EmptyView: return "EmptyView";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::MissingFile: return "MissingFile";
    case ErrorKind::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::UnknownDataset: return "UnknownDataset";
    case ErrorKind::InsufficientImages: return "InsufficientImages";
    case ErrorKind::MissingPrediction: return "MissingPrediction";
    case ErrorKind::MissingSaliency: return "MissingSaliency";
    case ErrorKind::UnknownEpisode: return "UnknownEpisode";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace splitshot

// Copyright 2026 The splitshot Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "splitshot/dataset_io.hpp"
#include "splitshot/episode_engine.hpp"

namespace splitshot::cli {

struct GenerateArgs {
  std::filesystem::path manifest;
  std::filesystem::path out;
  EpisodeConfig config;
  int workers = 1;
};

struct InspectArgs {
  std::filesystem::path pack;
  std::vector<std::string> ids;
  std::filesystem::path out;
};

struct ProtocolArgs {
  std::filesystem::path manifest;
  std::string dataset;
  std::vector<int> folds;
  FoldScheme scheme = FoldScheme::Block;
  int runs = 5;
  int tasks = 2500;
  std::uint64_t seed = 0;
};

struct EvaluateArgs {
  ProtocolArgs protocol;
  std::optional<std::filesystem::path> predictions;
  bool baseline_saliency = false;
  std::uint8_t threshold = 128;
  int workers = 1;
  bool json = false;
};

int cmd_generate(const GenerateArgs& args, std::ostream& out, std::ostream& err);
int cmd_verify(const std::filesystem::path& pack, bool json, std::ostream& out, std::ostream& err);
int cmd_inspect(const InspectArgs& args, std::ostream& out, std::ostream& err);
int cmd_evaluate(const EvaluateArgs& args, std::ostream& out, std::ostream& err);
int cmd_export_tasks(const ProtocolArgs& args, const std::filesystem::path& out_dir, std::ostream& out,
                     std::ostream& err);

/// Composite overlay used by `inspect`: support on the left with the mask
/// tinted green, query on the right with foreground tinted red and ignore
/// tinted blue. Tinted pixels are the average of the source and the tint.
Image inspect_composite(const Episode& episode);

}  // namespace splitshot::cli

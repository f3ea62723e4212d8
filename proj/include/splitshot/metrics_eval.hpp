// Copyright 2026 The splitshot Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "splitshot/binary_mask.hpp"
#include "splitshot/dataset_io.hpp"
#include "splitshot/rng.hpp"

namespace splitshot {

/// |pred & gt & ~exclude| / |(pred | gt) & ~exclude|; 1.0 on an empty union.
/// Throws DimensionMismatch.
double iou(const BinaryMask& pred, const BinaryMask& gt, const BinaryMask* exclude = nullptr);

struct ClassCounts {
  std::uint64_t intersection = 0;
  std::uint64_t union_ = 0;
  std::uint64_t tasks = 0;
  friend bool operator==(const ClassCounts&, const ClassCounts&) = default;
};

/// Class-wise accumulation: intersections and unions are summed over tasks
/// and divided once per class.
class ClassAccumulator {
 public:
  void add(int class_id, const BinaryMask& pred, const BinaryMask& gt,
           const BinaryMask* exclude = nullptr);
  void add_counts(int class_id, std::uint64_t intersection, std::uint64_t union_);
  void merge(const ClassAccumulator& other);

  /// nullopt for a class that received no tasks.
  std::optional<double> class_iou(int class_id) const;
  const std::map<int, ClassCounts>& buckets() const { return buckets_; }

  friend bool operator==(const ClassAccumulator&, const ClassAccumulator&) = default;

 private:
  std::map<int, ClassCounts> buckets_;
};

struct TestTask {
  std::string task_id;
  int run = 0;
  int fold = 0;
  int class_id = 0;
  std::size_t support_entry = 0;  // index into the manifest entries
  std::size_t query_entry = 0;
  std::string support_image;
  std::string query_image;

  friend bool operator==(const TestTask&, const TestTask&) = default;
};

/// class id -> manifest entry indices (ascending) whose groundtruth contains
/// the class. Uses `class_ids` when present, otherwise scans `gt_mask_path`.
using ClassIndex = std::map<int, std::vector<std::size_t>>;
ClassIndex build_class_index(const DatasetManifest& manifest);

/// Uniform class from the fold, then two distinct images containing it,
/// drawn with replacement across tasks. Throws InsufficientImages naming a
/// class with fewer than two images.
std::vector<TestTask> sample_test_tasks(const DatasetManifest& manifest, const ClassIndex& index,
                                        const FoldSpec& folds, int fold_index, int count,
                                        RandomStream& rng, int run = 0);

/// Protocol driver: runs x folds, run r seeded with base_seed + r.
std::vector<TestTask> sample_protocol_tasks(const DatasetManifest& manifest, const ClassIndex& index,
                                            const FoldSpec& folds, const std::vector<int>& fold_indices,
                                            int runs, int tasks_per_run, std::uint64_t base_seed);

struct TaskGroundTruth {
  BinaryMask foreground;
  std::optional<BinaryMask> exclude;
};

using PredictionLookup = std::function<BinaryMask(const TestTask&)>;
using GroundTruthLookup = std::function<TaskGroundTruth(const TestTask&)>;

/// Groundtruth from the manifest's class rasters; 255 pixels are excluded.
GroundTruthLookup manifest_ground_truth(const DatasetManifest& manifest);
PredictionLookup prediction_set_lookup(const PredictionSet& predictions);
/// Query image's saliency mask as the prediction; MissingSaliency otherwise.
PredictionLookup saliency_lookup(const DatasetManifest& manifest, std::uint8_t threshold = 128);

struct FoldResult {
  int fold = 0;
  std::map<int, double> class_iou;
  std::vector<int> absent_classes;
  std::map<int, ClassCounts> counts;
  double miou = 0.0;
};

struct RunResult {
  int run = 0;
  std::uint64_t seed = 0;
  std::vector<FoldResult> folds;
  double mean_miou = 0.0;  // mean over folds
};

struct EvalReport {
  std::string dataset;
  std::string source;  // "predictions" or "saliency"
  int runs = 0;
  int tasks_per_run = 0;
  std::uint64_t base_seed = 0;
  std::vector<RunResult> run_results;
  /// Per fold, across runs.
  std::map<int, double> fold_mean;
  std::map<int, double> fold_std;
  double overall_mean = 0.0;
  double overall_std = 0.0;

  nlohmann::json to_json() const;
  /// Aligned table: one row per run, columns fold0..fold3 and mean.
  std::string to_table() const;
};

/// Scores tasks grouped by (run, fold). Lookups may throw; MissingPrediction
/// and MissingSaliency propagate with the task id.
EvalReport run_evaluation(const std::vector<TestTask>& tasks, const PredictionLookup& predict,
                          const GroundTruthLookup& ground_truth, const FoldSpec& folds,
                          int workers = 1);

EvalReport saliency_baseline(const std::vector<TestTask>& tasks, const DatasetManifest& manifest,
                             const GroundTruthLookup& ground_truth, const FoldSpec& folds,
                             int workers = 1);

/// Writes `tasks.json` plus a binarized support mask per task for an
/// external predictor; images are referenced by path, not copied.
void export_tasks(const std::vector<TestTask>& tasks, const DatasetManifest& manifest,
                  const std::filesystem::path& out_dir);

}  // namespace splitshot

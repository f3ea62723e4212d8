// Copyright 2026 The splitshot Authors
// SPDX-License-Identifier: Apache-2.0

#include "splitshot/metrics_eval.hpp"

#include <fmt/format.h>

#include <cmath>
#include <exception>
#include <limits>
#include <set>
#include <thread>

#include "splitshot/errors.hpp"
#include "splitshot/simd/kernels.hpp"

namespace splitshot {

using nlohmann::json;

namespace {

simd::OverlapCounts overlap(const BinaryMask& pred, const BinaryMask& gt, const BinaryMask* exclude) {
  if (!pred.same_shape(gt) || (exclude != nullptr && !exclude->same_shape(gt))) {
    throw Error(ErrorKind::DimensionMismatch,
                fmt::format("prediction {}x{} vs groundtruth {}x{}", pred.width(), pred.height(),
                            gt.width(), gt.height()));
  }
  return simd::kernels().overlap_counts(pred.data().data(), gt.data().data(),
                                        exclude ? exclude->data().data() : nullptr, gt.size());
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Population standard deviation.
double spread_of(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

json number_or_null(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

std::string pct(double v) { return std::isnan(v) ? std::string("-") : fmt::format("{:.1f}", 100.0 * v); }

}  // namespace

double iou(const BinaryMask& pred, const BinaryMask& gt, const BinaryMask* exclude) {
  const auto c = overlap(pred, gt, exclude);
  if (c.union_ == 0) return 1.0;
  return static_cast<double>(c.intersection) / static_cast<double>(c.union_);
}

void ClassAccumulator::add(int class_id, const BinaryMask& pred, const BinaryMask& gt,
                           const BinaryMask* exclude) {
  const auto c = overlap(pred, gt, exclude);
  add_counts(class_id, c.intersection, c.union_);
}

void ClassAccumulator::add_counts(int class_id, std::uint64_t intersection, std::uint64_t union_) {
  auto& b = buckets_[class_id];
  b.intersection += intersection;
  b.union_ += union_;
  b.tasks += 1;
}

void ClassAccumulator::merge(const ClassAccumulator& other) {
  for (const auto& [cls, c] : other.buckets_) {
    auto& b = buckets_[cls];
    b.intersection += c.intersection;
    b.union_ += c.union_;
    b.tasks += c.tasks;
  }
}

std::optional<double> ClassAccumulator::class_iou(int class_id) const {
  auto it = buckets_.find(class_id);
  if (it == buckets_.end() || it->second.tasks == 0) return std::nullopt;
  if (it->second.union_ == 0) return 1.0;
  return static_cast<double>(it->second.intersection) / static_cast<double>(it->second.union_);
}

ClassIndex build_class_index(const DatasetManifest& manifest) {
  ClassIndex index;
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    const auto& e = manifest.entries[i];
    std::set<int> classes;
    if (e.class_ids) {
      classes.insert(e.class_ids->begin(), e.class_ids->end());
    } else if (e.gt_mask_path) {
      const ClassMap map = read_class_map(*e.gt_mask_path);
      for (auto v : map.values) {
        if (v != 0 && v != 255) classes.insert(v);
      }
    }
    for (int c : classes) index[c].push_back(i);
  }
  return index;
}

std::vector<TestTask> sample_test_tasks(const DatasetManifest& manifest, const ClassIndex& index,
                                        const FoldSpec& folds, int fold_index, int count,
                                        RandomStream& rng, int run) {
  if (fold_index < 0 || fold_index > 3) {
    throw Error(ErrorKind::InvalidArgument, fmt::format("fold index {} outside [0, 3]", fold_index));
  }
  if (count < 0) throw Error(ErrorKind::InvalidArgument, "task count must be >= 0");
  std::vector<TestTask> tasks;
  if (count == 0) return tasks;

  const auto& classes = folds.folds[fold_index];
  for (int c : classes) {
    auto it = index.find(c);
    const std::size_t have = it == index.end() ? 0 : it->second.size();
    if (have < 2) {
      throw Error(ErrorKind::InsufficientImages,
                  fmt::format("class {} (fold {}) appears in {} image(s), need 2", c, fold_index, have));
    }
  }
  tasks.reserve(count);
  const auto n_classes = static_cast<std::int64_t>(classes.size());
  for (int t = 0; t < count; ++t) {
    TestTask task;
    task.task_id = fmt::format("r{}_f{}_{:05d}", run, fold_index, t);
    task.run = run;
    task.fold = fold_index;
    task.class_id = classes[rng.uniform_int(0, n_classes - 1)];
    const auto& pool = index.at(task.class_id);
    const auto n = static_cast<std::int64_t>(pool.size());
    const auto s = rng.uniform_int(0, n - 1);
    auto q = rng.uniform_int(0, n - 2);
    if (q >= s) ++q;
    task.support_entry = pool[s];
    task.query_entry = pool[q];
    task.support_image = manifest.entries[task.support_entry].image_id;
    task.query_image = manifest.entries[task.query_entry].image_id;
    tasks.push_back(std::move(task));
  }
  return tasks;
}

std::vector<TestTask> sample_protocol_tasks(const DatasetManifest& manifest, const ClassIndex& index,
                                            const FoldSpec& folds, const std::vector<int>& fold_indices,
                                            int runs, int tasks_per_run, std::uint64_t base_seed) {
  std::vector<TestTask> all;
  const std::uint64_t stream = fnv1a64("test-tasks");
  for (int r = 0; r < runs; ++r) {
    for (int f : fold_indices) {
      RandomStream rng(base_seed + static_cast<std::uint64_t>(r), stream, static_cast<std::uint32_t>(f));
      auto tasks = sample_test_tasks(manifest, index, folds, f, tasks_per_run, rng, r);
      all.insert(all.end(), std::make_move_iterator(tasks.begin()), std::make_move_iterator(tasks.end()));
    }
  }
  return all;
}

GroundTruthLookup manifest_ground_truth(const DatasetManifest& manifest) {
  return [&manifest](const TestTask& task) {
    const auto& entry = manifest.entries.at(task.query_entry);
    if (!entry.gt_mask_path) {
      throw Error(ErrorKind::MissingFile,
                  fmt::format("task '{}': image '{}' has no gt_mask_path", task.task_id, entry.image_id));
    }
    const ClassMap map = read_class_map(*entry.gt_mask_path);
    TaskGroundTruth gt{binarize_class_mask(map, task.class_id), std::nullopt};
    BinaryMask ignore = ignore_region(map);
    if (foreground_count(ignore) > 0) gt.exclude = std::move(ignore);
    return gt;
  };
}

PredictionLookup prediction_set_lookup(const PredictionSet& predictions) {
  return [&predictions](const TestTask& task) { return predictions.load(task.task_id); };
}

PredictionLookup saliency_lookup(const DatasetManifest& manifest, std::uint8_t threshold) {
  return [&manifest, threshold](const TestTask& task) {
    const auto& entry = manifest.entries.at(task.query_entry);
    if (!entry.saliency_path || !fs::exists(*entry.saliency_path)) {
      throw Error(ErrorKind::MissingSaliency,
                  fmt::format("task '{}': no saliency mask for image '{}'", task.task_id, entry.image_id));
    }
    return read_mask(*entry.saliency_path, threshold);
  };
}

EvalReport run_evaluation(const std::vector<TestTask>& tasks, const PredictionLookup& predict,
                          const GroundTruthLookup& ground_truth, const FoldSpec& folds, int workers) {
  if (workers < 1) throw Error(ErrorKind::InvalidArgument, "workers must be >= 1");
  // Per-task (I, U) first; accumulation afterwards keeps results independent of scheduling.
  std::vector<simd::OverlapCounts> counts(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  auto score = [&](std::size_t first) {
    for (std::size_t i = first; i < tasks.size(); i += static_cast<std::size_t>(workers)) {
      try {
        const TaskGroundTruth gt = ground_truth(tasks[i]);
        const BinaryMask pred = predict(tasks[i]);
        try {
          counts[i] = overlap(pred, gt.foreground, gt.exclude ? &*gt.exclude : nullptr);
        } catch (const Error& e) {
          throw Error(e.kind(), fmt::format("task '{}': {}", tasks[i].task_id, e.what()));
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < workers; ++t) pool.emplace_back(score, static_cast<std::size_t>(t));
  score(0);
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::map<int, std::map<int, ClassAccumulator>> grouped;  // run -> fold -> acc
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    grouped[tasks[i].run][tasks[i].fold].add_counts(tasks[i].class_id, counts[i].intersection,
                                                    counts[i].union_);
  }

  EvalReport report;
  report.dataset = folds.dataset;
  report.runs = static_cast<int>(grouped.size());
  std::map<int, std::vector<double>> per_fold;
  std::vector<double> run_means;
  for (const auto& [run, by_fold] : grouped) {
    RunResult rr;
    rr.run = run;
    std::vector<double> fold_values;
    for (const auto& [fold, acc] : by_fold) {
      FoldResult fr;
      fr.fold = fold;
      fr.counts = acc.buckets();
      std::vector<double> ious;
      for (int c : folds.folds.at(fold)) {
        if (auto v = acc.class_iou(c)) {
          fr.class_iou[c] = *v;
          ious.push_back(*v);
        } else {
          fr.absent_classes.push_back(c);
        }
      }
      fr.miou = mean_of(ious);
      fold_values.push_back(fr.miou);
      per_fold[fold].push_back(fr.miou);
      rr.folds.push_back(std::move(fr));
    }
    rr.mean_miou = mean_of(fold_values);
    run_means.push_back(rr.mean_miou);
    report.run_results.push_back(std::move(rr));
  }
  for (const auto& [fold, values] : per_fold) {
    report.fold_mean[fold] = mean_of(values);
    report.fold_std[fold] = spread_of(values);
  }
  report.overall_mean = mean_of(run_means);
  report.overall_std = spread_of(run_means);
  if (!report.run_results.empty() && !tasks.empty()) {
    std::size_t first_group = 0;
    for (const auto& t : tasks) first_group += (t.run == tasks.front().run && t.fold == tasks.front().fold);
    report.tasks_per_run = static_cast<int>(first_group);
  }
  report.source = "predictions";
  return report;
}

EvalReport saliency_baseline(const std::vector<TestTask>& tasks, const DatasetManifest& manifest,
                             const GroundTruthLookup& ground_truth, const FoldSpec& folds, int workers) {
  EvalReport report = run_evaluation(tasks, saliency_lookup(manifest), ground_truth, folds, workers);
  report.source = "saliency";
  return report;
}

json EvalReport::to_json() const {
  json runs_json = json::array();
  for (const auto& rr : run_results) {
    json folds_json = json::array();
    for (const auto& fr : rr.folds) {
      json classes = json::object();
      for (const auto& [c, v] : fr.class_iou) {
        const auto& cnt = fr.counts.at(c);
        classes[std::to_string(c)] = {{"iou", v},
                                      {"intersection", cnt.intersection},
                                      {"union", cnt.union_},
                                      {"tasks", cnt.tasks}};
      }
      folds_json.push_back({{"fold", fr.fold},
                            {"miou", number_or_null(fr.miou)},
                            {"classes", classes},
                            {"absent_classes", fr.absent_classes}});
    }
    runs_json.push_back({{"run", rr.run}, {"seed", rr.seed}, {"mean_miou", number_or_null(rr.mean_miou)},
                         {"folds", folds_json}});
  }
  json fm = json::object();
  json fs_ = json::object();
  for (const auto& [f, v] : fold_mean) fm[std::to_string(f)] = number_or_null(v);
  for (const auto& [f, v] : fold_std) fs_[std::to_string(f)] = number_or_null(v);
  return {{"dataset", dataset},
          {"source", source},
          {"runs", runs},
          {"tasks_per_run", tasks_per_run},
          {"base_seed", base_seed},
          {"fold_mean", fm},
          {"fold_std", fs_},
          {"overall_mean", number_or_null(overall_mean)},
          {"overall_std", number_or_null(overall_std)},
          {"run_results", runs_json}};
}

std::string EvalReport::to_table() const {
  std::string out = fmt::format("dataset={} source={} runs={} tasks={} seed={}\n", dataset, source, runs,
                                tasks_per_run, base_seed);
  out += fmt::format("{:<8}", "run");
  for (int f = 0; f < 4; ++f) out += fmt::format("{:>8}", fmt::format("fold{}", f));
  out += fmt::format("{:>8}\n", "mean");
  auto row = [&](const std::string& label, const std::map<int, double>& values, double mean) {
    std::string line = fmt::format("{:<8}", label);
    for (int f = 0; f < 4; ++f) {
      auto it = values.find(f);
      line += fmt::format("{:>8}", it == values.end() ? std::string("-") : pct(it->second));
    }
    return line + fmt::format("{:>8}\n", pct(mean));
  };
  for (const auto& rr : run_results) {
    std::map<int, double> values;
    for (const auto& fr : rr.folds) values[fr.fold] = fr.miou;
    out += row(std::to_string(rr.run), values, rr.mean_miou);
  }
  out += row("mean", fold_mean, overall_mean);
  out += row("std", fold_std, overall_std);
  return out;
}

void export_tasks(const std::vector<TestTask>& tasks, const DatasetManifest& manifest, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  json list = json::array();
  for (const auto& t : tasks) {
    const auto& support = manifest.entries.at(t.support_entry);
    const auto& query = manifest.entries.at(t.query_entry);
    if (!support.gt_mask_path) {
      throw Error(ErrorKind::MissingFile, fmt::format("task '{}': support image '{}' has no gt_mask_path",
                                                      t.task_id, support.image_id));
    }
    const BinaryMask mask = binarize_class_mask(read_class_map(*support.gt_mask_path), t.class_id);
    const std::string mask_name = t.task_id + "_support_mask.png";
    write_file(out_dir / mask_name, encode_png_gray(mask.width(), mask.height(), mask.data()));
    list.push_back({{"task_id", t.task_id},
                    {"run", t.run},
                    {"fold", t.fold},
                    {"class_id", t.class_id},
                    {"support_image", support.image_id},
                    {"support_image_path", fs::absolute(support.image_path).string()},
                    {"support_mask", mask_name},
                    {"query_image", query.image_id},
                    {"query_image_path", fs::absolute(query.image_path).string()},
                    {"prediction", t.task_id + "_pred.png"}});
  }
  const json doc = {{"version", 1}, {"tasks", list}};
  const std::string text = doc.dump(2) + "\n";
  write_file(out_dir / "tasks.json", std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace splitshot

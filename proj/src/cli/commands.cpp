// Copyright 2026 The splitshot Authors
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <fmt/format.h>

#include <ostream>

#include "splitshot/cli.hpp"
#include "splitshot/episode_pack.hpp"
#include "splitshot/errors.hpp"
#include "splitshot/metrics_eval.hpp"

namespace splitshot::cli {

using nlohmann::json;

namespace {

std::uint8_t tint(std::uint8_t src, std::uint8_t color) {
  return static_cast<std::uint8_t>((static_cast<unsigned>(src) + color) / 2);
}

void paint(Image& canvas, const Image& src, int x_offset) {
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < src.width(); ++x) {
      for (int c = 0; c < 3; ++c) canvas.at(x + x_offset, y, c) = src.at(x, y, c);
    }
  }
}

void tint_pixel(Image& canvas, int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  canvas.at(x, y, 0) = tint(canvas.at(x, y, 0), r);
  canvas.at(x, y, 1) = tint(canvas.at(x, y, 1), g);
  canvas.at(x, y, 2) = tint(canvas.at(x, y, 2), b);
}

}  // namespace

Image inspect_composite(const Episode& ep) {
  const int w = ep.support_image.width();
  const int h = ep.support_image.height();
  Image canvas(2 * w, h);
  paint(canvas, ep.support_image, 0);
  paint(canvas, ep.query_image, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (ep.support_mask.row(y)[x]) tint_pixel(canvas, x, y, 0, 255, 0);
      const std::uint8_t label = ep.query_label.at(x, y);
      if (label == 1) tint_pixel(canvas, w + x, y, 255, 0, 0);
      if (label == kIgnoreLabel) tint_pixel(canvas, w + x, y, 0, 0, 255);
    }
  }
  return canvas;
}

int cmd_generate(const GenerateArgs& args, std::ostream& out, std::ostream& err) {
  const DatasetManifest manifest = load_manifest(args.manifest);
  const GenerationStats stats = generate_dataset(manifest, args.config, args.out, args.workers);
  out << stats.to_json().dump() << "\n";
  if (stats.generated == 0 && !manifest.entries.empty()) {
    err << "warning: no episodes generated\n";
  }
  return kExitOk;
}

int cmd_verify(const std::filesystem::path& pack, bool as_json, std::ostream& out, std::ostream& err) {
  const auto violations = verify_pack(pack);
  if (as_json) {
    json list = json::array();
    for (const auto& v : violations) {
      list.push_back({{"episode", v.episode_id}, {"kind", std::string(to_string(v.kind))}, {"message", v.message}});
    }
    out << json{{"clean", violations.empty()}, {"violations", list}}.dump() << "\n";
  } else if (violations.empty()) {
    out << "pack clean: " << pack.string() << "\n";
  }
  for (const auto& v : violations) {
    err << "episode " << (v.episode_id.empty() ? std::string("<pack>") : v.episode_id) << ": " << v.message
        << "\n";
  }
  return violations.empty() ? kExitOk : kExitDataError;
}

int cmd_inspect(const InspectArgs& args, std::ostream& out, std::ostream&) {
  const PackManifest manifest = read_pack_manifest(args.pack);
  std::vector<const EpisodeRecord*> chosen;
  if (args.ids.empty()) {
    for (std::size_t i = 0; i < manifest.episodes.size() && i < 8; ++i) chosen.push_back(&manifest.episodes[i]);
  } else {
    for (const auto& id : args.ids) {
      auto it = std::find_if(manifest.episodes.begin(), manifest.episodes.end(),
                             [&](const EpisodeRecord& r) { return r.id == id; });
      if (it == manifest.episodes.end()) {
        throw Error(ErrorKind::UnknownEpisode, fmt::format("'{}' not in {}", id, args.pack.string()));
      }
      chosen.push_back(&*it);
    }
  }
  std::filesystem::create_directories(args.out);
  for (const EpisodeRecord* rec : chosen) {
    const Episode ep = read_episode(args.pack, *rec);
    const auto path = args.out / (rec->id + "_inspect.png");
    write_file(path, encode_png(inspect_composite(ep)));
    out << path.string() << "\n";
  }
  return kExitOk;
}

namespace {

std::vector<TestTask> protocol_tasks(const ProtocolArgs& args, const DatasetManifest& manifest,
                                     FoldSpec& folds) {
  const std::string dataset = args.dataset.empty() ? manifest.dataset_name : args.dataset;
  folds = make_fold_spec(dataset, args.scheme);
  const ClassIndex index = build_class_index(manifest);
  return sample_protocol_tasks(manifest, index, folds, args.folds, args.runs, args.tasks, args.seed);
}

}  // namespace

int cmd_evaluate(const EvaluateArgs& args, std::ostream& out, std::ostream&) {
  const DatasetManifest manifest = load_manifest(args.protocol.manifest);
  FoldSpec folds;
  const auto tasks = protocol_tasks(args.protocol, manifest, folds);
  const GroundTruthLookup gt = manifest_ground_truth(manifest);
  EvalReport report;
  if (args.baseline_saliency) {
    report = run_evaluation(tasks, saliency_lookup(manifest, args.threshold), gt, folds, args.workers);
    report.source = "saliency";
  } else {
    const PredictionSet predictions = PredictionSet::open(*args.predictions);
    report = run_evaluation(tasks, prediction_set_lookup(predictions), gt, folds, args.workers);
  }
  report.runs = args.protocol.runs;
  report.tasks_per_run = args.protocol.tasks;
  report.base_seed = args.protocol.seed;
  for (auto& rr : report.run_results) rr.seed = args.protocol.seed + static_cast<std::uint64_t>(rr.run);
  if (args.json) {
    out << report.to_json().dump(2) << "\n";
  } else {
    out << report.to_table();
  }
  return kExitOk;
}

int cmd_export_tasks(const ProtocolArgs& args, const std::filesystem::path& out_dir, std::ostream& out,
                     std::ostream&) {
  const DatasetManifest manifest = load_manifest(args.manifest);
  FoldSpec folds;
  const auto tasks = protocol_tasks(args, manifest, folds);
  export_tasks(tasks, manifest, out_dir);
  out << json{{"tasks", tasks.size()}, {"out", out_dir.string()}}.dump() << "\n";
  return kExitOk;
}

}  // namespace splitshot::cli

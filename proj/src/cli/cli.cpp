// Copyright 2026 The splitshot Authors
// SPDX-License-Identifier: Apache-2.0

#include "splitshot/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <ostream>
#include <thread>

#include "commands.hpp"
#include "splitshot/errors.hpp"

namespace splitshot::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int default_workers() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

std::vector<int> parse_folds(const std::string& text) {
  if (text == "all") return {0, 1, 2, 3};
  std::vector<int> folds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.size() != 1 || item[0] < '0' || item[0] > '3') {
      throw UsageError("--fold expects 'all' or a comma list of 0..3, got '" + text + "'");
    }
    folds.push_back(item[0] - '0');
  }
  if (folds.empty()) throw UsageError("--fold is empty");
  return folds;
}

EpisodeConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError("config file " + path + ": " + e.what());
  }
  try {
    return episode_config_from_json(j);
  } catch (const Error& e) {
    throw UsageError(path + ": " + e.what());
  }
}

struct ProtocolFlags {
  std::string manifest;
  std::string dataset;
  std::string fold = "all";
  std::string scheme = "block";
  int runs = 5;
  int tasks = 2500;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;

  void attach(CLI::App* app) {
    app->add_option("--manifest", manifest, "Dataset manifest JSON")->required()->check(CLI::ExistingFile);
    app->add_option("--dataset", dataset, "pascal or coco (default: manifest dataset_name)");
    app->add_option("--fold", fold, "Fold index 0..3, comma list, or 'all'")->capture_default_str();
    app->add_option("--fold-scheme", scheme, "block or interleave")
        ->check(CLI::IsMember({"block", "interleave"}))
        ->capture_default_str();
    app->add_option("--runs", runs, "Evaluation runs")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--tasks", tasks, "Tasks per run and fold")->check(CLI::NonNegativeNumber)->capture_default_str();
    seed_opt = app->add_option("--seed", seed, "Base seed; run r uses seed + r")->capture_default_str();
  }

  ProtocolArgs build() const {
    ProtocolArgs p;
    p.manifest = manifest;
    p.dataset = dataset;
    p.folds = parse_folds(fold);
    p.scheme = *parse_fold_scheme(scheme);
    p.runs = runs;
    p.tasks = tasks;
    p.seed = seed;
    return p;
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"splitshot: one-shot segmentation episodes from split saliency masks"};
  app.require_subcommand(1);
  bool strict_repro = false;
  app.add_flag("--strict-repro", strict_repro, "Require an explicit --seed on randomized commands");

  // generate
  auto* gen = app.add_subcommand("generate", "Generate an episode pack from a dataset manifest");
  GenerateArgs g;
  std::string g_manifest, g_out, g_config, g_split;
  std::uint64_t g_seed = 0;
  int g_slope = 40, g_out_size = 400, g_min_side = 100, g_max_resample = 10, g_min_image_fg = 200;
  int g_per_image = 1, g_epoch = 0, g_threshold = 128;
  double g_prob = 1.0;
  bool g_no_slope = false, g_alternate = true, g_aug = true;
  g.workers = default_workers();
  gen->add_option("--manifest", g_manifest, "Dataset manifest JSON")->required()->check(CLI::ExistingFile);
  gen->add_option("--out", g_out, "Output pack directory")->required();
  auto* o_config = gen->add_option("--config", g_config, "EpisodeConfig JSON; flags override it");
  auto* o_seed = gen->add_option("--seed", g_seed, "Base seed");
  auto* o_split = gen->add_option("--split", g_split, "vsplit, hsplit, mixed or none")
                      ->check(CLI::IsMember({"vsplit", "hsplit", "mixed", "none"}));
  auto* o_slope = gen->add_option("--slope", g_slope, "Slope shift range in pixels (enables slope)")
                      ->check(CLI::NonNegativeNumber);
  auto* o_no_slope = gen->add_flag("--no-slope", g_no_slope, "Axis-aligned split lines");
  auto* o_alt = gen->add_flag("--alternate,!--no-alternate", g_alternate, "Randomly swap support/query sides");
  auto* o_prob = gen->add_option("--prob", g_prob, "Probability of applying the split")->check(CLI::Range(0.0, 1.0));
  auto* o_aug = gen->add_flag("--aug,!--no-aug", g_aug, "Paired image augmentations");
  auto* o_size = gen->add_option("--out-size", g_out_size, "Episode edge length")->check(CLI::PositiveNumber);
  auto* o_min_side = gen->add_option("--min-side", g_min_side, "Minimum foreground pixels per split side")
                         ->check(CLI::NonNegativeNumber);
  auto* o_resample = gen->add_option("--max-resample", g_max_resample, "Slope redraws before falling back")
                         ->check(CLI::NonNegativeNumber);
  auto* o_min_fg = gen->add_option("--min-image-fg", g_min_image_fg, "Skip images with less saliency foreground")
                       ->check(CLI::NonNegativeNumber);
  auto* o_per_image = gen->add_option("--episodes-per-image", g_per_image)->check(CLI::PositiveNumber);
  auto* o_epoch = gen->add_option("--epoch", g_epoch, "Stream selector for per-epoch reseeding")
                      ->check(CLI::NonNegativeNumber);
  auto* o_threshold = gen->add_option("--threshold", g_threshold, "Saliency binarization threshold")
                          ->check(CLI::Range(0, 255));
  gen->add_option("--workers", g.workers, "Worker threads")->check(CLI::PositiveNumber);

  // verify
  auto* ver = app.add_subcommand("verify", "Re-check every invariant of an episode pack");
  std::string v_pack;
  bool v_json = false;
  ver->add_option("pack", v_pack, "Pack directory")->required();
  ver->add_flag("--json", v_json);

  // inspect
  auto* ins = app.add_subcommand("inspect", "Write overlay composites for pack episodes");
  InspectArgs in_args;
  std::string in_pack, in_out;
  ins->add_option("pack", in_pack, "Pack directory")->required();
  ins->add_option("--ids", in_args.ids, "Episode ids (default: first 8)")->delimiter(',');
  ins->add_option("--out", in_out, "Output directory")->required();

  // evaluate
  auto* eva = app.add_subcommand("evaluate", "Score predictions or the saliency baseline with the episodic protocol");
  ProtocolFlags e_flags;
  e_flags.attach(eva);
  EvaluateArgs e_args;
  std::string e_predictions;
  int e_threshold = 128;
  e_args.workers = default_workers();
  auto* o_pred = eva->add_option("--predictions", e_predictions, "Prediction-set directory");
  auto* o_base = eva->add_flag("--baseline-saliency", e_args.baseline_saliency,
                               "Use each query's saliency mask as the prediction");
  o_pred->excludes(o_base);
  eva->add_option("--threshold", e_threshold, "Saliency binarization threshold")->check(CLI::Range(0, 255));
  eva->add_option("--workers", e_args.workers)->check(CLI::PositiveNumber);
  eva->add_flag("--json", e_args.json, "Report as JSON instead of a table");

  // export-tasks
  auto* exp = app.add_subcommand("export-tasks", "Sample evaluation tasks and export them for a predictor");
  ProtocolFlags x_flags;
  x_flags.attach(exp);
  std::string x_out;
  exp->add_option("--out", x_out, "Output directory")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (gen->parsed()) {
      if (strict_repro && o_seed->count() == 0) throw UsageError("--strict-repro requires --seed");
      EpisodeConfig c = o_config->count() ? load_config_file(g_config) : EpisodeConfig{};
      if (o_seed->count()) c.seed = g_seed;
      if (o_split->count()) c.split.mode = *parse_split_mode(g_split);
      if (o_slope->count()) {
        c.split.slope_range = g_slope;
        c.split.slope_enabled = true;
      }
      if (o_no_slope->count()) c.split.slope_enabled = false;
      if (o_alt->count()) c.split.alternate = g_alternate;
      if (o_prob->count()) c.split.prob = g_prob;
      if (o_aug->count()) c.aug.enabled = g_aug;
      if (o_size->count()) c.out_size = g_out_size;
      if (o_min_side->count()) c.split.min_side_pixels = g_min_side;
      if (o_resample->count()) c.split.max_resample = g_max_resample;
      if (o_min_fg->count()) c.min_image_fg = g_min_image_fg;
      if (o_per_image->count()) c.episodes_per_image = g_per_image;
      if (o_epoch->count()) c.epoch = g_epoch;
      if (o_threshold->count()) c.saliency_threshold = static_cast<std::uint8_t>(g_threshold);
      try {
        c.validate();
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
      g.manifest = g_manifest;
      g.out = g_out;
      g.config = c;
      return cmd_generate(g, out, err);
    }
    if (ver->parsed()) return cmd_verify(v_pack, v_json, out, err);
    if (ins->parsed()) {
      in_args.pack = in_pack;
      in_args.out = in_out;
      return cmd_inspect(in_args, out, err);
    }
    if (eva->parsed()) {
      if (strict_repro && e_flags.seed_opt->count() == 0) throw UsageError("--strict-repro requires --seed");
      if (!o_pred->count() && !e_args.baseline_saliency) {
        throw UsageError("evaluate needs --predictions DIR or --baseline-saliency");
      }
      e_args.protocol = e_flags.build();
      if (o_pred->count()) e_args.predictions = e_predictions;
      e_args.threshold = static_cast<std::uint8_t>(e_threshold);
      return cmd_evaluate(e_args, out, err);
    }
    if (exp->parsed()) {
      if (strict_repro && x_flags.seed_opt->count() == 0) throw UsageError("--strict-repro requires --seed");
      return cmd_export_tasks(x_flags.build(), x_out, out, err);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::InvalidArgument ? kExitUsage : kExitDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDataError;
  }
  return kExitUsage;
}

}  // namespace splitshot::cli

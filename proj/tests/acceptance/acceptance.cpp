// Copyright 2026 The splitshot Authors
// SPDX-License-Identifier: Apache-2.0
//
// One PASS/FAIL line per acceptance criterion. Tolerances are fixed here and
// printed alongside each result.

#include <fmt/core.h>

#include <chrono>
#include <functional>
#include <random>
#include <sstream>
#include <thread>

#include "../test_support.hpp"
#include "splitshot/cli.hpp"
#include "splitshot/episode_engine.hpp"
#include "splitshot/episode_pack.hpp"
#include "splitshot/metrics_eval.hpp"
#include "splitshot/simd/kernels.hpp"

using namespace splitshot;
namespace t = splitshot::testing;

namespace {

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
  if (!ok) ++failures;
  fmt::print("{} {}: {}\n", ok ? "PASS" : "FAIL", name, detail);
  std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Runs `body`, turning an escaped exception into a FAIL line.
void criterion(const std::string& name, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(name, false, std::string("exception: ") + e.what());
  }
}

void balance_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> density(0.05, 0.60);
  int mismatches = 0, checked = 0;
  for (int i = 0; i < 50; ++i) {
    const auto m = t::random_mask(64, 64, density(gen), gen);
    for (bool vertical : {true, false}) {
      ++checked;
      if (balance_coordinate(m, vertical ? Axis::Vertical : Axis::Horizontal) != t::brute_balance(m, vertical))
        ++mismatches;
    }
  }
  const double s = seconds_since(t0);
  report("balance_oracle", mismatches == 0 && s < 5.0,
         fmt::format("{}/{} exact matches, {:.3f}s (limit 5s)", checked - mismatches, checked, s));
}

void partition_identity() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> density(0.05, 0.60);
  RandomStream rng(77);
  int bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto m = t::random_mask(64, 64, density(gen), gen);
    const auto line = sample_split_line(m, (i & 1) ? Axis::Horizontal : Axis::Vertical, true, 40, rng);
    const auto [a, b] = partition_mask(m, line);
    if (t::naive_count(mask_and(a, b)) != 0 || !(mask_or(a, b) == m)) ++bad;
  }
  const double s = seconds_since(t0);
  report("partition_identity", bad == 0 && s < 10.0,
         fmt::format("{}/1000 pairs disjoint and covering, {:.3f}s (limit 10s)", 1000 - bad, s));
}

void parameter_conformance() {
  SplitConfig split;
  BinaryMask m(8, 8);
  m.set(4, 4, true);
  RandomStream rng(5);
  int lo = 0, hi = 0;
  bool inside = true;
  for (int i = 0; i < 20000; ++i) {
    const int s = sample_split_line(m, Axis::Vertical, split.slope_enabled, split.slope_range, rng).shift;
    inside = inside && s >= -40 && s <= 40;
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  const EpisodeConfig ec;

  const auto dir = t::fresh_dir("acc_conformance");
  t::SyntheticOptions opt;
  opt.images = 10;
  opt.width = 24;
  opt.height = 24;
  const auto manifest = t::write_synthetic_dataset(dir, opt);
  std::ostringstream out, err;
  const int code = cli::run({"evaluate", "--manifest", manifest.string(), "--baseline-saliency", "--fold", "0",
                             "--json"},
                            out, err);
  int runs = -1, tasks = -1;
  if (code == 0) {
    const auto j = nlohmann::json::parse(out.str());
    runs = j["runs"];
    tasks = j["tasks_per_run"];
  }
  const bool ok = inside && split.slope_range == 40 && lo == -40 && hi == 40 && ec.out_size == 400 &&
                  runs == 5 && tasks == 2500;
  report("parameter_conformance", ok,
         fmt::format("slope draws in [{}, {}] (range 40), out_size {}, evaluate defaults runs={} tasks={}", lo, hi,
                     ec.out_size, runs, tasks));
}

void knob_frequencies() {
  const auto t0 = std::chrono::steady_clock::now();
  constexpr int kN = 10000;
  std::mt19937_64 gen(9);
  const auto img = t::random_image(64, 64, gen);
  const auto sal = t::disk_mask(64, 64, 31.5, 31.5, 24);

  struct Tally {
    int applied = 0, swapped = 0, vertical = 0;
  };
  auto tally = [&](EpisodeConfig cfg) {
    Tally tl;
    for (int i = 0; i < kN; ++i) {
      auto rng = RandomStream::for_item(cfg.seed, fmt::format("img_{}", i));
      const auto ep = make_episode(img, sal, cfg, rng);
      tl.applied += ep.meta.applied_split;
      tl.swapped += ep.meta.swapped;
      tl.vertical += ep.meta.applied_split && ep.meta.line->axis == Axis::Vertical;
    }
    return tl;
  };
  EpisodeConfig base;
  base.out_size = 64;
  base.min_image_fg = 1;

  auto within = [&](int count, int n, double p) {
    return std::abs(count / double(n) - p) <= t::three_sigma(p, n);
  };

  EpisodeConfig c03 = base;
  c03.split.prob = 0.3;
  c03.seed = 1;
  const auto a = tally(c03);
  EpisodeConfig c10 = base;
  c10.seed = 2;
  const auto b = tally(c10);
  EpisodeConfig mixed = base;
  mixed.seed = 3;
  mixed.split.mode = SplitMode::MixedSplit;
  const auto c = tally(mixed);
  const double s = seconds_since(t0);

  // At prob 1.0 the band is degenerate; exact 1.0 is required.
  const bool ok = within(a.applied, kN, 0.3) && b.applied == kN && within(b.swapped, b.applied, 0.5) &&
                  within(c.vertical, c.applied, 0.5) && c.applied == kN && s < 60.0;
  report("knob_frequencies", ok,
         fmt::format("applied@0.3={:.4f} (+-{:.4f}), applied@1.0={:.4f}, swapped={:.4f} (+-{:.4f}), "
                     "mixed vertical={:.4f} (+-{:.4f}), N={} each, {:.2f}s (limit 60s)",
                     a.applied / double(kN), t::three_sigma(0.3, kN), b.applied / double(kN),
                     b.swapped / double(b.applied), t::three_sigma(0.5, b.applied),
                     c.vertical / double(c.applied), t::three_sigma(0.5, c.applied), kN, s));
}

void ignore_label() {
  std::mt19937_64 gen(10);
  const auto img = t::random_image(96, 96, gen);
  int exact = 0, clean = 0;
  constexpr int kEpisodes = 200;
  for (int i = 0; i < kEpisodes; ++i) {
    const auto sal = t::disk_mask(96, 96, 30 + i % 30, 35 + i % 20, 18 + i % 10);
    EpisodeConfig plain;
    plain.out_size = 96;
    plain.min_image_fg = 1;
    plain.aug = AugmentationSpec::disabled();
    RandomStream r1(i);
    const auto e1 = make_episode(img, sal, plain, r1);
    std::uint64_t fg = 0, ign = 0;
    for (auto v : e1.query_label.values) {
      fg += v == 1;
      ign += v == kIgnoreLabel;
    }
    if (e1.meta.applied_split && ign == e1.meta.support_fg && ign == foreground_count(e1.support_mask) &&
        fg == e1.meta.query_fg)
      ++exact;

    EpisodeConfig aug = plain;
    aug.aug = AugmentationSpec{};
    RandomStream r2(i);
    const auto e2 = make_episode(img, sal, aug, r2);
    // Rebuild the query foreground from the recorded line and view params.
    const auto resized = resize_nearest(sal, 96, 96);
    BinaryMask query_fg = resized;
    if (e2.meta.applied_split) {
      const auto [side_a, side_b] = partition_mask(resized, *e2.meta.line);
      query_fg = e2.meta.swapped ? side_a : side_b;
    }
    const auto warped = apply_geometric_mask(query_fg, e2.meta.query_geometric, 96);
    bool ok = true;
    for (std::size_t k = 0; k < e2.query_label.values.size(); ++k) {
      const auto v = e2.query_label.values[k];
      const bool q = warped.data()[k] != 0;
      if (v == kIgnoreLabel && q) ok = false;
      if ((v == 1) != q) ok = false;
    }
    if (ok) ++clean;
  }
  report("ignore_label", exact == kEpisodes && clean == kEpisodes,
         fmt::format("no-aug exact counts {}/{}, augmented ignore-vs-query disjoint {}/{}", exact, kEpisodes,
                     clean, kEpisodes));
}

void determinism() {
  const auto dir = t::fresh_dir("acc_determinism");
  t::SyntheticOptions opt;
  opt.images = 10;
  const auto manifest = load_manifest(t::write_synthetic_dataset(dir / "data", opt));
  EpisodeConfig cfg;
  cfg.seed = 7;
  cfg.out_size = 128;
  cfg.min_image_fg = 50;
  cfg.split.min_side_pixels = 50;
  generate_dataset(manifest, cfg, dir / "w1", 1);
  generate_dataset(manifest, cfg, dir / "w8", 8);
  generate_dataset(manifest, cfg, dir / "w1b", 1);
  const auto a = t::snapshot_tree(dir / "w1");
  const bool parallel = a == t::snapshot_tree(dir / "w8");
  const bool repeat = a == t::snapshot_tree(dir / "w1b");
  report("determinism", parallel && repeat && a.size() > 1,
         fmt::format("{} files; workers 1 vs 8 {}; repeat run {}", a.size(), parallel ? "identical" : "DIFFER",
                     repeat ? "identical" : "DIFFER"));
}

void miou_oracle() {
  const auto dir = t::fresh_dir("acc_miou");
  t::SyntheticOptions opt;
  opt.images = 25;
  opt.width = 48;
  opt.height = 40;
  const auto manifest = load_manifest(t::write_synthetic_dataset(dir, opt));
  const auto folds = make_fold_spec("pascal");
  RandomStream rng(11, fnv1a64("acceptance"));
  const auto tasks = sample_test_tasks(manifest, build_class_index(manifest), folds, 0, 200, rng);
  const auto gt = manifest_ground_truth(manifest);

  std::mt19937_64 gen(12);
  std::map<std::string, BinaryMask> preds;
  for (const auto& tk : tasks) {
    // Groundtruth with random pixel noise, so IoUs are neither 0 nor 1.
    auto p = gt(tk).foreground;
    for (int y = 0; y < p.height(); ++y)
      for (int x = 0; x < p.width(); ++x)
        if (gen() % 5 == 0) p.set(x, y, !p.at(x, y));
    preds.emplace(tk.task_id, std::move(p));
  }
  const auto rep = run_evaluation(tasks, [&](const TestTask& tk) { return preds.at(tk.task_id); }, gt, folds, 4);

  std::map<int, std::pair<std::uint64_t, std::uint64_t>> acc;
  for (const auto& tk : tasks) {
    const auto cm = read_class_map(*manifest.entries[tk.query_entry].gt_mask_path);
    const auto& p = preds.at(tk.task_id);
    auto& [i, u] = acc[tk.class_id];
    for (int y = 0; y < cm.height; ++y)
      for (int x = 0; x < cm.width; ++x) {
        const int v = cm.values[static_cast<std::size_t>(y) * cm.width + x];
        if (v == 255) continue;
        const bool g = v == tk.class_id, q = p.at(x, y);
        i += g && q;
        u += g || q;
      }
  }
  double sum = 0;
  for (const auto& [cls, iu] : acc) sum += double(iu.first) / double(iu.second);
  const double ref = sum / acc.size();
  const double got = rep.run_results.at(0).folds.at(0).miou;
  const double rel = std::abs(got - ref) / ref;

  const auto perfect =
      run_evaluation(tasks, [&](const TestTask& tk) { return gt(tk).foreground; }, gt, folds, 4).overall_mean;

  const auto dir2 = t::fresh_dir("acc_miou_sal");
  opt.saliency_equals_gt = true;
  opt.num_classes = 5;
  // Single-object images only, so each query's saliency equals its class mask.
  opt.images = 25;
  auto m2 = load_manifest(t::write_synthetic_dataset(dir2, opt));
  std::vector<ManifestEntry> single;
  for (const auto& e : m2.entries)
    if (e.class_ids->size() == 1) single.push_back(e);
  m2.entries = single;
  RandomStream rng2(13);
  const auto tasks2 = sample_test_tasks(m2, build_class_index(m2), folds, 0, 200, rng2);
  const auto baseline = saliency_baseline(tasks2, m2, manifest_ground_truth(m2), folds, 4).overall_mean;

  report("miou_oracle", rel <= 1e-12 && perfect == 1.0 && baseline == 1.0,
         fmt::format("200 tasks, library {:.15f} vs reference {:.15f} (rel {:.1e}, limit 1e-12); "
                     "gt-as-prediction {}; saliency=gt baseline {}",
                     got, ref, rel, perfect, baseline));
}

void round_trips() {
  const auto dir = t::fresh_dir("acc_roundtrip");
  t::SyntheticOptions opt;
  opt.images = 4;
  const auto mpath = t::write_synthetic_dataset(dir / "data", opt);
  const auto manifest = load_manifest(mpath);
  write_manifest(manifest, dir / "copy.json");
  const bool manifest_ok = load_manifest(dir / "copy.json") == manifest;

  EpisodeConfig cfg;
  cfg.out_size = 96;
  cfg.min_image_fg = 50;
  cfg.split.min_side_pixels = 30;
  generate_dataset(manifest, cfg, dir / "pack", 1);
  const auto pm = read_pack_manifest(dir / "pack");
  int episodes_ok = 0, with_ignore = 0;
  for (const auto& rec : pm.episodes) {
    const auto ep = read_episode(dir / "pack", rec);
    const auto rec2 = write_episode(dir / "pack2", ep);
    if (rec2 == rec && read_episode(dir / "pack2", rec2) == ep) ++episodes_ok;
    if (std::find(ep.query_label.values.begin(), ep.query_label.values.end(), kIgnoreLabel) !=
        ep.query_label.values.end())
      ++with_ignore;
  }
  write_pack_manifest(dir / "pack2", pm);
  const bool pack_manifest_ok = read_pack_manifest(dir / "pack2") == pm &&
                                t::snapshot_tree(dir / "pack") == t::snapshot_tree(dir / "pack2");
  const int n = static_cast<int>(pm.episodes.size());
  report("round_trips", manifest_ok && pack_manifest_ok && episodes_ok == n && n > 0 && with_ignore > 0,
         fmt::format("manifest {}, episodes {}/{} bit-exact ({} carry 255), pack tree {}",
                     manifest_ok ? "identical" : "DIFFER", episodes_ok, n, with_ignore,
                     pack_manifest_ok ? "identical" : "DIFFER"));
}

void throughput() {
  const auto dir = t::fresh_dir("acc_throughput");
  t::SyntheticOptions opt;
  opt.images = 24;
  opt.width = 500;
  opt.height = 375;
  const auto manifest = load_manifest(t::write_synthetic_dataset(dir / "data", opt));
  EpisodeConfig cfg;
  cfg.seed = 1;
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const auto stats = generate_dataset(manifest, cfg, dir / "pack", static_cast<int>(std::min(8u, hw)));
  report("throughput (non-gating)", true,
         fmt::format("{:.1f} episodes/s at {}x{}, {} episodes, {} workers, {} kernels", stats.generated / stats.seconds,
                     cfg.out_size, cfg.out_size, stats.generated, std::min(8u, hw), simd::kernels().name));
}

}  // namespace

int main() {
  criterion("balance_oracle", balance_oracle);
  criterion("partition_identity", partition_identity);
  criterion("parameter_conformance", parameter_conformance);
  criterion("knob_frequencies", knob_frequencies);
  criterion("ignore_label", ignore_label);
  criterion("determinism", determinism);
  criterion("miou_oracle", miou_oracle);
  criterion("round_trips", round_trips);
  criterion("throughput (non-gating)", throughput);
  fmt::print("{} criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

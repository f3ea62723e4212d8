// Copyright 2026 The splitshot Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "splitshot/episode_engine.hpp"
#include "splitshot/episode_pack.hpp"
#include "splitshot/errors.hpp"
#include "test_support.hpp"

using namespace splitshot;
namespace t = splitshot::testing;

namespace {

std::pair<std::uint64_t, std::uint64_t> label_counts(const LabelMap& l) {
  std::uint64_t fg = 0, ign = 0;
  for (auto v : l.values) {
    fg += v == 1;
    ign += v == kIgnoreLabel;
  }
  return {fg, ign};
}

EpisodeConfig plain_config(int size) {
  EpisodeConfig c;
  c.out_size = size;
  c.aug = AugmentationSpec::disabled();
  c.min_image_fg = 1;
  c.split.min_side_pixels = 1;
  return c;
}

}  // namespace

TEST_CASE("ignore label examples and per-pixel oracle") {
  BinaryMask q(4, 1, {1, 1, 0, 0});
  BinaryMask s(4, 1, {0, 0, 1, 1});
  auto l = compute_ignore_label(q, s);
  CHECK(l.values == std::vector<std::uint8_t>{1, 1, 255, 255});
  CHECK(label_counts(compute_ignore_label(q, q)).second == 0);

  std::mt19937_64 gen(1);
  for (int i = 0; i < 10; ++i) {
    const auto a = t::random_mask(64, 64, 0.4, gen);
    const auto b = t::random_mask(64, 64, 0.4, gen);
    const auto lab = compute_ignore_label(a, b);
    for (int y = 0; y < 64; ++y)
      for (int x = 0; x < 64; ++x) {
        const std::uint8_t want = a.at(x, y) ? 1 : (b.at(x, y) ? 255 : 0);
        REQUIRE(lab.values[static_cast<std::size_t>(y) * 64 + x] == want);
      }
  }
  CHECK_THROWS_AS(compute_ignore_label(BinaryMask(2, 2), BinaryMask(3, 2)), Error);
}

TEST_CASE("no split and no augmentation reproduces the saliency mask") {
  std::mt19937_64 gen(2);
  const auto img = t::random_image(48, 48, gen);
  const auto sal = t::disk_mask(48, 48, 24, 24, 12);
  auto cfg = plain_config(48);
  cfg.split.mode = SplitMode::NoSplit;
  RandomStream rng(1);
  const auto ep = make_episode(img, sal, cfg, rng);
  CHECK(ep.support_mask == sal);
  CHECK(ep.support_image == img);
  const auto [fg, ign] = label_counts(ep.query_label);
  CHECK(fg == foreground_count(sal));
  CHECK(ign == 0);
  CHECK_FALSE(ep.meta.applied_split);
}

TEST_CASE("applied split without augmentation labels disjoint halves") {
  std::mt19937_64 gen(3);
  const auto img = t::random_image(64, 64, gen);
  const auto sal = t::disk_mask(64, 64, 30, 34, 20);
  auto cfg = plain_config(64);
  for (int i = 0; i < 30; ++i) {
    RandomStream rng(10 + i);
    const auto ep = make_episode(img, sal, cfg, rng);
    REQUIRE(ep.meta.applied_split);
    const auto [fg, ign] = label_counts(ep.query_label);
    CHECK(ign == foreground_count(ep.support_mask));
    CHECK(ign == ep.meta.support_fg);
    CHECK(fg == ep.meta.query_fg);
    CHECK(fg + ign == foreground_count(sal));
  }
}

TEST_CASE("augmented episodes never mark query foreground as ignore") {
  std::mt19937_64 gen(4);
  const auto img = t::random_image(64, 64, gen);
  const auto sal = t::disk_mask(64, 64, 32, 32, 22);
  EpisodeConfig cfg;
  cfg.out_size = 64;
  cfg.min_image_fg = 1;
  cfg.split.min_side_pixels = 10;
  for (int i = 0; i < 30; ++i) {
    RandomStream rng(100 + i);
    const auto ep = make_episode(img, sal, cfg, rng);
    const auto [fg, ign] = label_counts(ep.query_label);
    CHECK(fg > 0);
    CHECK(foreground_count(ep.support_mask) > 0);
    for (auto v : ep.query_label.values) REQUIRE((v == 0 || v == 1 || v == 255));
  }
}

TEST_CASE("make_episode is replayable and rejects thin saliency") {
  std::mt19937_64 gen(5);
  const auto img = t::random_image(50, 40, gen);
  const auto sal = t::disk_mask(50, 40, 25, 20, 15);
  EpisodeConfig cfg;
  cfg.out_size = 64;
  RandomStream a(7, 3, 1), b(7, 3, 1);
  CHECK(make_episode(img, sal, cfg, a) == make_episode(img, sal, cfg, b));

  RandomStream c(1);
  cfg.min_image_fg = 100000;
  CHECK_THROWS_AS(make_episode(img, sal, cfg, c), Error);
  try {
    make_episode(img, BinaryMask(50, 40), plain_config(64), c);
    FAIL("expected InsufficientForeground");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InsufficientForeground);
  }
  CHECK_THROWS_AS(make_episode(img, BinaryMask(10, 10), plain_config(64), c), Error);
}

TEST_CASE("config json round trip and strictness") {
  EpisodeConfig c;
  c.out_size = 128;
  c.seed = 99;
  c.split.mode = SplitMode::MixedSplit;
  c.split.prob = 0.3;
  c.aug.angle_deg = {-10, 15};
  c.episodes_per_image = 3;
  const auto back = episode_config_from_json(to_json(c));
  CHECK(to_json(back) == to_json(c));
  CHECK(back.split.mode == SplitMode::MixedSplit);
  CHECK(back.aug.angle_deg == Range{-10, 15});
  CHECK_THROWS_AS(episode_config_from_json(nlohmann::json{{"out_sise", 3}}), Error);
  const auto partial = episode_config_from_json(nlohmann::json{{"seed", 5}});
  CHECK(partial.seed == 5);
  CHECK(partial.out_size == 400);
}

TEST_CASE("generate: empty manifest and skipped images") {
  const auto dir = t::fresh_dir("episode_empty");
  DatasetManifest empty;
  const auto stats = generate_dataset(empty, EpisodeConfig{}, dir / "pack", 2);
  CHECK(stats.generated == 0);
  const auto pm = read_pack_manifest(dir / "pack");
  CHECK(pm.episodes.empty());
  CHECK(t::snapshot_tree(dir / "pack").size() == 1);

  t::SyntheticOptions opt;
  opt.images = 3;
  opt.empty_saliency_index = 1;
  const auto mpath = t::write_synthetic_dataset(dir / "data", opt);
  EpisodeConfig cfg;
  cfg.out_size = 96;
  cfg.seed = 3;
  const auto s2 = generate_dataset(load_manifest(mpath), cfg, dir / "pack2", 1);
  CHECK(s2.images == 3);
  CHECK(s2.generated == 2);
  CHECK(s2.skipped_insufficient_fg == 1);
  const auto pm2 = read_pack_manifest(dir / "pack2");
  REQUIRE(pm2.episodes.size() == 2);
  CHECK(pm2.episodes[0].id == "000000");
  CHECK(pm2.episodes[1].id == "000002");
  for (const auto& [name, bytes] : t::snapshot_tree(dir / "pack2")) CHECK(name.rfind("000001", 0) != 0);
  CHECK(verify_pack(dir / "pack2").empty());
}

TEST_CASE("generate: multiple episodes per image and epochs") {
  const auto dir = t::fresh_dir("episode_multi");
  t::SyntheticOptions opt;
  opt.images = 2;
  const auto manifest = load_manifest(t::write_synthetic_dataset(dir / "data", opt));
  EpisodeConfig cfg;
  cfg.out_size = 64;
  cfg.min_image_fg = 50;
  cfg.split.min_side_pixels = 20;
  cfg.episodes_per_image = 2;
  generate_dataset(manifest, cfg, dir / "e0", 1);
  cfg.epoch = 1;
  generate_dataset(manifest, cfg, dir / "e1", 1);
  const auto p0 = read_pack_manifest(dir / "e0");
  const auto p1 = read_pack_manifest(dir / "e1");
  REQUIRE(p0.episodes.size() == 4);
  CHECK(p0.episodes[1].id == "000000_001");
  CHECK(p0.episodes[1].meta.substream == 1);
  CHECK(p1.episodes[1].meta.substream == 3);
  CHECK(p0.episodes[0].files.at("query_label").crc32 != p1.episodes[0].files.at("query_label").crc32);
}

TEST_CASE("generate: worker count does not change the bytes") {
  const auto dir = t::fresh_dir("episode_workers");
  t::SyntheticOptions opt;
  opt.images = 6;
  const auto manifest = load_manifest(t::write_synthetic_dataset(dir / "data", opt));
  EpisodeConfig cfg;
  cfg.out_size = 80;
  cfg.min_image_fg = 50;
  cfg.split.min_side_pixels = 20;
  cfg.seed = 7;
  generate_dataset(manifest, cfg, dir / "w1", 1);
  generate_dataset(manifest, cfg, dir / "w4", 4);
  CHECK(t::snapshot_tree(dir / "w1") == t::snapshot_tree(dir / "w4"));
}

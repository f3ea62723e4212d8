// Copyright 2026 The splitshot Authors
// SPDX-License-Identifier: Apache-2.0
//
// Test-only generators and reference oracles. The oracles here are
// deliberately naive per-pixel loops that share no code with the library's
// kernels.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "splitshot/binary_mask.hpp"
#include "splitshot/dataset_io.hpp"
#include "splitshot/image.hpp"

namespace splitshot::testing {

namespace fs = std::filesystem;

inline BinaryMask random_mask(int w, int h, double density, std::mt19937_64& gen) {
  std::bernoulli_distribution fg(density);
  BinaryMask m(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) m.set(x, y, fg(gen));
  return m;
}

inline BinaryMask disk_mask(int w, int h, double cx, double cy, double r) {
  BinaryMask m(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) m.set(x, y, (x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r);
  return m;
}

inline Image random_image(int w, int h, std::mt19937_64& gen) {
  std::uniform_int_distribution<int> v(0, 255);
  Image img(w, h);
  for (auto& b : img.pixels()) b = static_cast<std::uint8_t>(v(gen));
  return img;
}

inline std::uint64_t naive_count(const BinaryMask& m) {
  std::uint64_t n = 0;
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) n += m.at(x, y) ? 1 : 0;
  return n;
}

/// Exhaustive scan: for every c, count fg with coord < c directly.
inline int brute_balance(const BinaryMask& m, bool vertical) {
  const int extent = vertical ? m.width() : m.height();
  const double half = naive_count(m) / 2.0;
  int best = -1;
  double best_gap = 0;
  for (int c = 0; c <= extent; ++c) {
    std::uint64_t before = 0;
    for (int y = 0; y < m.height(); ++y)
      for (int x = 0; x < m.width(); ++x)
        if (m.at(x, y) && (vertical ? x : y) < c) ++before;
    const double gap = std::abs(static_cast<double>(before) - half);
    if (best < 0 || gap < best_gap) {
      best = c;
      best_gap = gap;
    }
  }
  return best;
}

/// Real-arithmetic boundary test, independent of the library's integer form.
inline bool naive_side_a(bool vertical, int c, int s, int x, int y, int w, int h) {
  const int extent = vertical ? h : w;
  const int along = vertical ? y : x;
  const int coord = vertical ? x : y;
  const double boundary = extent == 1 ? c : c + s - (2.0 * s / (extent - 1)) * along;
  return coord >= boundary - 1e-9;
}

struct NaiveOverlap {
  std::uint64_t inter = 0;
  std::uint64_t uni = 0;
};

inline NaiveOverlap naive_overlap(const BinaryMask& p, const BinaryMask& g, const BinaryMask* ex) {
  NaiveOverlap o;
  for (int y = 0; y < g.height(); ++y)
    for (int x = 0; x < g.width(); ++x) {
      if (ex && ex->at(x, y)) continue;
      if (p.at(x, y) && g.at(x, y)) ++o.inter;
      if (p.at(x, y) || g.at(x, y)) ++o.uni;
    }
  return o;
}

inline fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("splitshot_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct SyntheticOptions {
  int images = 10;
  int width = 96;
  int height = 80;
  int num_classes = 5;
  std::uint64_t seed = 1;
  bool with_gt = true;
  bool saliency_equals_gt = false;
  std::string dataset_name = "pascal";
  /// Index of an image whose saliency mask is left empty (-1 for none).
  int empty_saliency_index = -1;
};

/// Writes images, saliency masks, class rasters and a manifest. Each image
/// holds one ellipse of class (i % num_classes) + 1 and, on odd images, a
/// second rectangle of the next class; the saliency mask covers the
/// ellipse (or every object when saliency_equals_gt).
inline fs::path write_synthetic_dataset(const fs::path& dir, const SyntheticOptions& opt) {
  fs::create_directories(dir);
  std::mt19937_64 gen(opt.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DatasetManifest manifest;
  manifest.dataset_name = opt.dataset_name;
  for (int i = 0; i < opt.images; ++i) {
    const int w = opt.width, h = opt.height;
    Image img(w, h);
    ClassMap classes(w, h);
    std::vector<std::uint8_t> sal(static_cast<std::size_t>(w) * h, 0);
    const int cls = i % opt.num_classes + 1;
    const double cx = w * (0.35 + 0.3 * u(gen)), cy = h * (0.35 + 0.3 * u(gen));
    const double rx = w * (0.18 + 0.1 * u(gen)), ry = h * (0.18 + 0.1 * u(gen));
    const int other = cls % opt.num_classes + 1;
    const bool second = (i % 2) == 1;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::size_t k = static_cast<std::size_t>(y) * w + x;
        const double dx = (x - cx) / rx, dy = (y - cy) / ry;
        const bool in_ellipse = dx * dx + dy * dy <= 1.0;
        const bool in_rect = second && x < w / 5 && y < h / 4;
        img.at(x, y, 0) = static_cast<std::uint8_t>((x * 7 + i * 13) % 200 + 20);
        img.at(x, y, 1) = static_cast<std::uint8_t>((y * 5 + i * 31) % 200 + 20);
        img.at(x, y, 2) = static_cast<std::uint8_t>(((x + y) * 3) % 200 + 20);
        if (in_ellipse) {
          classes.values[k] = static_cast<std::uint8_t>(cls);
          img.at(x, y, 0) = static_cast<std::uint8_t>(40 * cls);
        } else if (in_rect) {
          classes.values[k] = static_cast<std::uint8_t>(other);
        }
        const bool salient = opt.saliency_equals_gt ? (in_ellipse || in_rect) : in_ellipse;
        if (salient && i != opt.empty_saliency_index) sal[k] = 255;
      }
    }
    // A thin border of ignore pixels around the ellipse's bounding box row.
    for (int x = 0; x < w; ++x) {
      auto& v = classes.values[static_cast<std::size_t>(h - 1) * w + x];
      if (v == 0) v = 255;
    }
    ManifestEntry e;
    e.image_id = "img_" + std::to_string(i);
    e.image_path = dir / (e.image_id + ".png");
    e.saliency_path = dir / (e.image_id + "_sal.png");
    write_file(e.image_path, encode_png(img));
    write_file(*e.saliency_path, encode_png_gray(w, h, sal));
    if (opt.with_gt) {
      e.gt_mask_path = dir / (e.image_id + "_gt.png");
      write_file(*e.gt_mask_path, encode_png_gray(w, h, classes.values));
      std::vector<int> ids = {cls};
      if (second && other != cls) ids.push_back(other);
      std::sort(ids.begin(), ids.end());
      e.class_ids = ids;
    }
    manifest.entries.push_back(std::move(e));
  }
  const fs::path path = dir / "manifest.json";
  write_manifest(manifest, path);
  return path;
}

/// Every regular file below `root`, relative path -> bytes.
inline std::map<std::string, std::vector<std::uint8_t>> snapshot_tree(const fs::path& root) {
  std::map<std::string, std::vector<std::uint8_t>> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = read_file(e.path());
  }
  return files;
}

/// Three-sigma binomial acceptance band half-width.
inline double three_sigma(double p, double n) { return 3.0 * std::sqrt(p * (1.0 - p) / n); }

}  // namespace splitshot::testing

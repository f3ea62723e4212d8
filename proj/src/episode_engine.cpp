// Copyright 2026 The splitshot Authors
// SPDX-License-Identifier: Apache-2.0

#include "splitshot/episode_engine.hpp"

#include <fmt/format.h>

#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "splitshot/episode_pack.hpp"
#include "splitshot/errors.hpp"
#include "splitshot/simd/kernels.hpp"

namespace splitshot {

using nlohmann::json;

namespace {

[[noreturn]] void config_fail(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::ParseError, fmt::format("config {}: {}", where, what));
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) config_fail(where, "expected an object");
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) config_fail(where, fmt::format("unknown key '{}'", key));
  }
}

template <class T>
void read_field(const json& j, const char* key, T& out, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception& e) {
    config_fail(where + "." + key, e.what());
  }
}

void read_range(const json& j, const char* key, Range& out, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) return;
  if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number() || !(*it)[1].is_number()) {
    config_fail(where + "." + key, "expected [lo, hi]");
  }
  out = {(*it)[0].get<double>(), (*it)[1].get<double>()};
}

json range_json(const Range& r) { return json::array({r.lo, r.hi}); }

json geometric_json(const GeometricParams& g) {
  return {{"hflip", g.hflip}, {"vflip", g.vflip}, {"angle_deg", g.angle_deg}, {"scale", g.scale}};
}

json photometric_json(const PhotometricParams& p) {
  return {{"grayscale", p.to_grayscale}, {"brightness", p.brightness}, {"contrast", p.contrast},
          {"saturation", p.saturation}, {"hue_shift", p.hue_shift}};
}

GeometricParams geometric_from(const json& j) {
  return {j.at("hflip").get<bool>(), j.at("vflip").get<bool>(), j.at("angle_deg").get<double>(),
          j.at("scale").get<double>()};
}

PhotometricParams photometric_from(const json& j) {
  return {j.at("grayscale").get<bool>(), j.at("brightness").get<double>(),
          j.at("contrast").get<double>(), j.at("saturation").get<double>(),
          j.at("hue_shift").get<double>()};
}

std::uint32_t substream_for(const EpisodeConfig& config, int k) {
  return static_cast<std::uint32_t>(config.epoch * config.episodes_per_image + k);
}

std::string episode_id(std::size_t entry_index, int k, int per_image) {
  if (per_image == 1) return fmt::format("{:06d}", entry_index);
  return fmt::format("{:06d}_{:03d}", entry_index, k);
}

}  // namespace

void EpisodeConfig::validate() const {
  if (out_size <= 0) throw Error(ErrorKind::InvalidArgument, "out_size must be positive");
  if (min_image_fg < 0) throw Error(ErrorKind::InvalidArgument, "min_image_fg must be >= 0");
  if (episodes_per_image < 1) throw Error(ErrorKind::InvalidArgument, "episodes_per_image must be >= 1");
  if (epoch < 0) throw Error(ErrorKind::InvalidArgument, "epoch must be >= 0");
  if (max_view_attempts < 1) throw Error(ErrorKind::InvalidArgument, "max_view_attempts must be >= 1");
  split.validate();
  aug.validate();
}

json to_json(const EpisodeConfig& c) {
  return {
      {"out_size", c.out_size},
      {"seed", c.seed},
      {"min_image_fg", c.min_image_fg},
      {"episodes_per_image", c.episodes_per_image},
      {"epoch", c.epoch},
      {"saliency_threshold", c.saliency_threshold},
      {"max_view_attempts", c.max_view_attempts},
      {"split",
       {{"mode", std::string(to_string(c.split.mode))},
        {"slope_range", c.split.slope_range},
        {"slope_enabled", c.split.slope_enabled},
        {"alternate", c.split.alternate},
        {"prob", c.split.prob},
        {"min_side_pixels", c.split.min_side_pixels},
        {"max_resample", c.split.max_resample}}},
      {"aug",
       {{"enabled", c.aug.enabled},
        {"hflip_prob", c.aug.hflip_prob},
        {"vflip_prob", c.aug.vflip_prob},
        {"angle_deg", range_json(c.aug.angle_deg)},
        {"scale", range_json(c.aug.scale)},
        {"jitter_prob", c.aug.jitter_prob},
        {"brightness", range_json(c.aug.brightness)},
        {"contrast", range_json(c.aug.contrast)},
        {"saturation", range_json(c.aug.saturation)},
        {"hue", range_json(c.aug.hue)},
        {"grayscale_prob", c.aug.grayscale_prob}}},
  };
}

EpisodeConfig episode_config_from_json(const json& j, EpisodeConfig c) {
  check_keys(j, {"out_size", "seed", "min_image_fg", "episodes_per_image", "epoch",
                 "saliency_threshold", "max_view_attempts", "split", "aug"},
             "root");
  read_field(j, "out_size", c.out_size, "root");
  read_field(j, "seed", c.seed, "root");
  read_field(j, "min_image_fg", c.min_image_fg, "root");
  read_field(j, "episodes_per_image", c.episodes_per_image, "root");
  read_field(j, "epoch", c.epoch, "root");
  read_field(j, "saliency_threshold", c.saliency_threshold, "root");
  read_field(j, "max_view_attempts", c.max_view_attempts, "root");
  if (auto it = j.find("split"); it != j.end()) {
    const json& s = *it;
    check_keys(s, {"mode", "slope_range", "slope_enabled", "alternate", "prob", "min_side_pixels",
                   "max_resample"},
               "split");
    if (auto m = s.find("mode"); m != s.end()) {
      const auto mode = m->is_string() ? parse_split_mode(m->get<std::string>()) : std::nullopt;
      if (!mode) config_fail("split.mode", "expected vsplit, hsplit, mixed or none");
      c.split.mode = *mode;
    }
    read_field(s, "slope_range", c.split.slope_range, "split");
    read_field(s, "slope_enabled", c.split.slope_enabled, "split");
    read_field(s, "alternate", c.split.alternate, "split");
    read_field(s, "prob", c.split.prob, "split");
    read_field(s, "min_side_pixels", c.split.min_side_pixels, "split");
    read_field(s, "max_resample", c.split.max_resample, "split");
  }
  if (auto it = j.find("aug"); it != j.end()) {
    const json& a = *it;
    check_keys(a, {"enabled", "hflip_prob", "vflip_prob", "angle_deg", "scale", "jitter_prob",
                   "brightness", "contrast", "saturation", "hue", "grayscale_prob"},
               "aug");
    read_field(a, "enabled", c.aug.enabled, "aug");
    read_field(a, "hflip_prob", c.aug.hflip_prob, "aug");
    read_field(a, "vflip_prob", c.aug.vflip_prob, "aug");
    read_range(a, "angle_deg", c.aug.angle_deg, "aug");
    read_range(a, "scale", c.aug.scale, "aug");
    read_field(a, "jitter_prob", c.aug.jitter_prob, "aug");
    read_range(a, "brightness", c.aug.brightness, "aug");
    read_range(a, "contrast", c.aug.contrast, "aug");
    read_range(a, "saturation", c.aug.saturation, "aug");
    read_range(a, "hue", c.aug.hue, "aug");
    read_field(a, "grayscale_prob", c.aug.grayscale_prob, "aug");
  }
  return c;
}

json to_json(const EpisodeMeta& m) {
  json line = nullptr;
  if (m.line) {
    line = {{"axis", std::string(to_string(m.line->axis))},
            {"balance", m.line->balance},
            {"shift", m.line->shift}};
  }
  return {
      {"source_image", m.source_image},
      {"class_id", m.class_id ? json(*m.class_id) : json(nullptr)},
      {"applied_split", m.applied_split},
      {"fell_back", m.fell_back},
      {"swapped", m.swapped},
      {"line", line},
      {"saliency_fg", m.saliency_fg},
      {"support_fg", m.support_fg},
      {"query_fg", m.query_fg},
      {"seed", m.seed},
      {"stream_id", m.stream_id},
      {"substream", m.substream},
      {"support_view", {{"geometric", geometric_json(m.support_geometric)},
                        {"photometric", photometric_json(m.support_photometric)}}},
      {"query_view", {{"geometric", geometric_json(m.query_geometric)},
                      {"photometric", photometric_json(m.query_photometric)}}},
  };
}

EpisodeMeta episode_meta_from_json(const json& j) {
  try {
    EpisodeMeta m;
    m.source_image = j.at("source_image").get<std::string>();
    if (!j.at("class_id").is_null()) m.class_id = j.at("class_id").get<int>();
    m.applied_split = j.at("applied_split").get<bool>();
    m.fell_back = j.at("fell_back").get<bool>();
    m.swapped = j.at("swapped").get<bool>();
    if (const json& l = j.at("line"); !l.is_null()) {
      const std::string axis = l.at("axis").get<std::string>();
      if (axis != "vertical" && axis != "horizontal") config_fail("meta.line.axis", axis);
      m.line = SplitLine{axis == "vertical" ? Axis::Vertical : Axis::Horizontal,
                         l.at("balance").get<int>(), l.at("shift").get<int>()};
    }
    m.saliency_fg = j.at("saliency_fg").get<std::uint64_t>();
    m.support_fg = j.at("support_fg").get<std::uint64_t>();
    m.query_fg = j.at("query_fg").get<std::uint64_t>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.stream_id = j.at("stream_id").get<std::uint64_t>();
    m.substream = j.at("substream").get<std::uint32_t>();
    m.support_geometric = geometric_from(j.at("support_view").at("geometric"));
    m.support_photometric = photometric_from(j.at("support_view").at("photometric"));
    m.query_geometric = geometric_from(j.at("query_view").at("geometric"));
    m.query_photometric = photometric_from(j.at("query_view").at("photometric"));
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, fmt::format("episode meta: {}", e.what()));
  }
}

LabelMap compute_ignore_label(const BinaryMask& query_fg, const BinaryMask& support_fg) {
  if (!query_fg.same_shape(support_fg)) {
    throw Error(ErrorKind::DimensionMismatch,
                fmt::format("query {}x{} vs support {}x{}", query_fg.width(), query_fg.height(),
                            support_fg.width(), support_fg.height()));
  }
  LabelMap label(query_fg.width(), query_fg.height());
  simd::kernels().ignore_label(query_fg.data().data(), support_fg.data().data(),
                               label.values.data(), label.values.size());
  return label;
}

Episode make_episode(const Image& image, const BinaryMask& saliency, const EpisodeConfig& config,
                     RandomStream& rng) {
  config.validate();
  if (image.width() != saliency.width() || image.height() != saliency.height()) {
    throw Error(ErrorKind::DimensionMismatch,
                fmt::format("image {}x{} vs saliency {}x{}", image.width(), image.height(),
                            saliency.width(), saliency.height()));
  }
  const int size = config.out_size;
  const Image resized = resize_bilinear(image, size, size);
  const BinaryMask mask = resize_nearest(saliency, size, size);
  const std::uint64_t fg = foreground_count(mask);
  if (fg == 0 || fg < static_cast<std::uint64_t>(config.min_image_fg)) {
    throw Error(ErrorKind::InsufficientForeground,
                fmt::format("resized saliency has {} foreground pixels, need {}", fg,
                            std::max(1, config.min_image_fg)));
  }

  SplitOutcome outcome = apply_split(mask, config.split, rng);

  Episode ep;
  ep.meta.applied_split = outcome.applied;
  ep.meta.fell_back = outcome.fell_back;
  ep.meta.swapped = outcome.swapped;
  ep.meta.line = outcome.line;
  ep.meta.saliency_fg = fg;
  ep.meta.support_fg = foreground_count(outcome.support_fg);
  ep.meta.query_fg = foreground_count(outcome.query_fg);
  ep.meta.seed = rng.seed();
  ep.meta.stream_id = rng.stream_id();
  ep.meta.substream = rng.substream();

  // Each view is redrawn (continuing the same stream) while its target
  // foreground is pushed entirely off the canvas.
  const BinaryMask support_only[] = {outcome.support_fg};
  std::optional<AugmentedView> support_view;
  for (int attempt = 0; attempt < config.max_view_attempts; ++attempt) {
    AugmentedView v = augment_view(resized, support_only, config.aug, rng, size);
    if (foreground_count(v.masks[0]) > 0) {
      support_view = std::move(v);
      break;
    }
  }
  const BinaryMask both[] = {outcome.query_fg, outcome.support_fg};
  std::optional<AugmentedView> query_view;
  for (int attempt = 0; support_view && attempt < config.max_view_attempts; ++attempt) {
    AugmentedView v = augment_view(resized, both, config.aug, rng, size);
    if (foreground_count(v.masks[0]) > 0) {
      query_view = std::move(v);
      break;
    }
  }
  if (!support_view || !query_view) {
    throw Error(ErrorKind::EmptyView,
                fmt::format("{} foreground left the canvas in {} augmentation draws",
                            support_view ? "query" : "support", config.max_view_attempts));
  }

  ep.support_image = std::move(support_view->image);
  ep.support_mask = std::move(support_view->masks[0]);
  ep.meta.support_geometric = support_view->params.geometric;
  ep.meta.support_photometric = support_view->params.photometric;
  ep.query_image = std::move(query_view->image);
  ep.query_label = compute_ignore_label(query_view->masks[0], query_view->masks[1]);
  ep.meta.query_geometric = query_view->params.geometric;
  ep.meta.query_photometric = query_view->params.photometric;
  return ep;
}

json GenerationStats::to_json() const {
  return {{"images", images},
          {"generated", generated},
          {"skipped_insufficient_fg", skipped_insufficient_fg},
          {"skipped_empty_view", skipped_empty_view},
          {"fallback_no_split", fallback_no_split},
          {"applied_split", applied_split},
          {"seconds", seconds},
          {"episodes_per_second", seconds > 0.0 ? static_cast<double>(generated) / seconds : 0.0}};
}

GenerationStats generate_dataset(const DatasetManifest& manifest, const EpisodeConfig& config,
                                 const fs::path& out_dir, int workers) {
  config.validate();
  if (workers < 1) throw Error(ErrorKind::InvalidArgument, "workers must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorKind::IoError, fmt::format("cannot create {}: {}", out_dir.string(), ec.message()));

  struct Slot {
    std::vector<EpisodeRecord> records;
    std::uint64_t skipped_fg = 0;
    std::uint64_t skipped_view = 0;
    std::uint64_t fallback = 0;
    std::uint64_t applied = 0;
    std::exception_ptr error;
  };
  const std::size_t n = manifest.entries.size();
  std::vector<Slot> slots(n);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};

  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || failed.load()) return;
      Slot& slot = slots[i];
      const ManifestEntry& entry = manifest.entries[i];
      try {
        if (!entry.saliency_path) {
          throw Error(ErrorKind::MissingSaliency, fmt::format("image '{}' has no saliency_path", entry.image_id));
        }
        const Image image = read_image(entry.image_path);
        BinaryMask saliency;
        try {
          saliency = read_mask(*entry.saliency_path, config.saliency_threshold);
        } catch (const Error& e) {
          throw Error(e.kind(), fmt::format("image '{}': {}", entry.image_id, e.what()));
        }
        for (int k = 0; k < config.episodes_per_image; ++k) {
          RandomStream rng = RandomStream::for_item(config.seed, entry.image_id, substream_for(config, k));
          Episode ep;
          try {
            ep = make_episode(image, saliency, config, rng);
          } catch (const Error& e) {
            // Too little saliency is a per-image property; view failures are per draw.
            if (e.kind() == ErrorKind::InsufficientForeground) {
              ++slot.skipped_fg;
              break;
            }
            if (e.kind() == ErrorKind::EmptyView) {
              ++slot.skipped_view;
              continue;
            }
            throw Error(e.kind(), fmt::format("image '{}': {}", entry.image_id, e.what()));
          }
          ep.id = episode_id(i, k, config.episodes_per_image);
          ep.meta.source_image = entry.image_id;
          if (entry.class_ids && entry.class_ids->size() == 1) ep.meta.class_id = entry.class_ids->front();
          slot.fallback += ep.meta.fell_back ? 1 : 0;
          slot.applied += ep.meta.applied_split ? 1 : 0;
          slot.records.push_back(write_episode(out_dir, ep));
        }
      } catch (...) {
        slot.error = std::current_exception();
        failed.store(true);
      }
    }
  };

  const int threads = static_cast<int>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  for (const Slot& slot : slots) {
    if (slot.error) std::rethrow_exception(slot.error);
  }

  PackManifest pack;
  pack.out_size = config.out_size;
  pack.config = to_json(config);
  GenerationStats stats;
  stats.images = n;
  for (Slot& slot : slots) {
    stats.generated += slot.records.size();
    stats.skipped_insufficient_fg += slot.skipped_fg;
    stats.skipped_empty_view += slot.skipped_view;
    stats.fallback_no_split += slot.fallback;
    stats.applied_split += slot.applied;
    for (auto& r : slot.records) pack.episodes.push_back(std::move(r));
  }
  write_pack_manifest(out_dir, pack);
  stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return stats;
}

}  // namespace splitshot

// Copyright 2026 The splitshot Authors
// SPDX-License-Identifier: Apache-2.0

#include "splitshot/episode_pack.hpp"

#include <fmt/format.h>

#include <fstream>

#include "splitshot/dataset_io.hpp"

namespace splitshot {

using nlohmann::json;

namespace {

const char* const kFileKeys[] = {"support", "support_mask", "query", "query_label"};

PackFile put(const fs::path& dir, const std::string& name, const std::vector<std::uint8_t>& bytes) {
  write_file(dir / name, bytes);
  return {name, crc32_of(bytes)};
}

std::vector<std::uint8_t> fetch(const fs::path& dir, const EpisodeRecord& record, const char* key) {
  auto it = record.files.find(key);
  if (it == record.files.end()) {
    throw Error(ErrorKind::ValidationError, fmt::format("episode {} lists no '{}' file", record.id, key));
  }
  const fs::path path = dir / it->second.path;
  if (!fs::exists(path)) throw Error(ErrorKind::MissingFile, path.string());
  auto bytes = read_file(path);
  const std::uint32_t crc = crc32_of(bytes);
  if (crc != it->second.crc32) {
    throw Error(ErrorKind::ChecksumMismatch,
                fmt::format("{}: crc32 {:08x}, manifest says {:08x}", path.string(), crc, it->second.crc32));
  }
  return bytes;
}

void check_size(int w, int h, int expect_w, int expect_h, const std::string& name) {
  if (w != expect_w || h != expect_h) {
    throw Error(ErrorKind::ValidationError,
                fmt::format("{}: {}x{}, expected {}x{}", name, w, h, expect_w, expect_h));
  }
}

json record_json(const EpisodeRecord& r) {
  json files = json::object();
  for (const auto& [key, f] : r.files) files[key] = {{"path", f.path}, {"crc32", f.crc32}};
  return {{"id", r.id},
          {"files", files},
          {"source_image", r.source_image},
          {"applied_split", r.applied_split},
          {"class_id", r.class_id ? json(*r.class_id) : json(nullptr)},
          {"meta", to_json(r.meta)}};
}

EpisodeRecord record_from(const json& j) {
  EpisodeRecord r;
  r.id = j.at("id").get<std::string>();
  for (const auto& [key, f] : j.at("files").items()) {
    r.files[key] = {f.at("path").get<std::string>(), f.at("crc32").get<std::uint32_t>()};
  }
  r.source_image = j.at("source_image").get<std::string>();
  r.applied_split = j.at("applied_split").get<bool>();
  if (!j.at("class_id").is_null()) r.class_id = j.at("class_id").get<int>();
  r.meta = episode_meta_from_json(j.at("meta"));
  return r;
}

}  // namespace

EpisodeRecord write_episode(const fs::path& dir, const Episode& ep) {
  fs::create_directories(dir);
  EpisodeRecord r;
  r.id = ep.id;
  r.source_image = ep.meta.source_image;
  r.applied_split = ep.meta.applied_split;
  r.class_id = ep.meta.class_id;
  r.meta = ep.meta;
  r.files["support"] = put(dir, ep.id + "_support.png", encode_png(ep.support_image));
  r.files["support_mask"] =
      put(dir, ep.id + "_support_mask.png",
          encode_png_gray(ep.support_mask.width(), ep.support_mask.height(), ep.support_mask.data()));
  r.files["query"] = put(dir, ep.id + "_query.png", encode_png(ep.query_image));
  r.files["query_label"] =
      put(dir, ep.id + "_query_label.png",
          encode_png_gray(ep.query_label.width, ep.query_label.height, ep.query_label.values));
  return r;
}

Episode read_episode(const fs::path& dir, const EpisodeRecord& record) {
  Episode ep;
  ep.id = record.id;
  ep.meta = record.meta;

  const std::string support_name = (dir / record.files.at("support").path).string();
  ep.support_image = decode_rgb(fetch(dir, record, "support"), support_name);
  const int w = ep.support_image.width();
  const int h = ep.support_image.height();

  const std::string mask_name = (dir / record.files.at("support_mask").path).string();
  int mw = 0, mh = 0;
  auto mask_values = decode_gray(fetch(dir, record, "support_mask"), mask_name, mw, mh);
  check_size(mw, mh, w, h, mask_name);
  for (auto v : mask_values) {
    if (v > 1) throw Error(ErrorKind::ValidationError, fmt::format("{}: mask value {} outside {{0,1}}", mask_name, v));
  }
  ep.support_mask = BinaryMask(mw, mh, std::move(mask_values));

  const std::string query_name = (dir / record.files.at("query").path).string();
  ep.query_image = decode_rgb(fetch(dir, record, "query"), query_name);
  check_size(ep.query_image.width(), ep.query_image.height(), w, h, query_name);

  const std::string label_name = (dir / record.files.at("query_label").path).string();
  int lw = 0, lh = 0;
  auto label_values = decode_gray(fetch(dir, record, "query_label"), label_name, lw, lh);
  check_size(lw, lh, w, h, label_name);
  for (auto v : label_values) {
    if (v != 0 && v != 1 && v != kIgnoreLabel) {
      throw Error(ErrorKind::ValidationError,
                  fmt::format("{}: label value {} outside {{0,1,255}}", label_name, v));
    }
  }
  ep.query_label = LabelMap(lw, lh, std::move(label_values));
  return ep;
}

void write_pack_manifest(const fs::path& dir, const PackManifest& m) {
  json episodes = json::array();
  for (const auto& r : m.episodes) episodes.push_back(record_json(r));
  const json doc = {{"version", m.version},
                    {"out_size", m.out_size},
                    {"config", m.config},
                    {"episodes", std::move(episodes)}};
  const std::string text = doc.dump(2) + "\n";
  write_file(dir / kPackManifestName,
             std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

PackManifest read_pack_manifest(const fs::path& dir) {
  const fs::path path = dir / kPackManifestName;
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::MissingFile, path.string());
  try {
    const json doc = json::parse(in);
    PackManifest m;
    m.version = doc.at("version").get<int>();
    if (m.version != 1) {
      throw Error(ErrorKind::UnsupportedFormat, fmt::format("{}: pack version {}", path.string(), m.version));
    }
    m.out_size = doc.at("out_size").get<int>();
    m.config = doc.at("config");
    for (const auto& e : doc.at("episodes")) m.episodes.push_back(record_from(e));
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::vector<Violation> verify_pack(const fs::path& dir) {
  std::vector<Violation> out;
  PackManifest manifest;
  try {
    manifest = read_pack_manifest(dir);
  } catch (const Error& e) {
    out.push_back({"", e.kind(), e.what()});
    return out;
  }
  int min_side = 0;
  if (auto s = manifest.config.find("split"); s != manifest.config.end()) {
    min_side = s->value("min_side_pixels", 0);
  }

  for (const auto& rec : manifest.episodes) {
    auto flag = [&](ErrorKind kind, const std::string& msg) { out.push_back({rec.id, kind, msg}); };
    for (const char* key : kFileKeys) {
      if (!rec.files.count(key)) flag(ErrorKind::ValidationError, fmt::format("missing '{}' file entry", key));
    }
    if (rec.files.size() != std::size(kFileKeys)) continue;

    Episode ep;
    try {
      ep = read_episode(dir, rec);
    } catch (const Error& e) {
      flag(e.kind(), e.what());
      continue;
    }
    if (ep.support_image.width() != manifest.out_size || ep.support_image.height() != manifest.out_size) {
      flag(ErrorKind::ValidationError, fmt::format("episode is {}x{}, pack out_size {}", ep.support_image.width(),
                                                   ep.support_image.height(), manifest.out_size));
    }
    if (foreground_count(ep.support_mask) == 0) flag(ErrorKind::ValidationError, "support mask is empty");
    std::uint64_t query_fg = 0;
    for (auto v : ep.query_label.values) query_fg += v == 1;
    if (query_fg == 0) flag(ErrorKind::ValidationError, "query label has no foreground");

    const EpisodeMeta& m = rec.meta;
    if (rec.applied_split != m.applied_split) flag(ErrorKind::ValidationError, "applied_split disagrees with meta");
    if (m.applied_split) {
      if (!m.line) flag(ErrorKind::ValidationError, "applied split without a recorded line");
      if (m.support_fg + m.query_fg != m.saliency_fg) {
        flag(ErrorKind::ValidationError,
             fmt::format("split halves {} + {} do not partition saliency foreground {}", m.support_fg,
                         m.query_fg, m.saliency_fg));
      }
      if (std::min(m.support_fg, m.query_fg) < static_cast<std::uint64_t>(min_side)) {
        flag(ErrorKind::ValidationError,
             fmt::format("split side below min_side_pixels {} ({} / {})", min_side, m.support_fg, m.query_fg));
      }
    } else if (m.support_fg != m.saliency_fg || m.query_fg != m.saliency_fg) {
      flag(ErrorKind::ValidationError, "no-split episode whose foregrounds differ from the saliency mask");
    }
  }
  return out;
}

}  // namespace splitshot

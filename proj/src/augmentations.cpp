// Copyright 2026 The splitshot Authors
// SPDX-License-Identifier: Apache-2.0

#include "splitshot/augmentations.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "splitshot/errors.hpp"
#include "splitshot/simd/kernels.hpp"

namespace splitshot {

namespace {

void check_prob(double p, const char* field) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, fmt::format("{} = {} outside [0, 1]", field, p));
  }
}

void check_range(const Range& r, const char* field, bool positive) {
  if (!(r.lo <= r.hi) || (positive && r.lo <= 0.0)) {
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("{} range [{}, {}] is invalid", field, r.lo, r.hi));
  }
}

double draw(const Range& r, RandomStream& rng) { return rng.uniform_real(r.lo, r.hi); }

// cos/sin of multiples of 90 degrees should be exact so right-angle rotations
// are pure pixel permutations.
double snap(double v) {
  for (double target : {-1.0, 0.0, 1.0}) {
    if (std::abs(v - target) < 1e-12) return target;
  }
  return v;
}

std::uint8_t to_u8(double v) {
  return static_cast<std::uint8_t>(std::nearbyint(std::clamp(v, 0.0, 255.0)));
}

// Maps output-canvas pixels back to source coordinates for the
// scale -> rotate -> hflip -> vflip -> crop/pad chain.
class InverseMap {
 public:
  InverseMap(int src_w, int src_h, const GeometricParams& p, int out_size)
      : src_w_(src_w), src_h_(src_h), hflip_(p.hflip), vflip_(p.vflip) {
    if (!(p.scale > 0.0)) throw Error(ErrorKind::InvalidArgument, "scale must be positive");
    if (out_size <= 0) throw Error(ErrorKind::InvalidArgument, "out_size must be positive");
    canvas_w_ = std::max(1, static_cast<int>(std::lround(src_w * p.scale)));
    canvas_h_ = std::max(1, static_cast<int>(std::lround(src_h * p.scale)));
    off_x_ = floor_half(out_size - canvas_w_);
    off_y_ = floor_half(out_size - canvas_h_);
    const double rad = p.angle_deg * std::numbers::pi / 180.0;
    cos_ = snap(std::cos(rad));
    sin_ = snap(std::sin(rad));
    cx_ = (canvas_w_ - 1) / 2.0;
    cy_ = (canvas_h_ - 1) / 2.0;
    sx_ = static_cast<double>(canvas_w_) / src_w;
    sy_ = static_cast<double>(canvas_h_) / src_h;
  }

  /// False when (u, v) falls in padding; otherwise source coordinates.
  bool map(int u, int v, double& x, double& y) const {
    int px = u - off_x_;
    int py = v - off_y_;
    if (px < 0 || py < 0 || px >= canvas_w_ || py >= canvas_h_) return false;
    if (vflip_) py = canvas_h_ - 1 - py;
    if (hflip_) px = canvas_w_ - 1 - px;
    const double dx = px - cx_;
    const double dy = py - cy_;
    const double qx = cx_ + cos_ * dx - sin_ * dy;
    const double qy = cy_ + sin_ * dx + cos_ * dy;
    x = (qx + 0.5) / sx_ - 0.5;
    y = (qy + 0.5) / sy_ - 0.5;
    return x >= -0.5 && y >= -0.5 && x <= src_w_ - 0.5 && y <= src_h_ - 0.5;
  }

 private:
  static int floor_half(int v) { return v >= 0 ? v / 2 : -((-v + 1) / 2); }

  int src_w_, src_h_;
  bool hflip_, vflip_;
  int canvas_w_ = 0, canvas_h_ = 0;
  int off_x_ = 0, off_y_ = 0;
  double cos_ = 1.0, sin_ = 0.0;
  double cx_ = 0.0, cy_ = 0.0;
  double sx_ = 1.0, sy_ = 1.0;
};

void sample_bilinear(const Image& src, double x, double y, std::uint8_t* out) {
  const int w = src.width();
  const int h = src.height();
  const double fx0 = std::floor(x);
  const double fy0 = std::floor(y);
  const double ax = x - fx0;
  const double ay = y - fy0;
  const int x0 = std::clamp(static_cast<int>(fx0), 0, w - 1);
  const int y0 = std::clamp(static_cast<int>(fy0), 0, h - 1);
  const int x1 = std::clamp(static_cast<int>(fx0) + 1, 0, w - 1);
  const int y1 = std::clamp(static_cast<int>(fy0) + 1, 0, h - 1);
  for (int c = 0; c < Image::kChannels; ++c) {
    const double top = (1.0 - ax) * src.at(x0, y0, c) + ax * src.at(x1, y0, c);
    const double bottom = (1.0 - ax) * src.at(x0, y1, c) + ax * src.at(x1, y1, c);
    out[c] = to_u8((1.0 - ay) * top + ay * bottom);
  }
}

std::uint8_t gray_of(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  return static_cast<std::uint8_t>((299u * r + 587u * g + 114u * b + 500u) / 1000u);
}

void rgb_to_hsv(double r, double g, double b, double& h, double& s, double& v) {
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double delta = mx - mn;
  v = mx;
  s = mx > 0.0 ? delta / mx : 0.0;
  if (delta == 0.0) {
    h = 0.0;
  } else if (mx == r) {
    h = std::fmod((g - b) / delta + 6.0, 6.0) / 6.0;
  } else if (mx == g) {
    h = ((b - r) / delta + 2.0) / 6.0;
  } else {
    h = ((r - g) / delta + 4.0) / 6.0;
  }
}

void hsv_to_rgb(double h, double s, double v, double& r, double& g, double& b) {
  const double h6 = h * 6.0;
  const double sector = std::floor(h6);
  const double f = h6 - sector;
  const double p = v * (1.0 - s);
  const double q = v * (1.0 - s * f);
  const double t = v * (1.0 - s * (1.0 - f));
  switch (static_cast<int>(sector) % 6) {
    case 0: r = v; g = t; b = p; break;
    case 1: r = q; g = v; b = p; break;
    case 2: r = p; g = v; b = t; break;
    case 3: r = p; g = q; b = v; break;
    case 4: r = t; g = p; b = v; break;
    default: r = v; g = p; b = q; break;
  }
}

}  // namespace

void AugmentationSpec::validate() const {
  check_prob(hflip_prob, "hflip_prob");
  check_prob(vflip_prob, "vflip_prob");
  check_prob(jitter_prob, "jitter_prob");
  check_prob(grayscale_prob, "grayscale_prob");
  check_range(angle_deg, "angle_deg", false);
  check_range(scale, "scale", true);
  check_range(brightness, "brightness", true);
  check_range(contrast, "contrast", true);
  check_range(saturation, "saturation", true);
  check_range(hue, "hue", false);
  if (hue.lo < -0.5 || hue.hi > 0.5) {
    throw Error(ErrorKind::InvalidArgument, "hue range must lie within [-0.5, 0.5]");
  }
}

AugmentationParams sample_augmentation(const AugmentationSpec& spec, RandomStream& rng) {
  AugmentationParams p;
  if (!spec.enabled) return p;
  spec.validate();
  p.geometric.hflip = rng.bernoulli(spec.hflip_prob);
  p.geometric.vflip = rng.bernoulli(spec.vflip_prob);
  p.geometric.angle_deg = draw(spec.angle_deg, rng);
  p.geometric.scale = draw(spec.scale, rng);
  if (rng.bernoulli(spec.jitter_prob)) {
    p.photometric.brightness = draw(spec.brightness, rng);
    p.photometric.contrast = draw(spec.contrast, rng);
    p.photometric.saturation = draw(spec.saturation, rng);
    p.photometric.hue_shift = draw(spec.hue, rng);
  }
  p.photometric.to_grayscale = rng.bernoulli(spec.grayscale_prob);
  return p;
}

Image resize_bilinear(const Image& image, int width, int height) {
  if (image.width() == width && image.height() == height) return image;
  Image out(width, height);
  const double rx = static_cast<double>(image.width()) / width;
  const double ry = static_cast<double>(image.height()) / height;
  std::uint8_t px[Image::kChannels];
  for (int v = 0; v < height; ++v) {
    const double y = std::clamp((v + 0.5) * ry - 0.5, 0.0, image.height() - 1.0);
    for (int u = 0; u < width; ++u) {
      const double x = std::clamp((u + 0.5) * rx - 0.5, 0.0, image.width() - 1.0);
      sample_bilinear(image, x, y, px);
      for (int c = 0; c < Image::kChannels; ++c) out.at(u, v, c) = px[c];
    }
  }
  return out;
}

BinaryMask resize_nearest(const BinaryMask& mask, int width, int height) {
  if (mask.width() == width && mask.height() == height) return mask;
  BinaryMask out(width, height);
  std::vector<int> src_x(width);
  for (int u = 0; u < width; ++u) {
    src_x[u] = std::min(mask.width() - 1,
                        static_cast<int>(std::floor((u + 0.5) * mask.width() / width)));
  }
  for (int v = 0; v < height; ++v) {
    const int y = std::min(mask.height() - 1,
                           static_cast<int>(std::floor((v + 0.5) * mask.height() / height)));
    const std::uint8_t* src = mask.row(y);
    std::uint8_t* dst = out.row(v);
    for (int u = 0; u < width; ++u) dst[u] = src[src_x[u]];
  }
  return out;
}

Image apply_geometric(const Image& image, const GeometricParams& params, int out_size) {
  const InverseMap inverse(image.width(), image.height(), params, out_size);
  Image out(out_size, out_size);
  std::uint8_t px[Image::kChannels];
  for (int v = 0; v < out_size; ++v) {
    for (int u = 0; u < out_size; ++u) {
      double x, y;
      if (!inverse.map(u, v, x, y)) continue;
      sample_bilinear(image, x, y, px);
      for (int c = 0; c < Image::kChannels; ++c) out.at(u, v, c) = px[c];
    }
  }
  return out;
}

BinaryMask apply_geometric_mask(const BinaryMask& mask, const GeometricParams& params,
                                int out_size) {
  const InverseMap inverse(mask.width(), mask.height(), params, out_size);
  BinaryMask out(out_size, out_size);
  for (int v = 0; v < out_size; ++v) {
    std::uint8_t* dst = out.row(v);
    for (int u = 0; u < out_size; ++u) {
      double x, y;
      if (!inverse.map(u, v, x, y)) continue;
      const int xi = static_cast<int>(std::floor(x + 0.5));
      const int yi = static_cast<int>(std::floor(y + 0.5));
      if (xi < 0 || yi < 0 || xi >= mask.width() || yi >= mask.height()) continue;
      dst[u] = mask.row(yi)[xi];
    }
  }
  return out;
}

Image apply_photometric(const Image& image, const PhotometricParams& params) {
  if (!(params.brightness > 0.0 && params.contrast > 0.0 && params.saturation > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "photometric factors must be positive");
  }
  Image out = image;
  auto px = out.pixels();
  const std::size_t n_pixels = static_cast<std::size_t>(out.width()) * out.height();
  const auto& k = simd::kernels();

  if (params.brightness != 1.0) {
    k.affine(px.data(), static_cast<float>(params.brightness), 0.0f, px.data(), px.size());
  }
  if (params.contrast != 1.0) {
    std::uint64_t weighted = 0;
    for (std::size_t i = 0; i < n_pixels; ++i) {
      weighted += 299u * px[3 * i] + 587u * px[3 * i + 1] + 114u * px[3 * i + 2];
    }
    const double mean = static_cast<double>(weighted) / (1000.0 * n_pixels);
    const auto gain = static_cast<float>(params.contrast);
    const auto bias = static_cast<float>((1.0 - params.contrast) * mean);
    k.affine(px.data(), gain, bias, px.data(), px.size());
  }
  if (params.saturation != 1.0) {
    const auto f = static_cast<float>(params.saturation);
    for (std::size_t i = 0; i < n_pixels; ++i) {
      std::uint8_t* p = &px[3 * i];
      const float g = (299.0f * p[0] + 587.0f * p[1] + 114.0f * p[2]) / 1000.0f;
      for (int c = 0; c < 3; ++c) p[c] = to_u8(g + f * (p[c] - g));
    }
  }
  if (params.hue_shift != 0.0) {
    for (std::size_t i = 0; i < n_pixels; ++i) {
      std::uint8_t* p = &px[3 * i];
      double h, s, v;
      rgb_to_hsv(p[0] / 255.0, p[1] / 255.0, p[2] / 255.0, h, s, v);
      h += params.hue_shift;
      h -= std::floor(h);
      double r, g, b;
      hsv_to_rgb(h, s, v, r, g, b);
      p[0] = to_u8(r * 255.0);
      p[1] = to_u8(g * 255.0);
      p[2] = to_u8(b * 255.0);
    }
  }
  if (params.to_grayscale) {
    for (std::size_t i = 0; i < n_pixels; ++i) {
      std::uint8_t* p = &px[3 * i];
      p[0] = p[1] = p[2] = gray_of(p[0], p[1], p[2]);
    }
  }
  return out;
}

AugmentedView augment_view(const Image& image, std::span<const BinaryMask> masks,
                           const AugmentationSpec& spec, RandomStream& rng, int out_size) {
  for (const auto& m : masks) {
    if (m.width() != image.width() || m.height() != image.height()) {
      throw Error(ErrorKind::DimensionMismatch,
                  fmt::format("mask {}x{} does not match image {}x{}", m.width(), m.height(),
                              image.width(), image.height()));
    }
  }
  AugmentedView view;
  view.params = sample_augmentation(spec, rng);
  view.image = apply_photometric(apply_geometric(image, view.params.geometric, out_size),
                                 view.params.photometric);
  view.masks.reserve(masks.size());
  for (const auto& m : masks) {
    view.masks.push_back(apply_geometric_mask(m, view.params.geometric, out_size));
  }
  return view;
}

}  // namespace splitshot

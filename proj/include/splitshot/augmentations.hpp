// Copyright 2026 The splitshot Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <utility>
#include <vector>

#include "splitshot/binary_mask.hpp"
#include "splitshot/image.hpp"
#include "splitshot/rng.hpp"

namespace splitshot {

/// Applied in the order scale, rotate (about the center, positive angle is
/// counter-clockwise on screen), horizontal flip, vertical flip, then
/// center-crop or zero-pad to the output size.
struct GeometricParams {
  bool hflip = false;
  bool vflip = false;
  double angle_deg = 0.0;
  double scale = 1.0;

  bool is_identity() const { return !hflip && !vflip && angle_deg == 0.0 && scale == 1.0; }
  friend bool operator==(const GeometricParams&, const GeometricParams&) = default;
};

/// Applied in the order brightness, contrast, saturation, hue, then grayscale.
struct PhotometricParams {
  bool to_grayscale = false;
  double brightness = 1.0;
  double contrast = 1.0;
  double saturation = 1.0;
  double hue_shift = 0.0;  // fraction of the hue circle, [-0.5, 0.5]

  bool is_identity() const {
    return !to_grayscale && brightness == 1.0 && contrast == 1.0 && saturation == 1.0 &&
           hue_shift == 0.0;
  }
  friend bool operator==(const PhotometricParams&, const PhotometricParams&) = default;
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  friend bool operator==(const Range&, const Range&) = default;
};

struct AugmentationSpec {
  bool enabled = true;
  double hflip_prob = 0.5;
  double vflip_prob = 0.5;
  Range angle_deg{-30.0, 30.0};
  Range scale{0.75, 1.25};
  double jitter_prob = 0.8;
  Range brightness{0.6, 1.4};
  Range contrast{0.6, 1.4};
  Range saturation{0.6, 1.4};
  Range hue{-0.1, 0.1};
  double grayscale_prob = 0.2;

  void validate() const;
  static AugmentationSpec disabled() {
    AugmentationSpec s;
    s.enabled = false;
    return s;
  }
};

struct AugmentationParams {
  GeometricParams geometric;
  PhotometricParams photometric;
};

AugmentationParams sample_augmentation(const AugmentationSpec& spec, RandomStream& rng);

Image resize_bilinear(const Image& image, int width, int height);
BinaryMask resize_nearest(const BinaryMask& mask, int width, int height);

Image apply_geometric(const Image& image, const GeometricParams& params, int out_size);
BinaryMask apply_geometric_mask(const BinaryMask& mask, const GeometricParams& params,
                                int out_size);
Image apply_photometric(const Image& image, const PhotometricParams& params);

struct AugmentedView {
  Image image;
  std::vector<BinaryMask> masks;
  AugmentationParams params;
};

/// One sampled parameter set; geometry applied identically to the image and
/// every mask, photometry to the image only. Throws DimensionMismatch.
AugmentedView augment_view(const Image& image, std::span<const BinaryMask> masks,
                           const AugmentationSpec& spec, RandomStream& rng, int out_size);

}  // namespace splitshot

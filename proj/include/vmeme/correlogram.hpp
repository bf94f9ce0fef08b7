#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vmeme/feature_matrix.hpp"
#include "vmeme/image.hpp"
#include "vmeme/imgproc.hpp"

namespace vmeme::correlogram {

inline constexpr int kColors = 166;
inline constexpr int kChromaticBins = 162;
inline constexpr int kDim = 2 * kColors;

// Perceptual HSV quantization: 18 hue sectors x 3 saturation x 3 value
// chromatic bins, then 4 gray levels for saturation below 0.1.
int quantize_hsv(std::uint8_t r, std::uint8_t g, std::uint8_t b);

struct CorrelogramFeature {
  std::array<double, kDim> values{};
  double l2_norm = 0.0;
  std::string video_id;
  int shot_index = -1;
};

const std::vector<int>& default_distances();  // {1, 3, 5, 7}

// Auto-correlogram over the central horizontal stripe (block 0) and the
// central vertical stripe (block 1), each a third of the frame extent. Per
// color: probability that a pixel at L-infinity distance d from a pixel of
// that color shares it, averaged over the distances with any counted pair.
CorrelogramFeature extract(const Image& pixels, std::span<const int> distances);
CorrelogramFeature extract(const imgproc::PreparedFrame& frame, std::span<const int> distances);

struct CollectionMaxFeature {
  std::array<double, kDim> values{};
  double l2_norm = 0.0;
};

CollectionMaxFeature collection_max(std::span<const CorrelogramFeature> features);
CollectionMaxFeature collection_max(const FeatureMatrix& features);
// Merge of partial maxima.
CollectionMaxFeature merge(const CollectionMaxFeature& a, const CollectionMaxFeature& b);

std::vector<float> to_floats(const CorrelogramFeature& f);

}  // namespace vmeme::correlogram

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vmeme/image.hpp"

namespace vmeme::imgproc {

inline constexpr int kMinFrameSide = 16;

struct RawFrame {
  Image pixels;
  std::string video_id;
  double t_offset = 0.0;
};

struct ShotRecord {
  std::string video_id;
  int shot_index = 0;
  std::size_t keyframe = 0;  // index into the frame sequence the shot came from
  double start = 0.0;
  double end = 0.0;
};

// 8x8x8 RGB histogram normalized to unit mass.
using ColorHistogram = std::array<double, 512>;

ColorHistogram color_histogram(const Image& img);
double histogram_l1(const ColorHistogram& a, const ColorHistogram& b);

// Cuts where the L1 histogram distance between consecutive frames exceeds
// threshold; keyframes are drawn uniformly per shot from a stream seeded by
// (seed, video id).
std::vector<ShotRecord> segment_shots(std::span<const RawFrame> frames, double threshold, std::uint64_t seed);

struct PrepOptions {
  double blank_entropy = 1.0;  // bits, 8-bin grayscale histogram
  double border_var = 25.0;    // luma variance below which an edge row/column is border
  double clip_limit = 2.0;
  int tiles = 8;
};

struct PreparedFrame {
  Image pixels;
  bool blank = false;
  bool border_removed = false;
};

double gray_entropy(const Image& img);

struct BorderBox {
  int left = 0, top = 0, right = 0, bottom = 0;  // pixels stripped on each side
};

BorderBox detect_border(const Image& img, double max_variance);

// Resize width so that width:height == 4:3, keeping the height.
Image normalize_aspect(const Image& img);
Image median3x3(const Image& img);
// Contrast-limited adaptive equalization of luma; chroma offsets preserved.
Image equalize_luma(const Image& img, double clip_limit, int tiles);

// Blank test, border crop, aspect normalization, median denoise, equalization.
// Blank frames return early with the blank flag and untouched pixels.
PreparedFrame prepare_frame(const Image& frame, const PrepOptions& options = {});

}  // namespace vmeme::imgproc

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "vmeme/corpus.hpp"
#include "vmeme/feature_matrix.hpp"
#include "vmeme/image.hpp"
#include "vmeme/memedetect.hpp"

// Seeded generators for tests, benchmarks and the demo corpus.
namespace vmeme::synth {

// Gradient background, a few flat shapes and a soft luminance ripple.
Image natural_image(std::mt19937_64& rng, int width = 160, int height = 120);

struct JitterOptions {
  double max_rescale = 0.15; // scale drawn from [1 - r, 1 + r]
  double contrast = 0.1;     // gain drawn from [1 - c, 1 + c]
  int brightness = 8;
  double border_prob = 0.5;
  double overlay_prob = 0.5;
  int noise = 3;
};

// Re-encoded copy: rescale, gain/offset, letterbox or frame border, corner
// caption overlay, pixel noise.
Image jitter(const Image& base, std::mt19937_64& rng, const JitterOptions& options = {});

struct PlantedSet {
  std::vector<Image> frames;
  std::vector<int> group;  // -1 for distractors
};

// `frames` keyframes; `groups` planted groups of 5..8 jittered copies, the
// rest unrelated distractors. Order is shuffled.
PlantedSet planted_frames(std::size_t frames, std::size_t groups, std::uint64_t seed, int width = 160,
                          int height = 120);

// Every within-group pair as positive plus `negatives_per_positive` times as
// many random cross pairs as negatives.
std::vector<memedetect::LabeledPair> planted_labels(const std::vector<int>& group, std::uint64_t seed,
                                                    std::size_t negatives_per_positive = 4);

struct DemoOptions {
  std::size_t keyframes = 500;
  std::size_t groups = 50;
  std::size_t authors = 60;
  int frames_per_shot = 2;
  int width = 160;
  int height = 120;
  int days = 30;
  std::uint64_t seed = 7;
};

struct DemoSummary {
  std::string manifest;
  std::string labels;
  std::size_t videos = 0;
  std::size_t frames = 0;
};

// Writes manifest.jsonl, frames/*.png and labels.csv under dir.
DemoSummary write_demo_corpus(const std::string& dir, const DemoOptions& options = {});

// Mixture of low-rank Gaussian clusters with isotropic noise.
FeatureMatrix clustered_features(std::size_t rows, std::size_t dim, std::size_t clusters, std::uint64_t seed);

struct PredictionCorpus {
  corpus::Corpus corpus;
  std::vector<memedetect::MemeCluster> clusters;
};

struct PredictionOptions {
  std::size_t memes = 1000;
  std::size_t authors = 200;
  std::size_t topics = 10;
  int days = 45;
  std::uint64_t seed = 11;
};

// Meme cascades whose eventual volume follows a latent popularity that is
// visible, noisily, in first-day authors and titles.
PredictionCorpus prediction_corpus(const PredictionOptions& options = {});

}  // namespace vmeme::synth

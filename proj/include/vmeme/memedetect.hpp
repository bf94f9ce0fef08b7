#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vmeme/ann.hpp"
#include "vmeme/corpus.hpp"
#include "vmeme/correlogram.hpp"
#include "vmeme/feature_matrix.hpp"

namespace vmeme::memedetect {

inline constexpr double kDefaultTau = 11.5;
inline constexpr std::size_t kDefaultKnn = 50;

// Identifies a keyframe: corpus video index plus shot index within the video.
struct FrameKey {
  std::uint32_t video = 0;
  int shot = 0;

  auto operator<=>(const FrameKey&) const = default;
};

// Feature rows a < b that were declared near-duplicates.
struct MatchPair {
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  double distance = 0.0;
};

struct Candidate {
  std::uint32_t query = 0;
  std::uint32_t neighbor = 0;
  double distance = 0.0;
};

// T_q = tau * |f_q| / |f_max|.
double query_threshold(double query_norm, double max_norm, double tau);

// Up to k non-self neighbors per row.
std::vector<Candidate> collect_candidates(const ann::AnnIndex& index, std::size_t k);

// Keeps candidates within their query's threshold (ties accepted), then
// canonicalizes and deduplicates. Result sorted by (a, b).
std::vector<MatchPair> threshold_candidates(std::span<const Candidate> candidates, std::span<const double> row_norms,
                                            double max_norm, double tau);

std::vector<double> row_norms(const FeatureMatrix& features);

std::vector<MatchPair> match_all(const ann::AnnIndex& index, const correlogram::CollectionMaxFeature& fmax, double tau,
                                 std::size_t k = kDefaultKnn);

// Disjoint sets with path halving and union by rank.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n);
  std::uint32_t find(std::uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }
  std::size_t size() const { return parent_.size(); }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint8_t> rank_;
};

// Connected components over the rows touched by pairs. Members sorted;
// components ordered by smallest member.
std::vector<std::vector<std::uint32_t>> close_clusters(std::span<const MatchPair> pairs);

struct MemeCluster {
  std::uint32_t meme_id = 0;
  std::vector<FrameKey> members;
  std::vector<std::uint32_t> videos;   // sorted corpus video indices
  std::vector<std::uint32_t> authors;  // sorted corpus author indices
  Timestamp onset_time = 0;
  Timestamp last_time = 0;
};

// Resolves components through the row -> frame table, keeps clusters spanning
// at least two videos and two authors, and numbers them by onset time.
std::vector<MemeCluster> filter_clusters(std::span<const std::vector<std::uint32_t>> components,
                                         std::span<const FrameKey> frames, const corpus::Corpus& corpus);

// Rebuilds derived fields (videos, authors, times) from members.
MemeCluster resolve_cluster(std::vector<FrameKey> members, const corpus::Corpus& corpus);

struct LabeledPair {
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  bool duplicate = false;
};

struct DetectionScores {
  double precision = 1.0;  // 1 when nothing is declared
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t true_pos = 0, false_pos = 0, false_neg = 0;
};

DetectionScores evaluate_pairs(std::span<const MatchPair> pairs, std::span<const LabeledPair> labels);
DetectionScores evaluate_clusters(std::span<const std::vector<std::uint32_t>> components, std::size_t rows,
                                  std::span<const LabeledPair> labels);

struct OperatingPoint {
  double tau = 0.0;
  DetectionScores pairs;
  DetectionScores clusters;
};

std::vector<OperatingPoint> sweep_tau(std::span<const Candidate> candidates, std::span<const double> row_norms,
                                      double max_norm, std::span<const double> taus, std::span<const LabeledPair> labels);

// File formats.
void write_clusters_jsonl(const std::string& path, std::span<const MemeCluster> clusters, const corpus::Corpus& corpus);
std::vector<MemeCluster> read_clusters_jsonl(const std::string& path, const corpus::Corpus& corpus);
void write_pairs_csv(const std::string& path, std::span<const MatchPair> pairs, std::span<const FrameKey> frames,
                     const corpus::Corpus& corpus);
// CSV "video_a,shot_a,video_b,shot_b,label" with optional header.
std::vector<LabeledPair> read_labels_csv(const std::string& path, std::span<const FrameKey> frames,
                                         const corpus::Corpus& corpus);

}  // namespace vmeme::memedetect

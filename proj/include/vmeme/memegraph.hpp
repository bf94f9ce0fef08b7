#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "vmeme/centrality.hpp"
#include "vmeme/corpus.hpp"
#include "vmeme/memedetect.hpp"

namespace vmeme::memegraph {

inline constexpr double kDefaultEta = 0.7654;
inline constexpr double kMinDeltaDays = 1.0 / 24.0;
inline constexpr Timestamp kNoLimit = std::numeric_limits<Timestamp>::max();

enum class WeightVariant { Star, Prime };
WeightVariant parse_weight_variant(const std::string& name);  // "star" | "prime"
std::string to_string(WeightVariant v);

// Which memes each video carries, and which videos carry each meme.
struct MemeIncidence {
  std::vector<std::vector<std::uint32_t>> videos_of_meme;  // sorted corpus video indices, by meme_id
  std::vector<std::vector<std::uint32_t>> memes_of_video;  // sorted meme ids, by corpus video
};

// Only videos uploaded at or before `upto` are kept.
MemeIncidence incidence(std::span<const memedetect::MemeCluster> clusters, std::size_t videos,
                        const corpus::Corpus& corpus, Timestamp upto = kNoLimit);

struct VideoEdge {
  std::uint32_t src = 0;  // earlier video
  std::uint32_t dst = 0;
  std::uint32_t nu = 0;   // shared memes
  double dt_days = 0.0;   // clamped below at one hour
  double omega_star = 0.0;
  double omega_prime = 0.0;

  double weight(WeightVariant v) const { return v == WeightVariant::Star ? omega_star : omega_prime; }
};

struct VideoGraph {
  double eta = kDefaultEta;
  std::vector<std::uint32_t> nodes;  // corpus video indices carrying a meme, sorted
  std::vector<VideoEdge> edges;      // sorted by (src, dst)
  std::size_t simultaneous_pairs = 0;  // meme co-posts skipped for equal timestamps
};

// Edge m -> j iff t(d_m) < t(d_j) and the two videos share a meme.
VideoGraph build_video_graph(std::span<const memedetect::MemeCluster> clusters, const corpus::Corpus& corpus,
                             double eta = kDefaultEta, Timestamp upto = kNoLimit);

struct AuthorEdge {
  std::uint32_t a = 0;  // a < b, corpus author indices
  std::uint32_t b = 0;
  double theta = 0.0;
};

struct AuthorGraph {
  std::vector<std::uint32_t> nodes;  // authors of video-graph nodes, sorted
  std::vector<AuthorEdge> edges;     // sorted by (a, b)
};

AuthorGraph build_author_graph(const VideoGraph& vg, const corpus::Corpus& corpus, WeightVariant variant);

// Unweighted adjacency over graph nodes, indexed like `nodes`.
graph::Adjacency adjacency(const VideoGraph& vg);
graph::Adjacency adjacency(const AuthorGraph& ag);

bool is_acyclic(const VideoGraph& vg);

struct VideoMemeInfluence {
  std::uint32_t video = 0;
  std::uint32_t meme = 0;
  std::uint32_t zeta_in = 0;   // videos of the meme posted strictly earlier
  std::uint32_t zeta_out = 0;  // strictly later
};

struct InfluenceRecord {
  std::vector<VideoMemeInfluence> pairs;  // sorted by (meme, video)
  std::vector<double> chi;                // per corpus video
  std::vector<double> chi_hat;            // per corpus author
  std::vector<double> chi_bar;            // chi_hat / videos by the author (within the window)
  std::vector<std::uint32_t> author_in_degree;   // distinct authors with an edge into the author's videos
  std::vector<std::uint32_t> author_out_degree;  // distinct authors reached from the author's videos
};

// Unit weights on every meme subgraph.
InfluenceRecord influence_indices(std::span<const memedetect::MemeCluster> clusters, const corpus::Corpus& corpus,
                                  Timestamp upto = kNoLimit);

struct OriginalityRecord {
  std::uint32_t author = 0;
  std::size_t originated = 0;
  std::size_t reposted = 0;
  double index = 0.0;
};

inline constexpr Timestamp kOriginalityWindow = 3600;

// Clusters whose first two postings are within an hour are excluded. Only
// authors with at least one vote appear.
std::vector<OriginalityRecord> originality_index(std::span<const memedetect::MemeCluster> clusters,
                                                 const corpus::Corpus& corpus);

// Mean absolute difference over twice the mean.
double gini(std::span<const double> values);

struct ZipfFit {
  double exponent = 0.0;  // positive s in f ~ r^-s
  double intercept = 0.0;
  std::size_t ranks = 0;
};

// Least squares on log f vs log r over ranks whose count is >= min_count.
ZipfFit zipf_fit(std::span<const double> frequencies, double min_count = 1.0);

struct RemixBin {
  std::size_t first_rank = 0;
  std::size_t last_rank = 0;  // inclusive, 1-based
  std::size_t videos = 0;
  std::size_t with_memes = 0;
  double fraction = 0.0;
};

struct RemixStats {
  std::size_t videos = 0;
  std::size_t videos_with_memes = 0;
  double fraction = 0.0;
  std::vector<RemixBin> by_view_rank;
};

RemixStats remix_stats(std::span<const memedetect::MemeCluster> clusters, const corpus::Corpus& corpus,
                       std::size_t bins = 10);

// Exports.
void write_video_edges_csv(const std::string& path, const VideoGraph& vg, const corpus::Corpus& corpus);
void write_author_edges_csv(const std::string& path, const AuthorGraph& ag, const corpus::Corpus& corpus);
void write_influence_csv(const std::string& path, const InfluenceRecord& inf, const corpus::Corpus& corpus);
void write_originality_csv(const std::string& path, std::span<const OriginalityRecord> records,
                           const corpus::Corpus& corpus);

}  // namespace vmeme::memegraph

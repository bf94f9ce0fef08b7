#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "vmeme/feature_matrix.hpp"

namespace vmeme::ann {

enum class IndexKind { Auto, KdForest, KMeansTree, Linear };

std::string to_string(IndexKind kind);
IndexKind parse_index_kind(const std::string& name);

struct Neighbor {
  std::uint32_t index = 0;
  double distance = 0.0;  // Euclidean, not squared
};

struct IndexParams {
  std::size_t budget = 0;  // leaf candidates per query; 0 -> round(sqrt(N))
  int trees = 4;           // kd-forest
  int branching = 16;      // k-means tree
  int kmeans_iterations = 7;
  std::uint64_t seed = 1;
  IndexKind kind = IndexKind::Auto;
  double probe_fraction = 0.01;
  std::size_t probe_min = 20;
  std::size_t probe_k = 10;
};

struct ProbeResult {
  double kd_recall = 0.0;
  double kmeans_recall = 0.0;
  std::size_t kd_cost = 0;  // distance evaluations over the probe
  std::size_t kmeans_cost = 0;
  std::size_t queries = 0;
};

class AnnIndex {
 public:
  // Requires at least two rows.
  static AnnIndex build(std::shared_ptr<const FeatureMatrix> data, const IndexParams& params = {});

  // k nearest rows by L2, ascending (ties by row index). Examines at most
  // `budget` rows; budget >= size() is an exact linear scan.
  std::vector<Neighbor> knn(std::span<const float> query, std::size_t k) const;
  std::vector<Neighbor> knn(std::span<const float> query, std::size_t k, std::size_t budget) const;

  IndexKind kind() const { return kind_; }
  std::size_t budget() const { return budget_; }
  std::size_t size() const { return data_->rows; }
  const FeatureMatrix& data() const { return *data_; }
  const ProbeResult& probe() const { return probe_; }

  struct KdNode {
    std::int32_t dim = -1;  // -1 marks a leaf
    float split = 0.0f;
    std::uint32_t left = 0, right = 0;  // children, or point index in left for leaves
  };
  struct KMeansNode {
    std::vector<float> center;
    std::vector<std::uint32_t> children;
    std::vector<std::uint32_t> points;  // leaves only
  };

 private:
  std::vector<Neighbor> search_kd(std::span<const float> q, std::size_t k, std::size_t budget, std::size_t* cost) const;
  std::vector<Neighbor> search_kmeans(std::span<const float> q, std::size_t k, std::size_t budget, std::size_t* cost) const;
  std::vector<Neighbor> search(IndexKind kind, std::span<const float> q, std::size_t k, std::size_t budget,
                               std::size_t* cost) const;

  std::shared_ptr<const FeatureMatrix> data_;
  IndexKind kind_ = IndexKind::Linear;
  std::size_t budget_ = 0;
  std::vector<std::vector<KdNode>> forest_;
  std::vector<KMeansNode> kmeans_;
  ProbeResult probe_;
};

// Linear scan, same ordering contract as AnnIndex::knn.
std::vector<Neighbor> exact_knn(const FeatureMatrix& data, std::span<const float> query, std::size_t k);

}  // namespace vmeme::ann

#include "vmeme/ann.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <random>

#include "vmeme/util.hpp"

namespace vmeme::ann {

std::string to_string(IndexKind kind) {
  switch (kind) {
    case IndexKind::Auto: return "auto";
    case IndexKind::KdForest: return "kdforest";
    case IndexKind::KMeansTree: return "kmeans";
    case IndexKind::Linear: return "linear";
  }
  return "unknown";
}

IndexKind parse_index_kind(const std::string& name) {
  if (name == "auto") return IndexKind::Auto;
  if (name == "kdforest" || name == "kdtree") return IndexKind::KdForest;
  if (name == "kmeans") return IndexKind::KMeansTree;
  if (name == "linear") return IndexKind::Linear;
  throw InvalidArgument("unknown index kind '" + name + "'");
}

namespace {

// Bounded max-heap on (squared distance, index).
class ResultSet {
 public:
  explicit ResultSet(std::size_t k) : k_(k) {}
  bool full() const { return heap_.size() >= k_; }
  double worst() const { return full() ? heap_.top().first : std::numeric_limits<double>::infinity(); }
  void add(double d2, std::uint32_t idx) {
    if (k_ == 0) return;
    if (!full()) {
      heap_.emplace(d2, idx);
    } else if (std::make_pair(d2, idx) < heap_.top()) {
      heap_.pop();
      heap_.emplace(d2, idx);
    }
  }
  std::vector<Neighbor> sorted() {
    std::vector<Neighbor> out(heap_.size());
    for (std::size_t i = out.size(); i-- > 0;) {
      out[i] = {heap_.top().second, std::sqrt(heap_.top().first)};
      heap_.pop();
    }
    return out;
  }

 private:
  std::size_t k_;
  std::priority_queue<std::pair<double, std::uint32_t>> heap_;
};

// Per-thread visited marks, reset in O(1) by bumping a generation counter.
class VisitedSet {
 public:
  void reset(std::size_t n) {
    if (stamp_.size() < n) stamp_.assign(n, 0);
    if (++gen_ == 0) {
      std::fill(stamp_.begin(), stamp_.end(), 0);
      gen_ = 1;
    }
  }
  bool insert(std::uint32_t i) {
    if (stamp_[i] == gen_) return false;
    stamp_[i] = gen_;
    return true;
  }

 private:
  std::vector<std::uint32_t> stamp_;
  std::uint32_t gen_ = 0;
};

using Branch = std::pair<double, std::uint32_t>;  // (lower-bound key, node)
using BranchHeap = std::priority_queue<Branch, std::vector<Branch>, std::greater<>>;

std::uint32_t build_kd(const FeatureMatrix& data, std::vector<std::uint32_t>& ind, std::size_t begin, std::size_t end,
                       std::mt19937_64& rng, std::vector<AnnIndex::KdNode>& nodes) {
  const auto id = static_cast<std::uint32_t>(nodes.size());
  nodes.emplace_back();
  const std::size_t n = end - begin;
  if (n == 1) {
    nodes[id].left = ind[begin];
    return id;
  }
  const std::size_t dim = data.dim;
  const std::size_t sample = std::min<std::size_t>(n, 100);
  std::vector<double> mean(dim, 0.0), var(dim, 0.0);
  for (std::size_t i = 0; i < sample; ++i) {
    auto row = data.row(ind[begin + i]);
    for (std::size_t d = 0; d < dim; ++d) mean[d] += row[d];
  }
  for (auto& m : mean) m /= static_cast<double>(sample);
  for (std::size_t i = 0; i < sample; ++i) {
    auto row = data.row(ind[begin + i]);
    for (std::size_t d = 0; d < dim; ++d) var[d] += (row[d] - mean[d]) * (row[d] - mean[d]);
  }
  std::vector<std::uint32_t> order(dim);
  std::iota(order.begin(), order.end(), 0);
  const std::size_t top = std::min<std::size_t>(5, dim);
  std::partial_sort(order.begin(), order.begin() + top, order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return var[a] != var[b] ? var[a] > var[b] : a < b;
  });
  const std::uint32_t split_dim = order[rng() % top];
  float split = static_cast<float>(mean[split_dim]);
  auto mid_it = std::partition(ind.begin() + begin, ind.begin() + end,
                               [&](std::uint32_t p) { return data.row(p)[split_dim] < split; });
  std::size_t mid = static_cast<std::size_t>(mid_it - ind.begin());
  if (mid == begin || mid == end) {
    // Every sampled coordinate on one side: split by position instead.
    mid = begin + n / 2;
    std::nth_element(ind.begin() + begin, ind.begin() + mid, ind.begin() + end, [&](std::uint32_t a, std::uint32_t b) {
      return data.row(a)[split_dim] < data.row(b)[split_dim];
    });
    split = data.row(ind[mid])[split_dim];
  }
  const std::uint32_t left = build_kd(data, ind, begin, mid, rng, nodes);
  const std::uint32_t right = build_kd(data, ind, mid, end, rng, nodes);
  nodes[id].dim = static_cast<std::int32_t>(split_dim);
  nodes[id].split = split;
  nodes[id].left = left;
  nodes[id].right = right;
  return id;
}

std::vector<float> mean_of(const FeatureMatrix& data, const std::vector<std::uint32_t>& ind) {
  std::vector<double> acc(data.dim, 0.0);
  for (auto p : ind) {
    auto row = data.row(p);
    for (std::size_t d = 0; d < data.dim; ++d) acc[d] += row[d];
  }
  std::vector<float> out(data.dim);
  for (std::size_t d = 0; d < data.dim; ++d) out[d] = static_cast<float>(acc[d] / static_cast<double>(ind.size()));
  return out;
}

std::uint32_t build_kmeans(const FeatureMatrix& data, std::vector<std::uint32_t> ind, int branching, int iterations,
                           std::mt19937_64& rng, std::vector<AnnIndex::KMeansNode>& nodes) {
  const auto id = static_cast<std::uint32_t>(nodes.size());
  nodes.emplace_back();
  nodes[id].center = mean_of(data, ind);
  const std::size_t n = ind.size();
  const std::size_t k = static_cast<std::size_t>(branching);
  if (n < k) {
    nodes[id].points = std::move(ind);
    return id;
  }

  // k-means++ seeding.
  std::vector<std::vector<float>> centers;
  std::vector<double> closest(n, std::numeric_limits<double>::infinity());
  {
    auto first = data.row(ind[rng() % n]);
    centers.emplace_back(first.begin(), first.end());
  }
  while (centers.size() < k) {
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      closest[i] = std::min(closest[i], squared_l2(data.row(ind[i]), centers.back()));
      total += closest[i];
    }
    if (total <= 0) break;
    const double r = static_cast<double>(rng() >> 11) * 0x1.0p-53 * total;
    double acc = 0;
    std::size_t pick = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
      acc += closest[i];
      if (acc >= r) {
        pick = i;
        break;
      }
    }
    auto row = data.row(ind[pick]);
    centers.emplace_back(row.begin(), row.end());
  }

  std::vector<std::uint32_t> assign(n, 0);
  for (int it = 0; it <= iterations; ++it) {
    bool changed = it == 0;
    for (std::size_t i = 0; i < n; ++i) {
      auto row = data.row(ind[i]);
      std::uint32_t best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < centers.size(); ++c) {
        const double d = squared_l2(row, centers[c]);
        if (d < bd) {
          bd = d;
          best = static_cast<std::uint32_t>(c);
        }
      }
      if (assign[i] != best) changed = true;
      assign[i] = best;
    }
    if (!changed || it == iterations) break;
    std::vector<std::vector<double>> acc(centers.size(), std::vector<double>(data.dim, 0.0));
    std::vector<std::size_t> count(centers.size(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto row = data.row(ind[i]);
      auto& a = acc[assign[i]];
      for (std::size_t d = 0; d < data.dim; ++d) a[d] += row[d];
      ++count[assign[i]];
    }
    for (std::size_t c = 0; c < centers.size(); ++c)
      if (count[c] > 0)
        for (std::size_t d = 0; d < data.dim; ++d) centers[c][d] = static_cast<float>(acc[c][d] / static_cast<double>(count[c]));
  }

  std::vector<std::vector<std::uint32_t>> groups(centers.size());
  for (std::size_t i = 0; i < n; ++i) groups[assign[i]].push_back(ind[i]);
  std::erase_if(groups, [](const auto& g) { return g.empty(); });
  if (groups.size() < 2) {
    nodes[id].points = std::move(ind);
    return id;
  }
  std::vector<std::uint32_t> children;
  for (auto& g : groups) children.push_back(build_kmeans(data, std::move(g), branching, iterations, rng, nodes));
  nodes[id].children = std::move(children);
  return id;
}

}  // namespace

AnnIndex AnnIndex::build(std::shared_ptr<const FeatureMatrix> data, const IndexParams& params) {
  if (!data || data->rows < 2) throw InvalidArgument("build_index: need at least two feature rows");
  if (data->dim == 0 || data->values.size() != static_cast<std::size_t>(data->rows) * data->dim)
    throw InvalidArgument("build_index: dimension mismatch");
  AnnIndex index;
  index.data_ = std::move(data);
  const std::size_t n = index.data_->rows;
  index.budget_ = params.budget ? params.budget : static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(n))));
  index.budget_ = std::max<std::size_t>(index.budget_, 1);

  const bool want_kd = params.kind == IndexKind::Auto || params.kind == IndexKind::KdForest;
  const bool want_km = params.kind == IndexKind::Auto || params.kind == IndexKind::KMeansTree;
  if (want_kd) {
    std::mt19937_64 rng(mix_seed(params.seed, "kdforest"));
    for (int t = 0; t < std::max(1, params.trees); ++t) {
      std::vector<std::uint32_t> ind(n);
      std::iota(ind.begin(), ind.end(), 0);
      std::shuffle(ind.begin(), ind.end(), rng);
      std::vector<KdNode> nodes;
      nodes.reserve(2 * n);
      build_kd(*index.data_, ind, 0, n, rng, nodes);
      index.forest_.push_back(std::move(nodes));
    }
  }
  if (want_km) {
    std::mt19937_64 rng(mix_seed(params.seed, "kmeans"));
    std::vector<std::uint32_t> ind(n);
    std::iota(ind.begin(), ind.end(), 0);
    build_kmeans(*index.data_, std::move(ind), std::max(2, params.branching), params.kmeans_iterations, rng, index.kmeans_);
  }

  if (params.kind != IndexKind::Auto) {
    index.kind_ = params.kind;
    return index;
  }

  // Recall probe on a seeded sample of the rows themselves.
  std::mt19937_64 rng(mix_seed(params.seed, "probe"));
  std::vector<std::uint32_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  std::shuffle(all.begin(), all.end(), rng);
  const std::size_t q = std::min(n, std::max(params.probe_min, static_cast<std::size_t>(std::ceil(params.probe_fraction * n))));
  const std::size_t k = std::min(params.probe_k, n - 1);
  ProbeResult probe;
  probe.queries = q;
  std::size_t kd_hits = 0, km_hits = 0, truth_total = 0;
  for (std::size_t i = 0; i < q; ++i) {
    const std::uint32_t qi = all[i];
    auto query = index.data_->row(qi);
    auto truth = exact_knn(*index.data_, query, k + 1);
    std::erase_if(truth, [&](const Neighbor& nb) { return nb.index == qi; });
    truth.resize(std::min(truth.size(), k));
    auto count_hits = [&](const std::vector<Neighbor>& got) {
      std::size_t hits = 0;
      for (const auto& t : truth)
        hits += std::any_of(got.begin(), got.end(), [&](const Neighbor& g) { return g.index == t.index; });
      return hits;
    };
    kd_hits += count_hits(index.search_kd(query, k + 1, index.budget_, &probe.kd_cost));
    km_hits += count_hits(index.search_kmeans(query, k + 1, index.budget_, &probe.kmeans_cost));
    truth_total += truth.size();
  }
  probe.kd_recall = truth_total ? static_cast<double>(kd_hits) / truth_total : 1.0;
  probe.kmeans_recall = truth_total ? static_cast<double>(km_hits) / truth_total : 1.0;
  if (probe.kd_recall != probe.kmeans_recall)
    index.kind_ = probe.kd_recall > probe.kmeans_recall ? IndexKind::KdForest : IndexKind::KMeansTree;
  else
    index.kind_ = probe.kd_cost <= probe.kmeans_cost ? IndexKind::KdForest : IndexKind::KMeansTree;
  index.probe_ = probe;
  // Drop the structure that lost.
  if (index.kind_ == IndexKind::KdForest)
    index.kmeans_.clear();
  else
    index.forest_.clear();
  return index;
}

std::vector<Neighbor> AnnIndex::knn(std::span<const float> query, std::size_t k) const { return knn(query, k, budget_); }

std::vector<Neighbor> AnnIndex::knn(std::span<const float> query, std::size_t k, std::size_t budget) const {
  if (query.size() != data_->dim) throw InvalidArgument("knn: query dimension mismatch");
  return search(kind_, query, k, budget, nullptr);
}

std::vector<Neighbor> AnnIndex::search(IndexKind kind, std::span<const float> q, std::size_t k, std::size_t budget,
                                       std::size_t* cost) const {
  if (budget >= data_->rows || kind == IndexKind::Linear) {
    if (cost) *cost += data_->rows;
    return exact_knn(*data_, q, k);
  }
  return kind == IndexKind::KdForest ? search_kd(q, k, budget, cost) : search_kmeans(q, k, budget, cost);
}

std::vector<Neighbor> AnnIndex::search_kd(std::span<const float> q, std::size_t k, std::size_t budget,
                                          std::size_t* cost) const {
  const FeatureMatrix& data = *data_;
  thread_local VisitedSet visited;
  visited.reset(data.rows);
  ResultSet result(k);
  BranchHeap heap;
  std::size_t checks = 0;

  // Heap payloads are slots in `pending`; node ids are only unique per tree.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pending;  // (tree, node)
  auto descend = [&](std::uint32_t tree, std::uint32_t node, double mindist) {
    const auto& nodes = forest_[tree];
    while (nodes[node].dim >= 0) {
      const auto& nd = nodes[node];
      const double diff = static_cast<double>(q[static_cast<std::size_t>(nd.dim)]) - nd.split;
      const std::uint32_t best = diff < 0 ? nd.left : nd.right;
      const std::uint32_t other = diff < 0 ? nd.right : nd.left;
      const double bound = mindist + diff * diff;
      if (bound < result.worst()) {
        heap.emplace(bound, static_cast<std::uint32_t>(pending.size()));
        pending.emplace_back(tree, other);
      }
      node = best;
    }
    if (checks >= budget) return;
    const std::uint32_t p = nodes[node].left;
    if (!visited.insert(p)) return;
    ++checks;
    result.add(squared_l2(q, data.row(p)), p);
  };

  for (std::uint32_t t = 0; t < forest_.size(); ++t) descend(t, 0, 0.0);
  while (!heap.empty() && checks < budget) {
    const auto [bound, slot] = heap.top();
    heap.pop();
    if (result.full() && bound >= result.worst()) break;
    descend(pending[slot].first, pending[slot].second, bound);
  }
  if (cost) *cost += checks;
  return result.sorted();
}

std::vector<Neighbor> AnnIndex::search_kmeans(std::span<const float> q, std::size_t k, std::size_t budget,
                                              std::size_t* cost) const {
  const FeatureMatrix& data = *data_;
  ResultSet result(k);
  BranchHeap heap;
  std::size_t checks = 0, center_evals = 0;

  auto descend = [&](std::uint32_t node) {
    while (!kmeans_[node].children.empty()) {
      const auto& children = kmeans_[node].children;
      std::uint32_t best = children[0];
      double bd = std::numeric_limits<double>::infinity();
      std::vector<std::pair<double, std::uint32_t>> dists;
      dists.reserve(children.size());
      for (auto c : children) {
        const double d = squared_l2(q, kmeans_[c].center);
        ++center_evals;
        dists.emplace_back(d, c);
        if (d < bd) {
          bd = d;
          best = c;
        }
      }
      for (const auto& [d, c] : dists)
        if (c != best) heap.emplace(d, c);
      node = best;
    }
    for (auto p : kmeans_[node].points) {
      if (checks >= budget) return;
      ++checks;
      result.add(squared_l2(q, data.row(p)), p);
    }
  };

  descend(0);
  while (!heap.empty() && checks < budget) {
    const std::uint32_t node = heap.top().second;
    heap.pop();
    descend(node);
  }
  if (cost) *cost += checks + center_evals;
  return result.sorted();
}

std::vector<Neighbor> exact_knn(const FeatureMatrix& data, std::span<const float> query, std::size_t k) {
  ResultSet result(k);
  for (std::uint32_t i = 0; i < data.rows; ++i) result.add(squared_l2(query, data.row(i)), i);
  return result.sorted();
}

}  // namespace vmeme::ann

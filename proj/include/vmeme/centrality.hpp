#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace vmeme::graph {

// Unweighted simple graph on nodes [0, n). Undirected edges are stored in
// both adjacency lists.
class Adjacency {
 public:
  Adjacency(std::size_t n, bool directed) : directed_(directed), out_(n), in_(n) {}

  void add_edge(std::uint32_t a, std::uint32_t b);
  // Sorts and removes parallel edges and self loops.
  void finalize();

  std::size_t size() const { return out_.size(); }
  bool directed() const { return directed_; }
  const std::vector<std::uint32_t>& out(std::size_t v) const { return out_[v]; }
  const std::vector<std::uint32_t>& in(std::size_t v) const { return in_[v]; }

 private:
  bool directed_;
  std::vector<std::vector<std::uint32_t>> out_, in_;
};

struct Centrality {
  std::vector<double> degree;       // distinct neighbors (either direction) / (n - 1)
  std::vector<double> closeness;    // reachable / sum of distances, 0 for isolates
  std::vector<double> betweenness;  // normalized by (n-1)(n-2), halved for undirected
};

// Brandes accumulation over breadth-first searches from every source.
Centrality centralities(const Adjacency& g);

// Same values, but only for nodes weakly connected to one of `targets`;
// every other entry is left at zero. Shortest paths never leave a component,
// so the restriction is exact for the nodes it covers.
Centrality centralities(const Adjacency& g, std::span<const std::uint32_t> targets);

}  // namespace vmeme::graph

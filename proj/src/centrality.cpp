#include "vmeme/centrality.hpp"

#include <algorithm>

#include "vmeme/util.hpp"

namespace vmeme::graph {

void Adjacency::add_edge(std::uint32_t a, std::uint32_t b) {
  if (a >= size() || b >= size()) throw InvalidArgument("Adjacency::add_edge: node out of range");
  out_[a].push_back(b);
  in_[b].push_back(a);
  if (!directed_) {
    out_[b].push_back(a);
    in_[a].push_back(b);
  }
}

void Adjacency::finalize() {
  auto clean = [](std::vector<std::uint32_t>& list, std::size_t self) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    list.erase(std::remove(list.begin(), list.end(), static_cast<std::uint32_t>(self)), list.end());
  };
  for (std::size_t v = 0; v < size(); ++v) {
    clean(out_[v], v);
    clean(in_[v], v);
  }
}

namespace {

constexpr std::size_t kBlocks = 16;

Centrality brandes(const Adjacency& g, const std::vector<std::uint32_t>& sources) {
  const std::size_t n = g.size();
  Centrality c;
  c.degree.assign(n, 0.0);
  c.closeness.assign(n, 0.0);
  c.betweenness.assign(n, 0.0);
  if (n == 0) return c;

  for (auto v : sources) {
    if (n < 2) break;
    std::vector<std::uint32_t> nb = g.out(v);
    nb.insert(nb.end(), g.in(v).begin(), g.in(v).end());
    std::sort(nb.begin(), nb.end());
    const auto distinct = std::unique(nb.begin(), nb.end()) - nb.begin();
    c.degree[v] = static_cast<double>(distinct) / static_cast<double>(n - 1);
  }

  const std::size_t ns = sources.size();
  const std::size_t blocks = std::min(kBlocks, ns);
  std::vector<std::vector<double>> partial(blocks, std::vector<double>(n, 0.0));
  parallel_for(blocks, [&](std::size_t b) {
    std::vector<std::int64_t> dist(n, -1);
    std::vector<double> sigma(n, 0.0), delta(n, 0.0);
    std::vector<std::uint32_t> order, queue;
    order.reserve(n);
    queue.reserve(n);
    auto& acc = partial[b];
    for (std::size_t si = ns * b / blocks; si < ns * (b + 1) / blocks; ++si) {
      const std::uint32_t s = sources[si];
      order.clear();
      queue.assign(1, s);
      dist[s] = 0;
      sigma[s] = 1;
      for (std::size_t head = 0; head < queue.size(); ++head) {
        const auto v = queue[head];
        order.push_back(v);
        for (auto w : g.out(v)) {
          if (dist[w] < 0) {
            dist[w] = dist[v] + 1;
            queue.push_back(w);
          }
          if (dist[w] == dist[v] + 1) sigma[w] += sigma[v];
        }
      }
      std::int64_t total = 0;
      for (auto v : order) total += dist[v];
      if (total > 0) c.closeness[s] = static_cast<double>(order.size() - 1) / static_cast<double>(total);
      for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const auto w = *it;
        for (auto v : g.in(w))
          if (dist[v] >= 0 && dist[v] + 1 == dist[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
        if (w != s) acc[w] += delta[w];
      }
      for (auto v : order) {
        dist[v] = -1;
        sigma[v] = delta[v] = 0.0;
      }
    }
  });
  if (n > 2 && blocks > 0) {
    const double norm = static_cast<double>(n - 1) * static_cast<double>(n - 2);
    for (std::size_t v = 0; v < n; ++v) {
      double sum = 0;
      for (std::size_t b = 0; b < blocks; ++b) sum += partial[b][v];
      c.betweenness[v] = sum / norm;  // undirected: pairs counted twice, normalizer halved
    }
  }
  return c;
}

}  // namespace

Centrality centralities(const Adjacency& g) {
  std::vector<std::uint32_t> all(g.size());
  for (std::size_t v = 0; v < all.size(); ++v) all[v] = static_cast<std::uint32_t>(v);
  return brandes(g, all);
}

Centrality centralities(const Adjacency& g, std::span<const std::uint32_t> targets) {
  const std::size_t n = g.size();
  std::vector<std::int64_t> comp(n, -1);
  std::vector<std::uint8_t> wanted;
  std::vector<std::uint32_t> stack;
  for (auto t : targets) {
    if (t >= n) throw InvalidArgument("centralities: target out of range");
    if (comp[t] >= 0) continue;
    const auto id = static_cast<std::int64_t>(wanted.size());
    wanted.push_back(1);
    comp[t] = id;
    stack.assign(1, t);
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      for (const auto* list : {&g.out(v), &g.in(v)})
        for (auto w : *list)
          if (comp[w] < 0) {
            comp[w] = id;
            stack.push_back(w);
          }
    }
  }
  std::vector<std::uint32_t> sources;
  for (std::size_t v = 0; v < n; ++v)
    if (comp[v] >= 0) sources.push_back(static_cast<std::uint32_t>(v));
  return brandes(g, sources);
}

}  // namespace vmeme::graph

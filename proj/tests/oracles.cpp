#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <set>

#include "vmeme/correlogram.hpp"

namespace oracle {

std::vector<vmeme::ann::Neighbor> knn(const vmeme::FeatureMatrix& data, std::span<const float> q, std::size_t k,
                                      long skip) {
  std::vector<vmeme::ann::Neighbor> all;
  for (std::uint32_t i = 0; i < data.rows; ++i) {
    if (static_cast<long>(i) == skip) continue;
    double s = 0;
    for (std::size_t d = 0; d < data.dim; ++d) {
      const double diff = static_cast<double>(data.row(i)[d]) - q[d];
      s += diff * diff;
    }
    all.push_back({i, std::sqrt(s)});
  }
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.index < b.index;
  });
  if (all.size() > k) all.resize(k);
  return all;
}

namespace {

void stripe(const std::vector<int>& q, int width, int x0, int y0, int x1, int y1, std::span<const int> distances,
            double* out) {
  constexpr int C = vmeme::correlogram::kColors;
  std::vector<double> acc(C, 0.0);
  std::vector<int> used(C, 0);
  for (int d : distances) {
    std::vector<long> same(C, 0), total(C, 0);
    for (int y = y0; y < y1; ++y)
      for (int x = x0; x < x1; ++x)
        for (int yy = y0; yy < y1; ++yy)
          for (int xx = x0; xx < x1; ++xx) {
            if (std::max(std::abs(xx - x), std::abs(yy - y)) != d) continue;
            const int c = q[y * width + x];
            ++total[c];
            same[c] += q[yy * width + xx] == c;
          }
    for (int c = 0; c < C; ++c)
      if (total[c]) {
        acc[c] += static_cast<double>(same[c]) / static_cast<double>(total[c]);
        ++used[c];
      }
  }
  for (int c = 0; c < C; ++c) out[c] = used[c] ? acc[c] / used[c] : 0.0;
}

}  // namespace

std::array<double, 332> correlogram(const vmeme::Image& img, std::span<const int> distances) {
  const int w = img.width(), h = img.height();
  std::vector<int> q(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const auto* p = img.at(x, y);
      q[y * w + x] = vmeme::correlogram::quantize_hsv(p[0], p[1], p[2]);
    }
  std::array<double, 332> f{};
  stripe(q, w, 0, h / 3, w, h - h / 3, distances, f.data());
  stripe(q, w, w / 3, 0, w - w / 3, h, distances, f.data() + 166);
  return f;
}

std::vector<std::uint32_t> components(std::size_t n, std::span<const std::pair<std::uint32_t, std::uint32_t>> edges) {
  std::vector<std::vector<std::uint32_t>> adj(n);
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<std::uint32_t> label(n, UINT32_MAX);
  for (std::uint32_t s = 0; s < n; ++s) {
    if (label[s] != UINT32_MAX) continue;
    std::queue<std::uint32_t> q;
    q.push(s);
    label[s] = s;
    while (!q.empty()) {
      const auto v = q.front();
      q.pop();
      for (auto w : adj[v])
        if (label[w] == UINT32_MAX) {
          label[w] = s;
          q.push(w);
        }
    }
  }
  return label;
}

std::vector<std::uint32_t> labels_from_groups(std::size_t n, const std::vector<std::vector<std::uint32_t>>& groups) {
  std::vector<std::uint32_t> label(n);
  std::iota(label.begin(), label.end(), 0u);
  for (const auto& g : groups) {
    if (g.empty()) continue;
    const auto m = *std::min_element(g.begin(), g.end());
    for (auto v : g) label[v] = m;
  }
  return label;
}

double pair_f1(std::span<const std::uint32_t> truth, std::span<const std::uint32_t> test) {
  long tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < truth.size(); ++i)
    for (std::size_t j = i + 1; j < truth.size(); ++j) {
      const bool a = truth[i] == truth[j], b = test[i] == test[j];
      tp += a && b;
      fp += !a && b;
      fn += a && !b;
    }
  if (tp + fp + fn == 0) return 1.0;
  return 2.0 * tp / (2.0 * tp + fp + fn);
}

std::vector<std::uint32_t> threshold_closure(const vmeme::FeatureMatrix& f, double tau,
                                             std::vector<std::pair<std::uint32_t, std::uint32_t>>* pairs_out) {
  std::vector<double> fmax(f.dim, -INFINITY), norm(f.rows, 0.0);
  for (std::size_t i = 0; i < f.rows; ++i)
    for (std::size_t d = 0; d < f.dim; ++d) {
      fmax[d] = std::max(fmax[d], static_cast<double>(f.row(i)[d]));
      norm[i] += static_cast<double>(f.row(i)[d]) * f.row(i)[d];
    }
  double mx = 0;
  for (double v : fmax) mx += v * v;
  mx = std::sqrt(mx);
  for (auto& v : norm) v = std::sqrt(v);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (std::uint32_t i = 0; i < f.rows; ++i)
    for (std::uint32_t j = i + 1; j < f.rows; ++j) {
      double s = 0;
      for (std::size_t d = 0; d < f.dim; ++d) {
        const double diff = static_cast<double>(f.row(i)[d]) - f.row(j)[d];
        s += diff * diff;
      }
      const double dist = std::sqrt(s);
      if (dist <= tau * norm[i] / mx || dist <= tau * norm[j] / mx) pairs.emplace_back(i, j);
    }
  if (pairs_out) *pairs_out = pairs;
  return components(f.rows, pairs);
}

Centrality centrality(std::size_t n, bool directed, std::span<const std::pair<std::uint32_t, std::uint32_t>> edges) {
  std::vector<std::set<std::uint32_t>> out(n), nb(n);
  for (auto [a, b] : edges) {
    if (a == b) continue;
    out[a].insert(b);
    if (!directed) out[b].insert(a);
    nb[a].insert(b);
    nb[b].insert(a);
  }
  std::vector<std::vector<long>> dist(n, std::vector<long>(n, -1));
  std::vector<std::vector<double>> sigma(n, std::vector<double>(n, 0.0));
  for (std::size_t s = 0; s < n; ++s) {
    std::queue<std::size_t> q;
    q.push(s);
    dist[s][s] = 0;
    sigma[s][s] = 1;
    while (!q.empty()) {
      const auto v = q.front();
      q.pop();
      for (auto w : out[v]) {
        if (dist[s][w] < 0) {
          dist[s][w] = dist[s][v] + 1;
          q.push(w);
        }
        if (dist[s][w] == dist[s][v] + 1) sigma[s][w] += sigma[s][v];
      }
    }
  }
  Centrality c;
  c.degree.assign(n, 0.0);
  c.closeness.assign(n, 0.0);
  c.betweenness.assign(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    if (n > 1) c.degree[v] = static_cast<double>(nb[v].size()) / (n - 1);
    long reach = 0, total = 0;
    for (std::size_t t = 0; t < n; ++t)
      if (t != v && dist[v][t] > 0) {
        ++reach;
        total += dist[v][t];
      }
    if (total > 0) c.closeness[v] = static_cast<double>(reach) / total;
  }
  if (n > 2)
    for (std::size_t v = 0; v < n; ++v) {
      double b = 0;
      for (std::size_t s = 0; s < n; ++s)
        for (std::size_t t = 0; t < n; ++t) {
          if (s == t || s == v || t == v || dist[s][t] < 0 || dist[s][v] < 0 || dist[v][t] < 0) continue;
          if (dist[s][v] + dist[v][t] == dist[s][t]) b += sigma[s][v] * sigma[v][t] / sigma[s][t];
        }
      c.betweenness[v] = b / ((n - 1.0) * (n - 2.0));
    }
  return c;
}

double kendall_tau_b(std::span<const double> x, std::span<const double> y) {
  long conc = 0, disc = 0, tx = 0, ty = 0, pairs = 0;
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      ++pairs;
      const double dx = x[i] - x[j], dy = y[i] - y[j];
      if (dx == 0) ++tx;
      if (dy == 0) ++ty;
      if (dx == 0 || dy == 0) continue;
      (dx * dy > 0 ? conc : disc)++;
    }
  const double den = std::sqrt(static_cast<double>(pairs - tx) * static_cast<double>(pairs - ty));
  return den == 0 ? 0.0 : (conc - disc) / den;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  return ab / std::sqrt(aa * bb);
}

double matched_cosine(const std::vector<std::vector<double>>& truth, const std::vector<std::vector<double>>& found,
                      std::vector<double>* per_row) {
  std::vector<std::size_t> perm(found.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  double best = -1;
  do {
    double s = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) s += cosine(truth[i], found[perm[i]]);
    s /= truth.size();
    if (s > best) {
      best = s;
      if (per_row) {
        per_row->clear();
        for (std::size_t i = 0; i < truth.size(); ++i) per_row->push_back(cosine(truth[i], found[perm[i]]));
      }
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace oracle

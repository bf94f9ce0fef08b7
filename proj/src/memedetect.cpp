#include "vmeme/memedetect.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

namespace vmeme::memedetect {

using nlohmann::json;

double query_threshold(double query_norm, double max_norm, double tau) {
  if (!(tau > 0)) throw InvalidArgument("query_threshold: tau must be positive");
  if (!std::isfinite(query_norm) || !std::isfinite(max_norm)) throw InvalidArgument("query_threshold: non-finite norm");
  if (max_norm == 0) throw InvalidArgument("query_threshold: collection max feature has zero norm");
  return tau * query_norm / max_norm;
}

std::vector<double> row_norms(const FeatureMatrix& features) {
  std::vector<double> n(features.rows);
  for (std::size_t i = 0; i < features.rows; ++i) n[i] = l2_norm(features.row(i));
  return n;
}

std::vector<Candidate> collect_candidates(const ann::AnnIndex& index, std::size_t k) {
  const FeatureMatrix& data = index.data();
  std::vector<std::vector<Candidate>> per_row(data.rows);
  parallel_for(data.rows, [&](std::size_t i) {
    auto nbrs = index.knn(data.row(i), k + 1);
    auto& out = per_row[i];
    for (const auto& nb : nbrs) {
      if (nb.index == i) continue;
      if (out.size() == k) break;
      out.push_back({static_cast<std::uint32_t>(i), nb.index, nb.distance});
    }
  });
  std::vector<Candidate> all;
  for (auto& r : per_row) all.insert(all.end(), r.begin(), r.end());
  return all;
}

std::vector<MatchPair> threshold_candidates(std::span<const Candidate> candidates, std::span<const double> row_norms,
                                            double max_norm, double tau) {
  std::vector<MatchPair> pairs;
  for (const auto& c : candidates) {
    if (c.query == c.neighbor) continue;
    if (c.distance <= query_threshold(row_norms[c.query], max_norm, tau))
      pairs.push_back({std::min(c.query, c.neighbor), std::max(c.query, c.neighbor), c.distance});
  }
  std::sort(pairs.begin(), pairs.end(), [](const MatchPair& x, const MatchPair& y) {
    return std::tie(x.a, x.b, x.distance) < std::tie(y.a, y.b, y.distance);
  });
  pairs.erase(std::unique(pairs.begin(), pairs.end(),
                          [](const MatchPair& x, const MatchPair& y) { return x.a == y.a && x.b == y.b; }),
              pairs.end());
  return pairs;
}

std::vector<MatchPair> match_all(const ann::AnnIndex& index, const correlogram::CollectionMaxFeature& fmax, double tau,
                                 std::size_t k) {
  const auto cands = collect_candidates(index, k);
  const auto norms = row_norms(index.data());
  return threshold_candidates(cands, norms, fmax.l2_norm, tau);
}

UnionFind::UnionFind(std::size_t n) : parent_(n), rank_(n, 0) {
  for (std::size_t i = 0; i < n; ++i) parent_[i] = static_cast<std::uint32_t>(i);
}

std::vector<std::vector<std::uint32_t>> close_clusters(std::span<const MatchPair> pairs) {
  std::uint32_t n = 0;
  for (const auto& p : pairs) n = std::max({n, p.a + 1, p.b + 1});
  UnionFind uf(n);
  std::vector<std::uint8_t> touched(n, 0);
  for (const auto& p : pairs) {
    uf.unite(p.a, p.b);
    touched[p.a] = touched[p.b] = 1;
  }
  // Scanning rows in increasing order gives sorted members and orders
  // components by their smallest member. Sizes first so every component is
  // allocated once.
  std::vector<std::uint32_t> slot(n, 0), size;
  for (std::uint32_t i = 0; i < n; ++i) {
    if (!touched[i]) continue;
    const std::uint32_t r = uf.find(i);
    if (!slot[r]) {
      size.push_back(0);
      slot[r] = static_cast<std::uint32_t>(size.size());
    }
    ++size[slot[r] - 1];
  }
  std::vector<std::vector<std::uint32_t>> out(size.size());
  for (std::size_t c = 0; c < out.size(); ++c) out[c].reserve(size[c]);
  for (std::uint32_t i = 0; i < n; ++i)
    if (touched[i]) out[slot[uf.find(i)] - 1].push_back(i);
  return out;
}

MemeCluster resolve_cluster(std::vector<FrameKey> members, const corpus::Corpus& corpus) {
  MemeCluster c;
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  c.members = std::move(members);
  const auto& videos = corpus.videos();
  bool first = true;
  for (const auto& m : c.members) {
    if (m.video >= videos.size()) throw InvalidArgument("cluster member references unknown video index");
    c.videos.push_back(m.video);
    c.authors.push_back(static_cast<std::uint32_t>(corpus.author_of(m.video)));
    const Timestamp t = videos[m.video].upload_time;
    c.onset_time = first ? t : std::min(c.onset_time, t);
    c.last_time = first ? t : std::max(c.last_time, t);
    first = false;
  }
  std::sort(c.videos.begin(), c.videos.end());
  c.videos.erase(std::unique(c.videos.begin(), c.videos.end()), c.videos.end());
  std::sort(c.authors.begin(), c.authors.end());
  c.authors.erase(std::unique(c.authors.begin(), c.authors.end()), c.authors.end());
  return c;
}

std::vector<MemeCluster> filter_clusters(std::span<const std::vector<std::uint32_t>> components,
                                         std::span<const FrameKey> frames, const corpus::Corpus& corpus) {
  std::vector<MemeCluster> kept;
  for (const auto& comp : components) {
    std::vector<FrameKey> members;
    members.reserve(comp.size());
    for (auto row : comp) {
      if (row >= frames.size()) throw InvalidArgument("filter_clusters: unresolvable frame row " + std::to_string(row));
      members.push_back(frames[row]);
    }
    MemeCluster c = resolve_cluster(std::move(members), corpus);
    if (c.videos.size() >= 2 && c.authors.size() >= 2) kept.push_back(std::move(c));
  }
  std::sort(kept.begin(), kept.end(), [](const MemeCluster& x, const MemeCluster& y) {
    return std::tie(x.onset_time, x.members.front()) < std::tie(y.onset_time, y.members.front());
  });
  for (std::size_t i = 0; i < kept.size(); ++i) kept[i].meme_id = static_cast<std::uint32_t>(i);
  return kept;
}

namespace {

DetectionScores finish(std::size_t tp, std::size_t fp, std::size_t fn) {
  if (tp + fn == 0) throw InvalidArgument("evaluate: labels contain no positive pairs, recall undefined");
  DetectionScores s;
  s.true_pos = tp;
  s.false_pos = fp;
  s.false_neg = fn;
  s.precision = tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  s.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  s.f1 = s.precision + s.recall > 0 ? 2 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  return s;
}

std::uint64_t pair_key(std::uint32_t a, std::uint32_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

DetectionScores evaluate_pairs(std::span<const MatchPair> pairs, std::span<const LabeledPair> labels) {
  std::vector<std::uint64_t> keys;
  keys.reserve(pairs.size());
  for (const auto& p : pairs) keys.push_back(pair_key(p.a, p.b));
  std::sort(keys.begin(), keys.end());
  std::size_t tp = 0, fp = 0, fn = 0;
  for (const auto& l : labels) {
    const bool hit = std::binary_search(keys.begin(), keys.end(), pair_key(l.a, l.b));
    if (l.duplicate) (hit ? tp : fn) += 1;
    else if (hit) ++fp;
  }
  return finish(tp, fp, fn);
}

DetectionScores evaluate_clusters(std::span<const std::vector<std::uint32_t>> components, std::size_t rows,
                                  std::span<const LabeledPair> labels) {
  std::vector<std::int64_t> comp(rows, -1);
  for (std::size_t c = 0; c < components.size(); ++c)
    for (auto r : components[c])
      if (r < rows) comp[r] = static_cast<std::int64_t>(c);
  std::size_t tp = 0, fp = 0, fn = 0;
  for (const auto& l : labels) {
    const bool hit = l.a < rows && l.b < rows && comp[l.a] >= 0 && comp[l.a] == comp[l.b];
    if (l.duplicate) (hit ? tp : fn) += 1;
    else if (hit) ++fp;
  }
  return finish(tp, fp, fn);
}

std::vector<OperatingPoint> sweep_tau(std::span<const Candidate> candidates, std::span<const double> row_norms,
                                      double max_norm, std::span<const double> taus, std::span<const LabeledPair> labels) {
  std::size_t rows = row_norms.size();
  std::vector<OperatingPoint> curve;
  for (double tau : taus) {
    const auto pairs = threshold_candidates(candidates, row_norms, max_norm, tau);
    const auto comps = close_clusters(pairs);
    curve.push_back({tau, evaluate_pairs(pairs, labels), evaluate_clusters(comps, rows, labels)});
  }
  return curve;
}

void write_clusters_jsonl(const std::string& path, std::span<const MemeCluster> clusters, const corpus::Corpus& corpus) {
  std::ostringstream out;
  for (const auto& c : clusters) {
    json members = json::array();
    for (const auto& m : c.members) members.push_back({{"video_id", corpus.videos()[m.video].video_id}, {"shot", m.shot}});
    out << json{{"meme_id", c.meme_id},
                {"members", members},
                {"onset_time", format_iso8601(c.onset_time)},
                {"last_time", format_iso8601(c.last_time)}}
               .dump()
        << '\n';
  }
  write_text_file(path, out.str());
}

std::vector<MemeCluster> read_clusters_jsonl(const std::string& path, const corpus::Corpus& corpus) {
  std::istringstream in(read_text_file(path));
  std::string line;
  std::size_t n = 0;
  std::vector<MemeCluster> out;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(n, e.what());
    }
    std::vector<FrameKey> members;
    for (const auto& m : rec.at("members")) {
      auto v = corpus.find_video(m.at("video_id").get<std::string>());
      if (!v) throw ParseError(n, "cluster member references unknown video '" + m.at("video_id").get<std::string>() + "'");
      members.push_back({static_cast<std::uint32_t>(*v), m.at("shot").get<int>()});
    }
    MemeCluster c = resolve_cluster(std::move(members), corpus);
    c.meme_id = rec.at("meme_id").get<std::uint32_t>();
    out.push_back(std::move(c));
  }
  return out;
}

void write_pairs_csv(const std::string& path, std::span<const MatchPair> pairs, std::span<const FrameKey> frames,
                     const corpus::Corpus& corpus) {
  std::ostringstream out;
  out.precision(9);
  out << "video_a,shot_a,video_b,shot_b,distance\n";
  for (const auto& p : pairs) {
    const auto& fa = frames[p.a];
    const auto& fb = frames[p.b];
    out << corpus.videos()[fa.video].video_id << ',' << fa.shot << ',' << corpus.videos()[fb.video].video_id << ','
        << fb.shot << ',' << p.distance << '\n';
  }
  write_text_file(path, out.str());
}

std::vector<LabeledPair> read_labels_csv(const std::string& path, std::span<const FrameKey> frames,
                                         const corpus::Corpus& corpus) {
  std::map<FrameKey, std::uint32_t> row_of;
  for (std::size_t i = 0; i < frames.size(); ++i) row_of.emplace(frames[i], static_cast<std::uint32_t>(i));
  std::istringstream in(read_text_file(path));
  std::string line;
  std::size_t n = 0;
  std::vector<LabeledPair> out;
  std::size_t skipped = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty() || line.rfind("video_a", 0) == 0) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cols.push_back(cell);
    if (cols.size() != 5) throw ParseError(n, "expected video_a,shot_a,video_b,shot_b,label");
    auto va = corpus.find_video(cols[0]);
    auto vb = corpus.find_video(cols[2]);
    if (!va || !vb) throw ParseError(n, "label references unknown video");
    auto ra = row_of.find({static_cast<std::uint32_t>(*va), std::stoi(cols[1])});
    auto rb = row_of.find({static_cast<std::uint32_t>(*vb), std::stoi(cols[3])});
    if (ra == row_of.end() || rb == row_of.end()) {
      ++skipped;  // frame without a feature row (blank or missing)
      continue;
    }
    out.push_back({ra->second, rb->second, std::stoi(cols[4]) != 0});
  }
  if (skipped) log_warn(std::to_string(skipped) + " labeled pair(s) reference frames without features; skipped");
  return out;
}

}  // namespace vmeme::memedetect

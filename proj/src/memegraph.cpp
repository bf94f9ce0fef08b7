#include "vmeme/memegraph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

namespace vmeme::memegraph {

using memedetect::MemeCluster;

WeightVariant parse_weight_variant(const std::string& name) {
  if (name == "star" || name == "omega_star") return WeightVariant::Star;
  if (name == "prime" || name == "omega_prime") return WeightVariant::Prime;
  throw InvalidArgument("unknown weight variant '" + name + "' (expected star or prime)");
}

std::string to_string(WeightVariant v) { return v == WeightVariant::Star ? "star" : "prime"; }

MemeIncidence incidence(std::span<const MemeCluster> clusters, std::size_t videos, const corpus::Corpus& corpus,
                        Timestamp upto) {
  MemeIncidence inc;
  std::uint32_t max_id = 0;
  for (const auto& c : clusters) max_id = std::max(max_id, c.meme_id);
  inc.videos_of_meme.resize(clusters.empty() ? 0 : max_id + 1);
  inc.memes_of_video.resize(videos);
  for (const auto& c : clusters) {
    auto& list = inc.videos_of_meme[c.meme_id];
    for (auto v : c.videos) {
      if (v >= videos) throw InvalidArgument("cluster references unknown video index");
      if (corpus.videos()[v].upload_time > upto) continue;
      list.push_back(v);
      inc.memes_of_video[v].push_back(c.meme_id);
    }
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  for (auto& m : inc.memes_of_video) {
    std::sort(m.begin(), m.end());
    m.erase(std::unique(m.begin(), m.end()), m.end());
  }
  return inc;
}

VideoGraph build_video_graph(std::span<const MemeCluster> clusters, const corpus::Corpus& corpus, double eta,
                             Timestamp upto) {
  const auto& docs = corpus.videos();
  const auto inc = incidence(clusters, docs.size(), corpus, upto);
  VideoGraph g;
  g.eta = eta;
  std::vector<std::uint64_t> keys;
  for (const auto& vids : inc.videos_of_meme) {
    for (std::size_t i = 0; i < vids.size(); ++i)
      for (std::size_t j = i + 1; j < vids.size(); ++j) {
        std::uint32_t a = vids[i], b = vids[j];
        const Timestamp ta = docs[a].upload_time, tb = docs[b].upload_time;
        if (ta == tb) {
          ++g.simultaneous_pairs;
          continue;
        }
        if (tb < ta) std::swap(a, b);
        keys.push_back((static_cast<std::uint64_t>(a) << 32) | b);
      }
  }
  std::sort(keys.begin(), keys.end());
  for (std::size_t v = 0; v < docs.size(); ++v)
    if (!inc.memes_of_video[v].empty()) g.nodes.push_back(static_cast<std::uint32_t>(v));
  for (std::size_t i = 0; i < keys.size();) {
    std::size_t j = i;
    while (j < keys.size() && keys[j] == keys[i]) ++j;
    VideoEdge e;
    e.src = static_cast<std::uint32_t>(keys[i] >> 32);
    e.dst = static_cast<std::uint32_t>(keys[i] & 0xffffffffu);
    e.nu = static_cast<std::uint32_t>(j - i);
    e.dt_days = std::max(kMinDeltaDays,
                         static_cast<double>(docs[e.dst].upload_time - docs[e.src].upload_time) / kSecondsPerDay);
    e.omega_star = e.nu;
    e.omega_prime = e.nu * std::pow(e.dt_days, -eta);
    g.edges.push_back(e);
    i = j;
  }
  if (g.simultaneous_pairs)
    log_info("video graph: " + std::to_string(g.simultaneous_pairs) + " same-timestamp meme co-post(s) left unlinked");
  return g;
}

AuthorGraph build_author_graph(const VideoGraph& vg, const corpus::Corpus& corpus, WeightVariant variant) {
  AuthorGraph ag;
  std::set<std::uint32_t> nodes;
  for (auto v : vg.nodes) nodes.insert(static_cast<std::uint32_t>(corpus.author_of(v)));
  ag.nodes.assign(nodes.begin(), nodes.end());
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> theta;
  for (const auto& e : vg.edges) {
    auto r = static_cast<std::uint32_t>(corpus.author_of(e.src));
    auto s = static_cast<std::uint32_t>(corpus.author_of(e.dst));
    if (r == s) continue;
    if (r > s) std::swap(r, s);
    theta[{r, s}] += e.weight(variant);
  }
  for (const auto& [k, w] : theta) ag.edges.push_back({k.first, k.second, w});
  return ag;
}

namespace {

std::uint32_t local_index(const std::vector<std::uint32_t>& nodes, std::uint32_t id) {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), id);
  if (it == nodes.end() || *it != id) throw InvalidArgument("edge endpoint is not a graph node");
  return static_cast<std::uint32_t>(it - nodes.begin());
}

}  // namespace

graph::Adjacency adjacency(const VideoGraph& vg) {
  graph::Adjacency a(vg.nodes.size(), true);
  for (const auto& e : vg.edges) a.add_edge(local_index(vg.nodes, e.src), local_index(vg.nodes, e.dst));
  a.finalize();
  return a;
}

graph::Adjacency adjacency(const AuthorGraph& ag) {
  graph::Adjacency a(ag.nodes.size(), false);
  for (const auto& e : ag.edges) a.add_edge(local_index(ag.nodes, e.a), local_index(ag.nodes, e.b));
  a.finalize();
  return a;
}

bool is_acyclic(const VideoGraph& vg) {
  const auto a = adjacency(vg);
  const std::size_t n = a.size();
  std::vector<std::size_t> indeg(n);
  for (std::size_t v = 0; v < n; ++v) indeg[v] = a.in(v).size();
  std::vector<std::uint32_t> ready;
  for (std::size_t v = 0; v < n; ++v)
    if (!indeg[v]) ready.push_back(static_cast<std::uint32_t>(v));
  std::size_t seen = 0;
  while (!ready.empty()) {
    const auto v = ready.back();
    ready.pop_back();
    ++seen;
    for (auto w : a.out(v))
      if (--indeg[w] == 0) ready.push_back(w);
  }
  return seen == n;
}

InfluenceRecord influence_indices(std::span<const MemeCluster> clusters, const corpus::Corpus& corpus, Timestamp upto) {
  const auto& docs = corpus.videos();
  const auto inc = incidence(clusters, docs.size(), corpus, upto);
  InfluenceRecord r;
  r.chi.assign(docs.size(), 0.0);
  for (std::uint32_t meme = 0; meme < inc.videos_of_meme.size(); ++meme) {
    const auto& vids = inc.videos_of_meme[meme];
    std::vector<Timestamp> times;
    for (auto v : vids) times.push_back(docs[v].upload_time);
    std::sort(times.begin(), times.end());
    for (auto v : vids) {
      const Timestamp t = docs[v].upload_time;
      VideoMemeInfluence z;
      z.video = v;
      z.meme = meme;
      z.zeta_in = static_cast<std::uint32_t>(std::lower_bound(times.begin(), times.end(), t) - times.begin());
      z.zeta_out = static_cast<std::uint32_t>(times.end() - std::upper_bound(times.begin(), times.end(), t));
      r.chi[v] += static_cast<double>(z.zeta_out) / (1.0 + z.zeta_in);
      r.pairs.push_back(z);
    }
  }

  const std::size_t authors = corpus.authors().size();
  r.chi_hat.assign(authors, 0.0);
  r.chi_bar.assign(authors, 0.0);
  std::vector<std::size_t> videos_in_window(authors, 0);
  for (std::size_t v = 0; v < docs.size(); ++v) {
    if (docs[v].upload_time > upto) continue;
    r.chi_hat[corpus.author_of(v)] += r.chi[v];
    ++videos_in_window[corpus.author_of(v)];
  }
  for (std::size_t a = 0; a < authors; ++a)
    if (videos_in_window[a]) r.chi_bar[a] = r.chi_hat[a] / static_cast<double>(videos_in_window[a]);

  std::vector<std::set<std::uint32_t>> in(authors), out(authors);
  const auto vg = build_video_graph(clusters, corpus, kDefaultEta, upto);
  for (const auto& e : vg.edges) {
    const auto s = static_cast<std::uint32_t>(corpus.author_of(e.src));
    const auto d = static_cast<std::uint32_t>(corpus.author_of(e.dst));
    if (s == d) continue;
    out[s].insert(d);
    in[d].insert(s);
  }
  r.author_in_degree.resize(authors);
  r.author_out_degree.resize(authors);
  for (std::size_t a = 0; a < authors; ++a) {
    r.author_in_degree[a] = static_cast<std::uint32_t>(in[a].size());
    r.author_out_degree[a] = static_cast<std::uint32_t>(out[a].size());
  }
  return r;
}

std::vector<OriginalityRecord> originality_index(std::span<const MemeCluster> clusters, const corpus::Corpus& corpus) {
  const auto& docs = corpus.videos();
  std::map<std::uint32_t, OriginalityRecord> tally;
  for (const auto& c : clusters) {
    std::vector<std::pair<Timestamp, std::uint32_t>> posts;
    for (auto v : c.videos) posts.push_back({docs[v].upload_time, v});
    std::sort(posts.begin(), posts.end());
    if (posts.size() < 2) continue;
    if (posts[1].first - posts[0].first <= kOriginalityWindow) continue;
    const auto origin = static_cast<std::uint32_t>(corpus.author_of(posts[0].second));
    ++tally[origin].originated;
    std::set<std::uint32_t> reposters;
    for (std::size_t i = 1; i < posts.size(); ++i) {
      const auto a = static_cast<std::uint32_t>(corpus.author_of(posts[i].second));
      if (a != origin) reposters.insert(a);
    }
    for (auto a : reposters) ++tally[a].reposted;
  }
  std::vector<OriginalityRecord> out;
  for (auto& [a, rec] : tally) {
    rec.author = a;
    rec.index = static_cast<double>(rec.originated) / static_cast<double>(rec.originated + rec.reposted);
    out.push_back(rec);
  }
  return out;
}

double gini(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("gini: empty input");
  std::vector<double> x(values.begin(), values.end());
  for (double v : x)
    if (v < 0 || !std::isfinite(v)) throw InvalidArgument("gini: values must be finite and non-negative");
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double sum = 0, weighted = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sum += x[i];
    weighted += (2.0 * static_cast<double>(i + 1) - n - 1.0) * x[i];
  }
  if (sum <= 0) throw InvalidArgument("gini: all values are zero");
  return weighted / (n * sum);
}

ZipfFit zipf_fit(std::span<const double> frequencies, double min_count) {
  std::vector<double> lx, ly;
  for (std::size_t r = 0; r < frequencies.size(); ++r) {
    if (r > 0 && frequencies[r] > frequencies[r - 1]) throw InvalidArgument("zipf_fit: frequencies must be descending");
    if (frequencies[r] <= 0 || frequencies[r] < min_count) break;
    lx.push_back(std::log(static_cast<double>(r + 1)));
    ly.push_back(std::log(frequencies[r]));
  }
  if (lx.size() < 10) throw InvalidArgument("zipf_fit: need at least 10 ranks with positive counts");
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  ZipfFit f;
  f.exponent = -sxy / sxx;
  f.intercept = my + f.exponent * mx;
  f.ranks = lx.size();
  return f;
}

RemixStats remix_stats(std::span<const MemeCluster> clusters, const corpus::Corpus& corpus, std::size_t bins) {
  if (bins == 0) throw InvalidArgument("remix_stats: bins must be positive");
  const auto& docs = corpus.videos();
  std::vector<std::uint8_t> has(docs.size(), 0);
  for (const auto& c : clusters)
    for (auto v : c.videos) has.at(v) = 1;
  RemixStats s;
  s.videos = docs.size();
  s.videos_with_memes = static_cast<std::size_t>(std::count(has.begin(), has.end(), 1));
  s.fraction = s.videos ? static_cast<double>(s.videos_with_memes) / static_cast<double>(s.videos) : 0.0;
  std::vector<std::size_t> order(docs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return docs[a].view_count > docs[b].view_count; });
  const std::size_t nb = std::min(bins, docs.size());
  for (std::size_t b = 0; b < nb; ++b) {
    RemixBin bin;
    const std::size_t lo = docs.size() * b / nb, hi = docs.size() * (b + 1) / nb;
    bin.first_rank = lo + 1;
    bin.last_rank = hi;
    for (std::size_t i = lo; i < hi; ++i) {
      ++bin.videos;
      bin.with_memes += has[order[i]];
    }
    bin.fraction = bin.videos ? static_cast<double>(bin.with_memes) / static_cast<double>(bin.videos) : 0.0;
    s.by_view_rank.push_back(bin);
  }
  return s;
}

void write_video_edges_csv(const std::string& path, const VideoGraph& vg, const corpus::Corpus& corpus) {
  std::ostringstream out;
  out.precision(10);
  out << "src,dst,nu,omega_star,omega_prime,dt_days\n";
  for (const auto& e : vg.edges)
    out << corpus.videos()[e.src].video_id << ',' << corpus.videos()[e.dst].video_id << ',' << e.nu << ','
        << e.omega_star << ',' << e.omega_prime << ',' << e.dt_days << '\n';
  write_text_file(path, out.str());
}

void write_author_edges_csv(const std::string& path, const AuthorGraph& ag, const corpus::Corpus& corpus) {
  std::ostringstream out;
  out.precision(10);
  out << "a,b,theta\n";
  for (const auto& e : ag.edges)
    out << corpus.authors()[e.a].author_id << ',' << corpus.authors()[e.b].author_id << ',' << e.theta << '\n';
  write_text_file(path, out.str());
}

void write_influence_csv(const std::string& path, const InfluenceRecord& inf, const corpus::Corpus& corpus) {
  std::ostringstream out;
  out.precision(10);
  out << "author_id,productivity,chi_hat,chi_bar,in_degree,out_degree\n";
  for (std::size_t a = 0; a < corpus.authors().size(); ++a)
    out << corpus.authors()[a].author_id << ',' << corpus.authors()[a].productivity() << ',' << inf.chi_hat[a] << ','
        << inf.chi_bar[a] << ',' << inf.author_in_degree[a] << ',' << inf.author_out_degree[a] << '\n';
  write_text_file(path, out.str());
}

void write_originality_csv(const std::string& path, std::span<const OriginalityRecord> records,
                           const corpus::Corpus& corpus) {
  std::ostringstream out;
  out.precision(10);
  out << "author_id,originated,reposted,originality\n";
  for (const auto& r : records)
    out << corpus.authors()[r.author].author_id << ',' << r.originated << ',' << r.reposted << ',' << r.index << '\n';
  write_text_file(path, out.str());
}

}  // namespace vmeme::memegraph

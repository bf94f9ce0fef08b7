#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "vmeme/ann.hpp"
#include "vmeme/memedetect.hpp"
#include "vmeme/synth.hpp"

using namespace vmeme;
using namespace vmeme::memedetect;

namespace {

struct Planted {
  std::shared_ptr<FeatureMatrix> features;
  std::vector<int> group;
};

Planted planted_features(std::size_t frames, std::size_t groups, std::uint64_t seed) {
  const auto set = synth::planted_frames(frames, groups, seed);
  Planted p{std::make_shared<FeatureMatrix>(0, correlogram::kDim), {}};
  for (std::size_t i = 0; i < set.frames.size(); ++i) {
    const auto prep = imgproc::prepare_frame(set.frames[i]);
    if (prep.blank) continue;
    p.features->append(correlogram::to_floats(correlogram::extract(prep, correlogram::default_distances())));
    p.group.push_back(set.group[i]);
  }
  return p;
}

corpus::Corpus toy_corpus(const std::vector<std::pair<std::string, std::string>>& video_author) {
  std::vector<corpus::VideoDoc> docs;
  Timestamp t = 1'000'000;
  for (const auto& [v, a] : video_author) {
    corpus::VideoDoc d;
    d.video_id = v;
    d.author_id = a;
    d.upload_time = t += 3600;
    docs.push_back(d);
  }
  return corpus::Corpus::from_videos(std::move(docs));
}

}  // namespace

TEST_CASE("small index is exact") {
  auto data = std::make_shared<FeatureMatrix>(4, 3);
  const float v[] = {0, 0, 0, 1, 0, 0, 0, 2, 0, 5, 5, 5};
  std::copy(std::begin(v), std::end(v), data->values.begin());
  for (auto kind : {ann::IndexKind::KdForest, ann::IndexKind::KMeansTree, ann::IndexKind::Linear}) {
    ann::IndexParams p;
    p.kind = kind;
    p.budget = 4;
    const auto idx = ann::AnnIndex::build(data, p);
    const std::vector<float> q{0.9f, 0.1f, 0};
    const auto got = idx.knn(q, 4);
    const auto want = oracle::knn(*data, q, 4);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].index == want[i].index);
      CHECK(got[i].distance == doctest::Approx(want[i].distance));
    }
  }
  CHECK_THROWS_AS(ann::AnnIndex::build(std::make_shared<FeatureMatrix>(1, 3)), InvalidArgument);
  const auto idx = ann::AnnIndex::build(data);
  CHECK_THROWS_AS(idx.knn(std::vector<float>(2), 1), InvalidArgument);
  CHECK_THROWS_AS(ann::parse_index_kind("octree"), InvalidArgument);
}

TEST_CASE("approximate search recall on clustered data") {
  auto data = std::make_shared<FeatureMatrix>(synth::clustered_features(3000, 64, 30, 4));
  for (auto kind : {ann::IndexKind::KdForest, ann::IndexKind::KMeansTree}) {
    ann::IndexParams p;
    p.kind = kind;
    p.seed = 3;
    const auto idx = ann::AnnIndex::build(data, p);
    CHECK(idx.budget() == 55);
    double hit = 0;
    for (std::uint32_t q = 0; q < 100; ++q) {
      const auto got = idx.knn(data->row(q * 29), 10);
      const auto want = oracle::knn(*data, data->row(q * 29), 10);
      std::set<std::uint32_t> w;
      for (const auto& n : want) w.insert(n.index);
      for (const auto& n : got) hit += w.count(n.index);
    }
    CHECK(hit / 1000.0 >= 0.9);
  }
  // Full budget is exact for every kind.
  ann::IndexParams p;
  p.budget = data->rows;
  const auto idx = ann::AnnIndex::build(data, p);
  for (std::uint32_t q = 0; q < 20; ++q) {
    const auto got = idx.knn(data->row(q), 10);
    const auto want = oracle::knn(*data, data->row(q), 10);
    for (std::size_t i = 0; i < 10; ++i) CHECK(got[i].index == want[i].index);
  }
}

TEST_CASE("query threshold") {
  CHECK(query_threshold(3.0, 3.0, 11.5) == 11.5);
  CHECK(query_threshold(0.5, 2.0, 8.0) == 2.0);
  CHECK_THROWS_AS(query_threshold(1.0, 0.0, 1.0), InvalidArgument);
}

TEST_CASE("matching simple configurations") {
  SUBCASE("identical frames pair at distance zero") {
    auto data = std::make_shared<FeatureMatrix>(3, correlogram::kDim);
    data->row(0)[3] = 1;
    data->row(1)[3] = 1;
    data->row(2)[100] = 1;
    correlogram::CollectionMaxFeature fmax = correlogram::collection_max(*data);
    const auto pairs = match_all(ann::AnnIndex::build(data), fmax, 0.5, 2);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].a == 0);
    CHECK(pairs[0].b == 1);
    CHECK(pairs[0].distance == 0.0);
  }
  SUBCASE("orthogonal unit features stay apart") {
    auto data = std::make_shared<FeatureMatrix>(2, correlogram::kDim);
    data->row(0)[0] = 1;
    data->row(1)[1] = 1;
    const auto pairs = match_all(ann::AnnIndex::build(data), correlogram::collection_max(*data), 0.5, 1);
    CHECK(pairs.empty());
  }
}

TEST_CASE("union-find closure") {
  const std::vector<MatchPair> chain{{0, 1, 0}, {1, 2, 0}};
  const auto c = close_clusters(chain);
  REQUIRE(c.size() == 1);
  CHECK(c[0] == std::vector<std::uint32_t>{0, 1, 2});
  CHECK(close_clusters(std::vector<MatchPair>{}).empty());

  std::mt19937_64 rng(6);
  const std::size_t n = 8000;
  std::uniform_int_distribution<std::uint32_t> node(0, n - 1);
  std::vector<MatchPair> pairs;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (int i = 0; i < 10000; ++i) {
    auto a = node(rng), b = node(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    pairs.push_back({a, b, 0});
    edges.emplace_back(a, b);
  }
  const auto comps = close_clusters(pairs);
  const auto want = oracle::components(n, edges);
  std::vector<std::uint32_t> got(n);
  for (std::uint32_t i = 0; i < n; ++i) got[i] = i;
  std::size_t touched = 0;
  for (const auto& comp : comps) {
    touched += comp.size();
    CHECK(std::is_sorted(comp.begin(), comp.end()));
    for (auto v : comp) got[v] = comp.front();
  }
  CHECK(got == want);
  std::set<std::uint32_t> endpoints;
  for (const auto& [a, b] : edges) endpoints.insert({a, b});
  CHECK(touched == endpoints.size());
  for (std::size_t i = 1; i < comps.size(); ++i) CHECK(comps[i - 1].front() < comps[i].front());
}

TEST_CASE("cluster filter rules") {
  const auto c = toy_corpus({{"v0", "a"}, {"v1", "a"}, {"v2", "b"}});
  const std::vector<FrameKey> frames{{0, 0}, {0, 1}, {0, 2}, {1, 0}, {2, 0}};
  const std::vector<std::vector<std::uint32_t>> single_video{{0, 1, 2}};
  CHECK(filter_clusters(single_video, frames, c).empty());
  const std::vector<std::vector<std::uint32_t>> single_author{{0, 3}};
  CHECK(filter_clusters(single_author, frames, c).empty());
  const std::vector<std::vector<std::uint32_t>> kept{{3, 4}, {0, 4}};
  const auto out = filter_clusters(kept, frames, c);
  REQUIRE(out.size() == 2);
  // Numbered by onset time: v0 is older than v1.
  CHECK(out[0].meme_id == 0);
  CHECK(out[0].videos == std::vector<std::uint32_t>{0, 2});
  CHECK(out[1].videos == std::vector<std::uint32_t>{1, 2});
  CHECK(out[0].onset_time == c.videos()[0].upload_time);
  CHECK(out[0].last_time == c.videos()[2].upload_time);
  const std::vector<std::vector<std::uint32_t>> bad{{0, 99}};
  CHECK_THROWS_AS(filter_clusters(bad, frames, c), InvalidArgument);
}

TEST_CASE("pair evaluation conventions") {
  const std::vector<LabeledPair> labels{{0, 1, true}, {1, 2, true}, {0, 3, false}, {2, 3, false}};
  const std::vector<MatchPair> perfect{{0, 1, 0}, {1, 2, 0}};
  auto s = evaluate_pairs(perfect, labels);
  CHECK(s.precision == 1.0);
  CHECK(s.recall == 1.0);
  CHECK(s.f1 == 1.0);
  s = evaluate_pairs(std::vector<MatchPair>{}, labels);
  CHECK(s.precision == 1.0);
  CHECK(s.recall == 0.0);
  const std::vector<MatchPair> one_wrong{{0, 1, 0}, {0, 3, 0}};
  s = evaluate_pairs(one_wrong, labels);
  CHECK(s.precision == 0.5);
  CHECK(s.recall == 0.5);
  const std::vector<LabeledPair> negatives{{0, 3, false}};
  CHECK_THROWS_AS(evaluate_pairs(perfect, negatives), InvalidArgument);

  // Cluster scoring counts transitive membership.
  const std::vector<std::vector<std::uint32_t>> comps{{0, 1, 2}};
  s = evaluate_clusters(comps, 4, labels);
  CHECK(s.recall == 1.0);
  CHECK(s.precision == 1.0);
}

TEST_CASE("planted corpus detection agrees with the brute-force closure") {
  const auto p = planted_features(200, 20, 17);
  const auto fmax = correlogram::collection_max(*p.features);

  ann::IndexParams exact;
  exact.budget = p.features->rows;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> oracle_pairs;
  const auto want = oracle::threshold_closure(*p.features, kDefaultTau, &oracle_pairs);

  auto labels_of = [&](const std::vector<MatchPair>& pairs) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> e;
    for (const auto& m : pairs) e.emplace_back(m.a, m.b);
    return oracle::components(p.features->rows, e);
  };

  const auto full = match_all(ann::AnnIndex::build(p.features, exact), fmax, kDefaultTau);
  CHECK(full.size() == oracle_pairs.size());
  CHECK(labels_of(full) == want);

  const auto approx = match_all(ann::AnnIndex::build(p.features), fmax, kDefaultTau);
  CHECK(oracle::pair_f1(want, labels_of(approx)) >= 0.95);

  // Threshold sweep is monotone in recall.
  const auto cands = collect_candidates(ann::AnnIndex::build(p.features, exact), kDefaultKnn);
  std::vector<LabeledPair> labels;
  for (std::uint32_t i = 0; i < p.group.size(); ++i)
    for (std::uint32_t j = i + 1; j < p.group.size(); ++j)
      if (p.group[i] >= 0 && p.group[i] == p.group[j]) labels.push_back({i, j, true});
      else if ((i * 31 + j) % 17 == 0) labels.push_back({i, j, false});
  const std::vector<double> taus{2, 5, 8, 11.5, 15, 22};
  const auto sweep = sweep_tau(cands, row_norms(*p.features), fmax.l2_norm, taus, labels);
  REQUIRE(sweep.size() == taus.size());
  for (std::size_t i = 1; i < sweep.size(); ++i) CHECK(sweep[i].pairs.recall >= sweep[i - 1].pairs.recall);
  const auto at = std::find_if(sweep.begin(), sweep.end(), [](const auto& o) { return o.tau == kDefaultTau; });
  CHECK(at->pairs.precision >= 0.95);
  CHECK(at->pairs.recall >= 0.7);
}

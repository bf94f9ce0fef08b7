#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "vmeme/centrality.hpp"
#include "vmeme/memegraph.hpp"

using namespace vmeme;
using namespace vmeme::memegraph;

namespace {

std::size_t author(const fixture::Cascade& c, const std::string& id) { return *c.corpus.find_author(id); }

graph::Adjacency make_graph(std::size_t n, bool directed, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& e) {
  graph::Adjacency g(n, directed);
  for (auto [a, b] : e) g.add_edge(a, b);
  g.finalize();
  return g;
}

void check_against_oracle(std::size_t n, bool directed, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& e) {
  const auto got = graph::centralities(make_graph(n, directed, e));
  const auto want = oracle::centrality(n, directed, e);
  for (std::size_t v = 0; v < n; ++v) {
    CHECK(std::abs(got.degree[v] - want.degree[v]) <= 1e-9);
    CHECK(std::abs(got.closeness[v] - want.closeness[v]) <= 1e-9);
    CHECK(std::abs(got.betweenness[v] - want.betweenness[v]) <= 1e-9);
  }
}

}  // namespace

TEST_CASE("video edges follow upload order") {
  // A on day 1 and B on day 3 share two memes.
  const auto c = fixture::cascade({{"a", 1}, {"b", 3}}, {{0, 1}, {0, 1}});
  const auto g = build_video_graph(c.clusters, c.corpus);
  REQUIRE(g.edges.size() == 1);
  CHECK(g.edges[0].src == 0);
  CHECK(g.edges[0].dst == 1);
  CHECK(g.edges[0].nu == 2);
  CHECK(g.edges[0].omega_star == 2.0);
  CHECK(g.edges[0].omega_prime == doctest::Approx(2.0 * std::pow(2.0, -0.7654)));
  CHECK(g.edges[0].omega_prime == doctest::Approx(1.176).epsilon(1e-3));

  const auto reversed = fixture::cascade({{"a", 3}, {"b", 1}}, {{0, 1}});
  const auto r = build_video_graph(reversed.clusters, reversed.corpus);
  REQUIRE(r.edges.size() == 1);
  CHECK(r.edges[0].src == 1);
  CHECK(r.edges[0].dst == 0);

  const auto none = fixture::cascade({{"a", 1}, {"b", 2}, {"c", 3}}, {{0, 1}});
  CHECK(build_video_graph(none.clusters, none.corpus).edges.size() == 1);

  const auto tie = fixture::cascade({{"a", 1}, {"b", 1}}, {{0, 1}});
  const auto t = build_video_graph(tie.clusters, tie.corpus);
  CHECK(t.edges.empty());
  CHECK(t.simultaneous_pairs == 1);

  // Near-simultaneous posts use the one-hour floor.
  const auto close = fixture::cascade({{"a", 1}, {"b", 1.001}}, {{0, 1}});
  const auto cl = build_video_graph(close.clusters, close.corpus);
  CHECK(cl.edges[0].dt_days == kMinDeltaDays);
  CHECK(std::isfinite(cl.edges[0].omega_prime));
}

TEST_CASE("author graph accumulates video edges") {
  SUBCASE("single edge") {
    const auto c = fixture::cascade({{"r", 1}, {"s", 2}}, {{0, 1}, {0, 1}, {0, 1}});
    const auto ag = build_author_graph(build_video_graph(c.clusters, c.corpus), c.corpus, WeightVariant::Star);
    REQUIRE(ag.edges.size() == 1);
    CHECK(ag.edges[0].theta == 3.0);
  }
  SUBCASE("both directions") {
    // r -> s with one meme, s -> r with two.
    const auto c = fixture::cascade({{"r", 1}, {"s", 2}, {"s", 3}, {"r", 4}}, {{0, 1}, {2, 3}, {2, 3}});
    const auto ag = build_author_graph(build_video_graph(c.clusters, c.corpus), c.corpus, WeightVariant::Star);
    REQUIRE(ag.edges.size() == 1);
    CHECK(ag.edges[0].theta == 3.0);
  }
  SUBCASE("random graph against a double loop") {
    std::mt19937_64 rng(14);
    std::uniform_int_distribution<int> who(0, 9), day(0, 20);
    std::vector<fixture::Posting> posts;
    for (int i = 0; i < 50; ++i) posts.push_back({"u" + std::to_string(who(rng)), day(rng) + 0.25 * (i % 4)});
    std::vector<std::vector<std::uint32_t>> memes(15);
    std::uniform_int_distribution<std::uint32_t> vid(0, 49);
    for (auto& m : memes) {
      std::set<std::uint32_t> s;
      while (s.size() < 4) s.insert(vid(rng));
      m.assign(s.begin(), s.end());
    }
    const auto c = fixture::cascade(posts, memes);
    for (auto variant : {WeightVariant::Star, WeightVariant::Prime}) {
      const auto vg = build_video_graph(c.clusters, c.corpus);
      CHECK(is_acyclic(vg));
      const auto ag = build_author_graph(vg, c.corpus, variant);
      std::map<std::pair<std::size_t, std::size_t>, double> brute;
      const auto& docs = c.corpus.videos();
      for (std::size_t i = 0; i < 50; ++i)
        for (std::size_t j = 0; j < 50; ++j) {
          if (docs[i].upload_time >= docs[j].upload_time) continue;
          double nu = 0;
          for (const auto& m : memes)
            nu += std::count(m.begin(), m.end(), i) && std::count(m.begin(), m.end(), j);
          if (nu == 0) continue;
          auto r = c.corpus.author_of(i), s = c.corpus.author_of(j);
          if (r == s) continue;
          const double dt = std::max(1.0 / 24, (docs[j].upload_time - docs[i].upload_time) / 86400.0);
          brute[{std::min(r, s), std::max(r, s)}] += variant == WeightVariant::Star ? nu : nu * std::pow(dt, -0.7654);
        }
      REQUIRE(ag.edges.size() == brute.size());
      for (const auto& e : ag.edges) CHECK(e.theta == doctest::Approx(brute.at({e.a, e.b})).epsilon(1e-12));
    }
  }
}

TEST_CASE("influence indices on a three-video chain") {
  const auto c = fixture::cascade({{"a", 1}, {"b", 2}, {"c", 3}}, {{0, 1, 2}});
  const auto inf = influence_indices(c.clusters, c.corpus);
  REQUIRE(inf.pairs.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(inf.pairs[i].zeta_in == i);
    CHECK(inf.pairs[i].zeta_out == 2 - i);
  }
  CHECK(inf.chi == std::vector<double>{2.0, 0.5, 0.0});
  CHECK(inf.chi_hat[author(c, "a")] == 2.0);
  CHECK(inf.chi_bar[author(c, "a")] == 2.0);

  const auto lone = fixture::cascade({{"a", 1}, {"b", 2}, {"c", 3}}, {{0, 1}});
  CHECK(influence_indices(lone.clusters, lone.corpus).chi[2] == 0.0);
}

TEST_CASE("influence indices on a six-video cascade") {
  // meme 0: v0 v1 v3 v5; meme 1: v1 v2 v4
  const auto c = fixture::cascade({{"A", 1}, {"B", 2}, {"A", 3}, {"C", 4}, {"B", 5}, {"D", 6}}, {{0, 1, 3, 5}, {1, 2, 4}});
  const auto inf = influence_indices(c.clusters, c.corpus);
  const std::vector<double> chi{3.0, 3.0, 0.5, 1.0 / 3, 0.0, 0.0};
  for (std::size_t v = 0; v < 6; ++v) CHECK(inf.chi[v] == doctest::Approx(chi[v]).epsilon(1e-15));
  CHECK(inf.chi_hat[author(c, "A")] == 3.5);
  CHECK(inf.chi_bar[author(c, "A")] == 1.75);
  CHECK(inf.chi_hat[author(c, "B")] == 3.0);
  CHECK(inf.chi_bar[author(c, "B")] == 1.5);
  CHECK(inf.chi_hat[author(c, "C")] == doctest::Approx(1.0 / 3));
  CHECK(inf.chi_hat[author(c, "D")] == 0.0);
  // A reaches B (v0->v1), C, D; B reaches A (v1->v2), C, D.
  CHECK(inf.author_out_degree[author(c, "A")] == 3);
  CHECK(inf.author_in_degree[author(c, "D")] == 3);

  // Day-one window: only v0 (day 1) and v1 (day 2) are visible up to day 2.
  const Timestamp upto = c.corpus.videos()[1].upload_time;
  const auto early = influence_indices(c.clusters, c.corpus, upto);
  CHECK(early.chi[0] == 1.0);
  CHECK(early.chi[1] == 0.0);
  CHECK(early.chi[3] == 0.0);
}

TEST_CASE("in and out totals balance on random cascades") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> who(0, 7), day(0, 9);
  std::vector<fixture::Posting> posts;
  for (int i = 0; i < 80; ++i) posts.push_back({"u" + std::to_string(who(rng)), static_cast<double>(day(rng))});
  std::vector<std::vector<std::uint32_t>> memes(20);
  std::uniform_int_distribution<std::uint32_t> vid(0, 79);
  for (auto& m : memes) {
    std::set<std::uint32_t> s;
    while (s.size() < 6) s.insert(vid(rng));
    m.assign(s.begin(), s.end());
  }
  const auto c = fixture::cascade(posts, memes);
  const auto inf = influence_indices(c.clusters, c.corpus);
  std::map<std::uint32_t, std::pair<long, long>> totals;
  for (const auto& z : inf.pairs) {
    totals[z.meme].first += z.zeta_in;
    totals[z.meme].second += z.zeta_out;
  }
  CHECK(totals.size() == memes.size());
  for (const auto& [m, t] : totals) CHECK(t.first == t.second);
}

TEST_CASE("centralities") {
  SUBCASE("star") {
    const auto c = graph::centralities(make_graph(5, false, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}));
    CHECK(c.degree[0] == 1.0);
    CHECK(c.betweenness[0] == 1.0);
    CHECK(c.betweenness[1] == 0.0);
  }
  SUBCASE("path") {
    const auto c = graph::centralities(make_graph(3, false, {{0, 1}, {1, 2}}));
    CHECK(c.betweenness[1] == 1.0);
    CHECK(c.closeness[1] == 1.0);
    CHECK(c.closeness[0] == doctest::Approx(2.0 / 3));
  }
  SUBCASE("isolates") {
    const auto c = graph::centralities(make_graph(3, false, {{0, 1}}));
    CHECK(c.closeness[2] == 0.0);
    CHECK(c.degree[2] == 0.0);
  }
  SUBCASE("random graphs against all-pairs search") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 6; ++trial) {
      const bool directed = trial % 2;
      std::uniform_int_distribution<std::uint32_t> node(0, 29);
      std::vector<std::pair<std::uint32_t, std::uint32_t>> e;
      for (int i = 0; i < 25 + 15 * trial; ++i) {
        const auto a = node(rng), b = node(rng);
        if (a != b) e.emplace_back(a, b);
      }
      check_against_oracle(30, directed, e);
    }
  }
  SUBCASE("restriction to target components is exact") {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> e{{0, 1}, {1, 2}, {3, 4}, {4, 5}, {5, 3}};
    const auto g = make_graph(7, true, e);
    const auto all = graph::centralities(g);
    const std::vector<std::uint32_t> targets{4};
    const auto part = graph::centralities(g, targets);
    for (std::uint32_t v : {3u, 4u, 5u}) {
      CHECK(part.closeness[v] == all.closeness[v]);
      CHECK(part.betweenness[v] == all.betweenness[v]);
      CHECK(part.degree[v] == all.degree[v]);
    }
    CHECK(part.betweenness[1] == 0.0);
  }
}

TEST_CASE("originality index") {
  // A first on all three memes.
  auto c = fixture::cascade({{"A", 1}, {"B", 2}, {"A", 3}, {"C", 4}, {"A", 5}, {"B", 6}},
                            {{0, 1}, {2, 3}, {4, 5}});
  auto rec = originality_index(c.clusters, c.corpus);
  REQUIRE(rec.size() == 3);
  for (const auto& r : rec) {
    if (r.author == author(c, "A")) CHECK(r.index == 1.0);
    else CHECK(r.index == 0.0);
  }
  // First two posts thirty minutes apart: excluded.
  c = fixture::cascade({{"A", 1}, {"B", 1 + 0.5 / 24}}, {{0, 1}});
  CHECK(originality_index(c.clusters, c.corpus).empty());
}

TEST_CASE("gini") {
  CHECK(gini(std::vector<double>{3, 3, 3}) == 0.0);
  CHECK(gini(std::vector<double>{0, 0, 0, 10}) == 0.75);
  CHECK_THROWS_AS(gini(std::vector<double>{0, 0}), InvalidArgument);
  CHECK_THROWS_AS(gini(std::vector<double>{}), InvalidArgument);
  // Against the pairwise definition.
  const std::vector<double> v{1, 4, 2, 9, 0, 3};
  double diff = 0, sum = 0;
  for (double a : v) {
    sum += a;
    for (double b : v) diff += std::abs(a - b);
  }
  CHECK(gini(v) == doctest::Approx(diff / (2.0 * v.size() * sum)));
}

TEST_CASE("zipf fit") {
  std::vector<double> f;
  for (int r = 1; r <= 100; ++r) f.push_back(1000.0 * std::pow(r, -2.0));
  const auto fit = zipf_fit(f, 0.0);
  CHECK(std::abs(fit.exponent - 2.0) <= 1e-6);
  CHECK(fit.ranks == 100);
  CHECK_THROWS_AS(zipf_fit(std::vector<double>{5, 4, 3}), InvalidArgument);
  CHECK_THROWS_AS(zipf_fit(std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}), InvalidArgument);
}

TEST_CASE("remix fraction") {
  // 50 videos, 29 of them carry a meme.
  std::vector<fixture::Posting> posts;
  for (int i = 0; i < 50; ++i) posts.push_back({"u" + std::to_string(i % 5), static_cast<double>(i)});
  std::vector<std::vector<std::uint32_t>> memes;
  for (std::uint32_t v = 0; v + 1 < 29; v += 2) memes.push_back({v, v + 1});
  memes.back().push_back(28);
  const auto c = fixture::cascade(posts, memes);
  const auto s = remix_stats(c.clusters, c.corpus, 5);
  CHECK(s.videos == 50);
  CHECK(s.videos_with_memes == 29);
  CHECK(s.fraction == 0.58);
  REQUIRE(s.by_view_rank.size() == 5);
  std::size_t total = 0;
  for (const auto& b : s.by_view_rank) total += b.videos;
  CHECK(total == 50);
  CHECK(s.by_view_rank[0].fraction == 1.0);  // most viewed are the oldest
}

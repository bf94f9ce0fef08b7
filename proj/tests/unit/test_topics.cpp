#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "vmeme/topics.hpp"

using namespace vmeme;
using namespace vmeme::topics;

namespace {

JointVocabulary toy_vocab(std::size_t text, std::size_t memes) {
  JointVocabulary v;
  for (std::size_t i = 0; i < text; ++i) v.text_terms.push_back("w" + std::to_string(i));
  for (std::size_t i = 0; i < memes; ++i) v.meme_ids.push_back(static_cast<std::uint32_t>(i));
  return v;
}

double score_of(const std::vector<ScoredTerm>& s, std::uint32_t term) {
  for (const auto& t : s)
    if (t.term == term) return t.score;
  return -1;
}

}  // namespace

TEST_CASE("documents") {
  const auto d = make_document({3, 1, 3, 3, 0});
  REQUIRE(d.counts.size() == 3);
  CHECK(d.counts[2] == std::pair<std::uint32_t, std::uint32_t>{3, 3});
  CHECK(d.total() == 5);
  CHECK(d.restricted(1, 3).total() == 1);
}

TEST_CASE("single topic reduces to the unigram distribution") {
  std::vector<Document> docs{make_document({0, 0, 1}), make_document({2, 1, 0, 0})};
  LdaOptions o;
  o.k = 1;
  const auto m = fit_lda(docs, 4, o);
  CHECK(m.phi_row(0)[0] == doctest::Approx(4.0 / 7));
  CHECK(m.phi_row(0)[1] == doctest::Approx(2.0 / 7));
  CHECK(m.phi_row(0)[2] == doctest::Approx(1.0 / 7));
  CHECK(m.phi_row(0)[3] == doctest::Approx(0.0));
  for (std::size_t d = 0; d < 2; ++d) CHECK(m.theta_row(d)[0] == 1.0);
  CHECK(infer_theta(m, make_document({1})) == std::vector<double>{1.0});
}

TEST_CASE("planted disjoint topics are recovered") {
  const auto planted = fixture::disjoint_topics(600, 5, 12, 40, 0.2, 3);
  LdaOptions o;
  o.k = 5;
  o.max_iters = 60;
  o.seed = 2;
  const auto m = fit_lda(planted.docs, planted.vocab_size, o);
  std::vector<std::vector<double>> found;
  for (int k = 0; k < 5; ++k) found.emplace_back(m.phi_row(k).begin(), m.phi_row(k).end());
  std::vector<double> per_row;
  oracle::matched_cosine(planted.phi, found, &per_row);
  for (double c : per_row) CHECK(c >= 0.95);
  for (std::size_t i = 1; i < m.bound_history.size(); ++i) CHECK(m.bound_history[i] >= m.bound_history[i - 1]);

  SUBCASE("inference concentrates on the source topic") {
    // Ten words sampled from planted topic 2.
    std::mt19937_64 rng(1);
    std::discrete_distribution<std::uint32_t> draw(planted.phi[2].begin(), planted.phi[2].end());
    std::vector<std::uint32_t> words;
    for (int i = 0; i < 10; ++i) words.push_back(draw(rng));
    const auto theta = infer_theta(m, make_document(words));
    int best = 0;
    double best_cos = -1;
    for (int k = 0; k < 5; ++k) {
      const double c = oracle::cosine(planted.phi[2], found[k]);
      if (c > best_cos) best_cos = c, best = k;
    }
    CHECK(theta[best] > 0.9);
    CHECK(std::accumulate(theta.begin(), theta.end(), 0.0) == doctest::Approx(1.0));
  }
  SUBCASE("unknown words give the uniform point") {
    const auto theta = infer_theta(m, make_document({999}));
    for (double t : theta) CHECK(t == doctest::Approx(0.2));
    CHECK(infer_theta(m, Document{}) == theta);
  }
}

TEST_CASE("lda edge cases") {
  CHECK_THROWS_AS(fit_lda(std::vector<Document>{}, 3), InvalidArgument);
  std::vector<Document> docs{Document{}, make_document({0, 1})};
  LdaOptions o;
  o.k = 2;
  o.max_iters = 5;
  const auto m = fit_lda(docs, 2, o);
  CHECK(m.skipped_documents == 1);
  CHECK(m.theta_row(0)[0] == 0.5);
  const std::vector<Document> empty_only{Document{}};
  CHECK_THROWS_AS(fit_lda(empty_only, 2, o), InvalidArgument);
}

TEST_CASE("fitting is deterministic across thread counts") {
  const auto planted = fixture::disjoint_topics(200, 3, 8, 20, 0.3, 9);
  LdaOptions o;
  o.k = 3;
  o.max_iters = 10;
  set_thread_limit(1);
  const auto a = fit_lda(planted.docs, planted.vocab_size, o);
  set_thread_limit(4);
  const auto b = fit_lda(planted.docs, planted.vocab_size, o);
  set_thread_limit(0);
  CHECK(a.phi == b.phi);
  CHECK(a.theta == b.theta);
}

TEST_CASE("cm2 matches the kernel-weighted sum") {
  const auto vocab = toy_vocab(3, 2);  // text 0..2, memes 3..4
  TopicModel m;
  m.k = 2;
  m.vocab_size = 5;
  m.alpha = 0.5;
  m.phi = {0.3, 0.1, 0.1, 0.5, 0.0, 0.1, 0.3, 0.3, 0.0, 0.3};
  const std::vector<Document> docs{make_document({0, 0, 3}), make_document({1, 4}), make_document({2, 2, 2, 4}),
                                   make_document({0, 1, 2, 3})};
  const std::vector<std::vector<double>> theta{{0.9, 0.1}, {0.2, 0.8}, {0.1, 0.9}, {0.6, 0.4}};
  Cm2Query q;
  q.words = {3};
  q.candidates = Modality::Text;
  q.sigma = 0.3;
  const auto scores = cm2_score(m, theta, docs, vocab, q);
  const auto tq = infer_theta(m, make_document({3}));
  for (std::uint32_t w = 0; w < 3; ++w) {
    double expect = 0;
    for (std::size_t d = 0; d < docs.size(); ++d) {
      double c = 0;
      for (const auto& [t, n] : docs[d].counts)
        if (t == w) c = n;
      const double dist = std::pow(tq[0] - theta[d][0], 2) + std::pow(tq[1] - theta[d][1], 2);
      expect += c * std::exp(-dist / 0.3);
    }
    CHECK(score_of(scores, w) == doctest::Approx(expect).epsilon(1e-12));
  }
  CHECK(std::is_sorted(scores.begin(), scores.end(), [](auto& a, auto& b) { return a.score > b.score; }));

  SUBCASE("huge bandwidth ranks by candidate frequency") {
    q.sigma = 1e12;
    const auto s = cm2_score(m, theta, docs, vocab, q);
    CHECK(s[0].term == 2);  // four occurrences
    CHECK(score_of(s, 0) == doctest::Approx(3.0));
    CHECK(score_of(s, 1) == doctest::Approx(2.0));
  }
  SUBCASE("errors") {
    q.words.clear();
    CHECK_THROWS_AS(cm2_score(m, theta, docs, vocab, q), InvalidArgument);
    q.words = {0};
    q.candidates = Modality::Meme;
    const auto no_memes = toy_vocab(5, 0);
    CHECK_THROWS_AS(cm2_score(m, theta, docs, no_memes, q), InvalidArgument);
  }
}

TEST_CASE("co-occurrence baseline") {
  const auto vocab = toy_vocab(4, 3);  // memes 4..6
  Cm2Query q;
  q.words = {4};
  SUBCASE("single supporting document") {
    const std::vector<Document> docs{make_document({0, 0, 2, 4}), make_document({1, 5})};
    const auto s = cooccur_score(docs, vocab, q);
    CHECK(score_of(s, 0) == 2);
    CHECK(score_of(s, 2) == 1);
    CHECK(score_of(s, 1) == 0);
  }
  SUBCASE("absent query scores zero") {
    const std::vector<Document> docs{make_document({0, 5}), make_document({1, 5})};
    for (const auto& t : cooccur_score(docs, vocab, q)) CHECK(t.score == 0);
  }
  SUBCASE("random corpus against a double loop") {
    std::mt19937_64 rng(12);
    std::uniform_int_distribution<std::uint32_t> term(0, 6);
    std::vector<Document> docs;
    for (int d = 0; d < 20; ++d) {
      std::vector<std::uint32_t> t;
      for (int i = 0; i < 6; ++i) t.push_back(term(rng));
      docs.push_back(make_document(t));
    }
    q.words = {4, 6};
    const auto s = cooccur_score(docs, vocab, q);
    for (std::uint32_t w = 0; w < 4; ++w) {
      double expect = 0;
      for (const auto& d : docs) {
        double count = 0, present = 0;
        for (const auto& [t, c] : d.counts) {
          if (t == w) count = c;
          if (t == 4 || t == 6) present += 1;
        }
        expect += count * present;
      }
      CHECK(score_of(s, w) == expect);
    }
  }
}

TEST_CASE("held-out tag likelihood") {
  std::vector<ScoredTerm> uniform;
  for (std::uint32_t t = 0; t < 8; ++t) uniform.push_back({t, 2.5});
  const std::vector<std::uint32_t> tags{1, 5, 99};
  const auto r = tag_likelihood(uniform, tags);
  CHECK(r.mean_log_prob == doctest::Approx(std::log(1.0 / 8)));
  CHECK(r.scored == 2);
  CHECK(r.skipped == 1);
  std::vector<ScoredTerm> peaked{{0, 9.0}, {1, 1.0}};
  const auto p = tag_likelihood(peaked, std::vector<std::uint32_t>{0});
  CHECK(p.mean_log_prob == doctest::Approx(std::log((9.0 + kScoreSmoothing) / (10.0 + 2 * kScoreSmoothing))));
}

TEST_CASE("identical scorers give identical likelihoods") {
  const auto vocab = toy_vocab(3, 1);
  const std::vector<Document> docs{make_document({0, 3}), make_document({1, 1, 3})};
  TopicModel m;
  m.k = 1;
  m.vocab_size = 4;
  m.alpha = 1;
  m.phi = {0.25, 0.25, 0.25, 0.25};
  const std::vector<std::vector<double>> theta{{1.0}, {1.0}};
  Cm2Query q;
  q.words = {3};
  q.sigma = 1.0;
  const std::vector<std::uint32_t> tags{0, 1};
  // Every document holds the query once and the kernel is flat, so both
  // scorers reduce to raw counts.
  CHECK(tag_likelihood(cm2_score(m, theta, docs, vocab, q), tags).mean_log_prob ==
        doctest::Approx(tag_likelihood(cooccur_score(docs, vocab, q), tags).mean_log_prob));
}

TEST_CASE("bandwidth is the median squared distance") {
  const std::vector<std::vector<double>> t{{0.0, 1.0}, {1.0, 0.0}, {0.5, 0.5}};
  // squared distances: 2, 0.5, 0.5
  CHECK(median_sq_distance(t) == 0.5);
}

TEST_CASE("joint vocabulary and model files") {
  corpus::TextVocabulary text;
  text.terms = {"riot", "tehran"};
  text.idf = {1, 1};
  text.rebuild_lookup();
  const std::vector<MemeOccurrence> occ{{7, 0, 1}, {7, 1, 2}, {3, 1, 1}, {9, 2, 1}, {9, 0, 1}};
  const auto vocab = build_joint_vocabulary(text, occ, 2);
  CHECK(vocab.meme_ids == std::vector<std::uint32_t>{7, 9});
  CHECK(vocab.modality(2) == Modality::Meme);

  std::vector<corpus::BagOfWords> bags(3);
  bags[1].counts = {{0, 2}};
  const auto docs = build_documents(bags, vocab, occ, 3);
  REQUIRE(docs.size() == 3);
  CHECK(docs[1].counts == std::vector<std::pair<std::uint32_t, std::uint32_t>>{{0, 2}, {2, 2}});

  const auto planted = fixture::disjoint_topics(50, 2, 2, 10, 0.5, 1);
  LdaOptions o;
  o.k = 2;
  o.max_iters = 5;
  const auto m = fit_lda(planted.docs, vocab.size(), o);
  const auto dir = (std::filesystem::temp_directory_path() / "vmeme_test_model").string();
  save_model(dir, m, vocab);
  JointVocabulary back_vocab;
  const auto back = load_model(dir, &back_vocab);
  CHECK(back.alpha == m.alpha);
  CHECK(back_vocab.fingerprint() == vocab.fingerprint());
  REQUIRE(back.phi.size() == m.phi.size());
  for (std::size_t i = 0; i < m.phi.size(); ++i) CHECK(back.phi[i] == doctest::Approx(m.phi[i]).epsilon(1e-6));
}

TEST_CASE("topical co-membership beats direct co-occurrence") {
  const auto c = fixture::topical_annotation(300, 4, 12, 10, 5);
  LdaOptions o;
  o.k = 4;
  o.max_iters = 40;
  const auto cv = annotation_cv(c.docs, c.vocab, o);
  CHECK(cv.cm2_folds.size() == 5);
  CHECK(cv.cm2_mean > cv.cooccur_mean);
}

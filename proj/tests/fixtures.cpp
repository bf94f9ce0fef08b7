#include "fixtures.hpp"

#include <cmath>
#include <random>
#include <string>

namespace fixture {

PlantedTopics disjoint_topics(std::size_t docs, int k, std::size_t words_per_topic, std::size_t doc_length,
                              double doc_alpha, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  PlantedTopics out;
  out.vocab_size = static_cast<std::size_t>(k) * words_per_topic;
  out.phi.assign(k, std::vector<double>(out.vocab_size, 0.0));
  for (int t = 0; t < k; ++t) {
    double s = 0;
    for (std::size_t w = 0; w < words_per_topic; ++w) s += out.phi[t][t * words_per_topic + w] = std::pow(0.85, w);
    for (auto& v : out.phi[t]) v /= s;
  }
  std::gamma_distribution<double> g(doc_alpha, 1.0);
  for (std::size_t d = 0; d < docs; ++d) {
    std::vector<double> theta(k);
    for (auto& v : theta) v = g(rng) + 1e-12;
    std::discrete_distribution<int> topic(theta.begin(), theta.end());
    std::vector<std::uint32_t> terms;
    for (std::size_t i = 0; i < doc_length; ++i) {
      const int t = topic(rng);
      std::discrete_distribution<std::size_t> word(out.phi[t].begin(), out.phi[t].end());
      terms.push_back(static_cast<std::uint32_t>(word(rng)));
    }
    out.docs.push_back(vmeme::topics::make_document(std::move(terms)));
  }
  return out;
}

AnnotationCorpus topical_annotation(std::size_t docs, int k, std::size_t memes_per_topic, std::size_t tags_per_topic,
                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  AnnotationCorpus out;
  for (int t = 0; t < k; ++t)
    for (std::size_t i = 0; i < tags_per_topic; ++i)
      out.vocab.text_terms.push_back("tag" + std::to_string(t) + "_" + std::to_string(i));
  for (std::uint32_t m = 0; m < static_cast<std::uint32_t>(k * memes_per_topic); ++m) out.vocab.meme_ids.push_back(m);
  const std::size_t text = out.vocab.text_size();
  std::uniform_int_distribution<int> topic(0, k - 1);
  std::uniform_int_distribution<std::size_t> meme(0, memes_per_topic - 1), tag(0, tags_per_topic - 1);
  std::uniform_int_distribution<std::size_t> any_tag(0, text - 1);
  std::uniform_real_distribution<double> u(0, 1);
  for (std::size_t d = 0; d < docs; ++d) {
    const int t = topic(rng);
    std::vector<std::uint32_t> terms;
    const int memes = 1 + static_cast<int>(u(rng) < 0.5);
    for (int i = 0; i < memes; ++i) terms.push_back(static_cast<std::uint32_t>(text + t * memes_per_topic + meme(rng)));
    for (int i = 0; i < 3; ++i) terms.push_back(static_cast<std::uint32_t>(t * tags_per_topic + tag(rng)));
    if (u(rng) < 0.3) terms.push_back(static_cast<std::uint32_t>(any_tag(rng)));
    out.docs.push_back(vmeme::topics::make_document(std::move(terms)));
  }
  return out;
}

Cascade cascade(const std::vector<Posting>& postings, const std::vector<std::vector<std::uint32_t>>& memes) {
  constexpr vmeme::Timestamp kEpoch = 1245456000;  // 2009-06-20
  std::vector<vmeme::corpus::VideoDoc> docs;
  for (std::size_t i = 0; i < postings.size(); ++i) {
    vmeme::corpus::VideoDoc d;
    d.video_id = "v" + std::to_string(i);
    d.author_id = postings[i].author;
    d.upload_time = kEpoch + static_cast<vmeme::Timestamp>(std::llround(postings[i].day * vmeme::kSecondsPerDay));
    d.view_count = 10 * (postings.size() - i);
    docs.push_back(std::move(d));
  }
  Cascade c{vmeme::corpus::Corpus::from_videos(std::move(docs)), {}};
  for (std::size_t j = 0; j < memes.size(); ++j) {
    std::vector<vmeme::memedetect::FrameKey> members;
    for (auto v : memes[j]) members.push_back({v, 0});
    auto cluster = vmeme::memedetect::resolve_cluster(members, c.corpus);
    cluster.meme_id = static_cast<std::uint32_t>(j);
    c.clusters.push_back(std::move(cluster));
  }
  return c;
}

}  // namespace fixture

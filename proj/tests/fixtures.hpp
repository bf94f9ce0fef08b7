#pragma once

// Seeded corpora with planted structure, shared by unit and acceptance tests.

#include <cstdint>
#include <string>
#include <vector>

#include "vmeme/corpus.hpp"
#include "vmeme/memedetect.hpp"
#include "vmeme/topics.hpp"

namespace fixture {

struct PlantedTopics {
  std::vector<vmeme::topics::Document> docs;
  std::vector<std::vector<double>> phi;  // K x V
  std::size_t vocab_size = 0;
};

// K topics with disjoint, equally sized supports; within-topic word weights
// decay geometrically. Document mixtures ~ Dirichlet(doc_alpha).
PlantedTopics disjoint_topics(std::size_t docs, int k, std::size_t words_per_topic, std::size_t doc_length,
                              double doc_alpha, std::uint64_t seed);

struct AnnotationCorpus {
  std::vector<vmeme::topics::Document> docs;
  vmeme::topics::JointVocabulary vocab;
};

// Each document draws one topic, a couple of that topic's memes and a few of
// its tags, plus a little off-topic noise. Any particular meme/tag pair is
// seen together only a handful of times, so topical co-membership carries
// information that direct co-occurrence lacks.
AnnotationCorpus topical_annotation(std::size_t docs, int k, std::size_t memes_per_topic, std::size_t tags_per_topic,
                                    std::uint64_t seed);

struct Posting {
  std::string author;
  double day = 0;  // days after a fixed epoch
};

struct Cascade {
  vmeme::corpus::Corpus corpus;
  std::vector<vmeme::memedetect::MemeCluster> clusters;
};

// Video i is postings[i] (id "v<i>"); meme j is carried by memes[j].
Cascade cascade(const std::vector<Posting>& postings, const std::vector<std::vector<std::uint32_t>>& memes);

}  // namespace fixture

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vmeme/corpus.hpp"

namespace vmeme::topics {

enum class Modality { Text, Meme };

// Text terms occupy [0, text_size()), meme terms follow.
struct JointVocabulary {
  std::vector<std::string> text_terms;
  std::vector<std::uint32_t> meme_ids;

  std::size_t text_size() const { return text_terms.size(); }
  std::size_t meme_size() const { return meme_ids.size(); }
  std::size_t size() const { return text_terms.size() + meme_ids.size(); }
  Modality modality(std::size_t term) const { return term < text_size() ? Modality::Text : Modality::Meme; }
  std::uint32_t meme_term(std::size_t j) const { return static_cast<std::uint32_t>(text_size() + j); }
  std::string label(std::size_t term) const;
  std::pair<std::size_t, std::size_t> range(Modality m) const;
  std::string fingerprint() const;
};

// Sparse word counts, sorted by term.
struct Document {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> counts;

  std::size_t total() const;
  Document restricted(std::size_t begin, std::size_t end) const;
};

// Merges term lists into sorted (term, count) pairs.
Document make_document(std::vector<std::uint32_t> terms);

struct EStepOptions {
  double tol = 1e-6;  // relative change of the document bound
  int max_iters = 100;
};

struct LdaOptions {
  int k = 50;
  double alpha = 0.0;  // 0 -> 50 / K
  bool estimate_alpha = true;
  double tol = 1e-5;  // relative change of the corpus bound
  int max_iters = 100;
  EStepOptions estep;
  std::uint64_t seed = 1;
};

struct TopicModel {
  int k = 0;
  std::size_t vocab_size = 0;
  double alpha = 0.0;
  std::vector<double> phi;    // K x V row-major, rows on the simplex
  std::vector<double> theta;  // training documents x K, variational means
  std::vector<double> bound_history;
  std::size_t skipped_documents = 0;

  std::span<const double> phi_row(int topic) const { return {phi.data() + static_cast<std::size_t>(topic) * vocab_size, vocab_size}; }
  std::span<const double> theta_row(std::size_t doc) const { return {theta.data() + doc * k, static_cast<std::size_t>(k)}; }
  std::size_t documents() const { return k ? theta.size() / k : 0; }
};

// Variational EM. Documents without in-vocabulary words are skipped (their
// theta rows are uniform).
TopicModel fit_lda(std::span<const Document> docs, std::size_t vocab_size, const LdaOptions& options = {});

// Posterior mean of the variational Dirichlet with Phi and alpha fixed.
// Words unknown to the model are dropped; nothing left -> uniform.
std::vector<double> infer_theta(const TopicModel& model, const Document& words, const EStepOptions& options = {});

// Theta for every document using only the terms of one modality.
std::vector<std::vector<double>> infer_corpus_theta(const TopicModel& model, std::span<const Document> docs,
                                                    const JointVocabulary& vocab, Modality modality);

// Median of pairwise squared distances (deterministic subsample above 3000 rows).
double median_sq_distance(std::span<const std::vector<double>> theta);

struct ScoredTerm {
  std::uint32_t term = 0;
  double score = 0.0;
};

// Descending score, ties by term index.
void rank_terms(std::vector<ScoredTerm>& terms);

struct Cm2Query {
  std::vector<std::uint32_t> words;  // one modality
  Modality candidates = Modality::Text;
  double sigma = 0.0;  // <= 0 -> median of pairwise squared distances
};

// score(w_r) = sum_m count(w_r, d_m) * exp(-|theta_q - theta_m|^2 / sigma).
std::vector<ScoredTerm> cm2_score(const TopicModel& model, std::span<const std::vector<double>> theta,
                                  std::span<const Document> docs, const JointVocabulary& vocab, const Cm2Query& query);

// score(w_r) = sum_m count(w_r, d_m) * (number of distinct query terms in d_m).
std::vector<ScoredTerm> cooccur_score(std::span<const Document> docs, const JointVocabulary& vocab,
                                      const Cm2Query& query);

struct LikelihoodResult {
  double mean_log_prob = 0.0;
  std::size_t scored = 0;
  std::size_t skipped = 0;  // tags outside the candidate set
};

inline constexpr double kScoreSmoothing = 1e-9;

// Scores are normalized over the candidate terms with additive smoothing;
// natural log.
LikelihoodResult tag_likelihood(std::span<const ScoredTerm> scores, std::span<const std::uint32_t> heldout_tags);

struct CvResult {
  std::vector<double> cm2_folds;
  std::vector<double> cooccur_folds;
  double cm2_mean = 0, cm2_std = 0;
  double cooccur_mean = 0, cooccur_std = 0;
};

// Five-fold meme annotation protocol: fit on the training folds, query with
// each held-out document's memes, score its text terms.
CvResult annotation_cv(std::span<const Document> docs, const JointVocabulary& vocab, const LdaOptions& options,
                       int folds = 5);

// Joint documents: text bag plus meme counts per video.
struct MemeOccurrence {
  std::uint32_t meme_id = 0;
  std::uint32_t video = 0;  // corpus index
  std::uint32_t count = 1;
};

// Keeps the `cap` memes present in the most videos (ties by id).
JointVocabulary build_joint_vocabulary(const corpus::TextVocabulary& text, std::span<const MemeOccurrence> memes,
                                       std::size_t cap);

std::vector<Document> build_documents(const std::vector<corpus::BagOfWords>& bags, const JointVocabulary& vocab,
                                      std::span<const MemeOccurrence> memes, std::size_t videos);

// phi.bin, theta.bin (VMF1 layout), meta.json.
void save_model(const std::string& dir, const TopicModel& model, const JointVocabulary& vocab);
TopicModel load_model(const std::string& dir, JointVocabulary* vocab = nullptr);

}  // namespace vmeme::topics

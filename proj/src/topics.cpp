#include "vmeme/topics.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <numeric>
#include <random>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "json.hpp"
#include "vmeme/feature_matrix.hpp"
#include "vmeme/util.hpp"

namespace vmeme::topics {

using boost::math::digamma;
using boost::math::trigamma;

std::string JointVocabulary::label(std::size_t term) const {
  if (term < text_size()) return text_terms[term];
  return "meme:" + std::to_string(meme_ids.at(term - text_size()));
}

std::pair<std::size_t, std::size_t> JointVocabulary::range(Modality m) const {
  return m == Modality::Text ? std::pair{std::size_t{0}, text_size()} : std::pair{text_size(), size()};
}

std::string JointVocabulary::fingerprint() const {
  Fnv1a h;
  for (const auto& t : text_terms) h.update(t).update("\n", 1);
  h.update("|");
  for (auto id : meme_ids) h.update(&id, sizeof id);
  return h.hex();
}

std::size_t Document::total() const {
  std::size_t n = 0;
  for (const auto& [t, c] : counts) n += c;
  return n;
}

Document Document::restricted(std::size_t begin, std::size_t end) const {
  Document d;
  for (const auto& tc : counts)
    if (tc.first >= begin && tc.first < end) d.counts.push_back(tc);
  return d;
}

Document make_document(std::vector<std::uint32_t> terms) {
  std::sort(terms.begin(), terms.end());
  Document d;
  for (auto t : terms) {
    if (!d.counts.empty() && d.counts.back().first == t)
      ++d.counts.back().second;
    else
      d.counts.push_back({t, 1});
  }
  return d;
}

namespace {

struct Words {
  std::vector<std::uint32_t> term;
  std::vector<double> count;
  double total = 0;
};

// Drops terms outside the model or with zero probability under every topic.
Words usable_words(const TopicModel& m, const Document& d) {
  Words w;
  for (const auto& [t, c] : d.counts) {
    if (t >= m.vocab_size || c == 0) continue;
    bool any = false;
    for (int k = 0; k < m.k && !any; ++k) any = m.phi[static_cast<std::size_t>(k) * m.vocab_size + t] > 0;
    if (!any) continue;
    w.term.push_back(t);
    w.count.push_back(c);
    w.total += c;
  }
  return w;
}

// Coordinate ascent on (phi_n, gamma) for one document, starting from gamma.
// Optionally accumulates sufficient statistics.
double estep(const TopicModel& m, const Words& w, std::vector<double>& gamma, const EStepOptions& opt,
             std::vector<double>* ss, double* alpha_ss) {
  const int K = m.k;
  const std::size_t V = m.vocab_size;
  const std::size_t N = w.term.size();
  std::vector<double> phi(N * K), dig(K), egam(K), next(K);
  const double alpha = m.alpha;
  const double prior = std::lgamma(K * alpha) - K * std::lgamma(alpha);
  double bound = -std::numeric_limits<double>::infinity();

  auto update_phi = [&]() {
    for (int k = 0; k < K; ++k) egam[k] = std::exp(digamma(gamma[k]));
    for (std::size_t n = 0; n < N; ++n) {
      double* p = &phi[n * K];
      double s = 0;
      for (int k = 0; k < K; ++k) {
        p[k] = m.phi[static_cast<std::size_t>(k) * V + w.term[n]] * egam[k];
        s += p[k];
      }
      for (int k = 0; k < K; ++k) p[k] /= s;
    }
    std::fill(next.begin(), next.end(), alpha);
    for (std::size_t n = 0; n < N; ++n)
      for (int k = 0; k < K; ++k) next[k] += w.count[n] * phi[n * K + k];
    gamma = next;
  };

  auto evaluate = [&]() {
    const double gsum = std::accumulate(gamma.begin(), gamma.end(), 0.0);
    const double dsum = digamma(gsum);
    double l = prior - std::lgamma(gsum);
    for (int k = 0; k < K; ++k) {
      dig[k] = digamma(gamma[k]) - dsum;
      l += (alpha - 1) * dig[k] + std::lgamma(gamma[k]) - (gamma[k] - 1) * dig[k];
    }
    for (std::size_t n = 0; n < N; ++n)
      for (int k = 0; k < K; ++k) {
        const double p = phi[n * K + k];
        if (p <= 0) continue;
        l += w.count[n] * p * (dig[k] + std::log(m.phi[static_cast<std::size_t>(k) * V + w.term[n]]) - std::log(p));
      }
    return l;
  };

  for (int it = 0; it < opt.max_iters; ++it) {
    update_phi();
    const double l = evaluate();
    const double change = std::abs((bound - l) / l);
    bound = l;
    if (it > 0 && change < opt.tol) break;
  }

  if (ss) {
    for (std::size_t n = 0; n < N; ++n)
      for (int k = 0; k < K; ++k) (*ss)[static_cast<std::size_t>(k) * V + w.term[n]] += w.count[n] * phi[n * K + k];
    double a = 0;
    for (int k = 0; k < K; ++k) a += dig[k];
    *alpha_ss += a;
  }
  return bound;
}

double alpha_objective(double a, double docs, int K, double ss) {
  return docs * (std::lgamma(K * a) - K * std::lgamma(a)) + (a - 1) * ss;
}

// Newton steps on log(alpha) for the symmetric Dirichlet.
double optimize_alpha(double start, double docs, int K, double ss) {
  double log_a = std::log(start);
  for (int it = 0; it < 100; ++it) {
    const double a = std::exp(log_a);
    const double d1 = docs * (K * digamma(K * a) - K * digamma(a)) + ss;
    const double d2 = docs * (K * K * trigamma(K * a) - K * trigamma(a));
    log_a -= d1 / (d2 * a + d1);
    if (!std::isfinite(log_a)) return start;
    if (std::abs(d1) < 1e-5) break;
  }
  const double a = std::exp(log_a);
  if (!(a > 0) || alpha_objective(a, docs, K, ss) < alpha_objective(start, docs, K, ss)) return start;
  return a;
}

constexpr std::size_t kReductionBlocks = 16;

}  // namespace

TopicModel fit_lda(std::span<const Document> docs, std::size_t vocab_size, const LdaOptions& opt) {
  if (opt.k < 1) throw InvalidArgument("fit_lda: K must be at least 1");
  if (docs.empty()) throw InvalidArgument("fit_lda: empty corpus");
  if (vocab_size == 0) throw InvalidArgument("fit_lda: empty vocabulary");
  const int K = opt.k;
  const std::size_t V = vocab_size;

  TopicModel m;
  m.k = K;
  m.vocab_size = V;
  m.alpha = opt.alpha > 0 ? opt.alpha : 50.0 / K;

  std::vector<double> unigram(V, 0.0);
  std::vector<Words> words(docs.size());
  std::vector<std::size_t> active;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (const auto& [t, c] : docs[d].counts) {
      if (t >= V || c == 0) continue;
      words[d].term.push_back(t);
      words[d].count.push_back(c);
      words[d].total += c;
      unigram[t] += c;
    }
    if (words[d].term.empty())
      ++m.skipped_documents;
    else
      active.push_back(d);
  }
  if (active.empty()) throw InvalidArgument("fit_lda: no document has in-vocabulary words");
  if (m.skipped_documents) log_warn("fit_lda: skipped " + std::to_string(m.skipped_documents) + " empty document(s)");

  std::mt19937_64 rng(mix_seed(opt.seed, "lda-init"));
  std::exponential_distribution<double> noise(1.0);
  m.phi.assign(static_cast<std::size_t>(K) * V, 0.0);
  for (int k = 0; k < K; ++k) {
    double s = 0;
    for (std::size_t w = 0; w < V; ++w) {
      const double u = noise(rng);
      double& p = m.phi[static_cast<std::size_t>(k) * V + w];
      p = K == 1 ? unigram[w] : unigram[w] * u;
      s += p;
    }
    for (std::size_t w = 0; w < V; ++w) m.phi[static_cast<std::size_t>(k) * V + w] /= s;
  }

  std::vector<std::vector<double>> gamma(docs.size());
  for (std::size_t d : active) gamma[d].assign(K, m.alpha + words[d].total / K);

  const std::size_t blocks = std::min(kReductionBlocks, active.size());
  std::vector<std::vector<double>> block_ss(blocks);
  std::vector<double> block_alpha(blocks), block_bound(blocks);
  double previous = 0;
  for (int iter = 0; iter < opt.max_iters; ++iter) {
    parallel_for(blocks, [&](std::size_t b) {
      block_ss[b].assign(static_cast<std::size_t>(K) * V, 0.0);
      block_alpha[b] = 0;
      block_bound[b] = 0;
      const std::size_t lo = active.size() * b / blocks, hi = active.size() * (b + 1) / blocks;
      for (std::size_t i = lo; i < hi; ++i) {
        const std::size_t d = active[i];
        block_bound[b] += estep(m, words[d], gamma[d], opt.estep, &block_ss[b], &block_alpha[b]);
      }
    });
    double bound = 0, alpha_ss = 0;
    std::vector<double> ss(static_cast<std::size_t>(K) * V, 0.0);
    for (std::size_t b = 0; b < blocks; ++b) {
      bound += block_bound[b];
      alpha_ss += block_alpha[b];
      for (std::size_t i = 0; i < ss.size(); ++i) ss[i] += block_ss[b][i];
    }
    m.bound_history.push_back(bound);
    if (iter > 0 && bound < previous - 1e-6 * std::abs(previous))
      log_warn("fit_lda: variational bound decreased at iteration " + std::to_string(iter));

    for (int k = 0; k < K; ++k) {
      double* row = &m.phi[static_cast<std::size_t>(k) * V];
      const double* src = &ss[static_cast<std::size_t>(k) * V];
      const double s = std::accumulate(src, src + V, 0.0);
      if (s > 0)
        for (std::size_t w = 0; w < V; ++w) row[w] = src[w] / s;
    }
    if (opt.estimate_alpha && K > 1) m.alpha = optimize_alpha(m.alpha, static_cast<double>(active.size()), K, alpha_ss);

    if (iter > 0 && std::abs((previous - bound) / previous) < opt.tol) break;
    previous = bound;
  }

  // Final posteriors under the fitted parameters.
  m.theta.assign(docs.size() * K, 1.0 / K);
  parallel_for(active.size(), [&](std::size_t i) {
    const std::size_t d = active[i];
    auto g = gamma[d];
    estep(m, words[d], g, opt.estep, nullptr, nullptr);
    const double s = std::accumulate(g.begin(), g.end(), 0.0);
    for (int k = 0; k < K; ++k) m.theta[d * K + k] = g[k] / s;
  });
  return m;
}

std::vector<double> infer_theta(const TopicModel& model, const Document& doc, const EStepOptions& options) {
  const int K = model.k;
  std::vector<double> theta(K, 1.0 / K);
  if (K == 1) return theta;
  Words w = usable_words(model, doc);
  if (w.term.empty()) return theta;
  std::vector<double> gamma(K, model.alpha + w.total / K);
  estep(model, w, gamma, options, nullptr, nullptr);
  const double s = std::accumulate(gamma.begin(), gamma.end(), 0.0);
  for (int k = 0; k < K; ++k) theta[k] = gamma[k] / s;
  return theta;
}

std::vector<std::vector<double>> infer_corpus_theta(const TopicModel& model, std::span<const Document> docs,
                                                    const JointVocabulary& vocab, Modality modality) {
  const auto [lo, hi] = vocab.range(modality);
  std::vector<std::vector<double>> out(docs.size());
  parallel_for(docs.size(), [&](std::size_t d) { out[d] = infer_theta(model, docs[d].restricted(lo, hi)); });
  return out;
}

namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

}  // namespace

double median_sq_distance(std::span<const std::vector<double>> theta) {
  if (theta.size() < 2) return 1.0;
  std::vector<std::size_t> rows(theta.size());
  std::iota(rows.begin(), rows.end(), 0);
  constexpr std::size_t kMaxRows = 3000;
  if (rows.size() > kMaxRows) {
    std::mt19937_64 rng(0x5eed);
    std::shuffle(rows.begin(), rows.end(), rng);
    rows.resize(kMaxRows);
    std::sort(rows.begin(), rows.end());
  }
  std::vector<double> d;
  d.reserve(rows.size() * (rows.size() - 1) / 2);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = i + 1; j < rows.size(); ++j) d.push_back(sq_dist(theta[rows[i]], theta[rows[j]]));
  auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  double med = *mid;
  if (d.size() % 2 == 0) med = 0.5 * (med + *std::max_element(d.begin(), mid));
  if (!(med > 0)) {
    log_warn("median pairwise theta distance is zero; using bandwidth 1");
    return 1.0;
  }
  return med;
}

void rank_terms(std::vector<ScoredTerm>& terms) {
  std::sort(terms.begin(), terms.end(), [](const ScoredTerm& a, const ScoredTerm& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.term < b.term;
  });
}

namespace {

std::vector<ScoredTerm> candidate_list(const JointVocabulary& vocab, Modality m) {
  const auto [lo, hi] = vocab.range(m);
  if (lo == hi) throw InvalidArgument("empty candidate modality");
  std::vector<ScoredTerm> out;
  for (std::size_t t = lo; t < hi; ++t) out.push_back({static_cast<std::uint32_t>(t), 0.0});
  return out;
}

}  // namespace

std::vector<ScoredTerm> cm2_score(const TopicModel& model, std::span<const std::vector<double>> theta,
                                  std::span<const Document> docs, const JointVocabulary& vocab, const Cm2Query& query) {
  if (query.words.empty()) throw InvalidArgument("cm2_score: empty query");
  if (theta.size() != docs.size()) throw InvalidArgument("cm2_score: theta/document count mismatch");
  auto out = candidate_list(vocab, query.candidates);
  const std::size_t lo = out.front().term, hi = out.back().term + 1;
  const double sigma = query.sigma > 0 ? query.sigma : median_sq_distance(theta);
  const auto theta_q = infer_theta(model, make_document(query.words));
  for (std::size_t m = 0; m < docs.size(); ++m) {
    const double weight = std::exp(-sq_dist(theta_q, theta[m]) / sigma);
    for (const auto& [t, c] : docs[m].counts)
      if (t >= lo && t < hi) out[t - lo].score += c * weight;
  }
  rank_terms(out);
  return out;
}

std::vector<ScoredTerm> cooccur_score(std::span<const Document> docs, const JointVocabulary& vocab,
                                      const Cm2Query& query) {
  auto out = candidate_list(vocab, query.candidates);
  const std::size_t lo = out.front().term, hi = out.back().term + 1;
  std::vector<std::uint32_t> q = query.words;
  std::sort(q.begin(), q.end());
  q.erase(std::unique(q.begin(), q.end()), q.end());
  for (const auto& doc : docs) {
    std::size_t present = 0;
    for (auto t : q)
      present += std::binary_search(doc.counts.begin(), doc.counts.end(), std::pair<std::uint32_t, std::uint32_t>{t, 0},
                                    [](const auto& a, const auto& b) { return a.first < b.first; });
    if (!present) continue;
    for (const auto& [t, c] : doc.counts)
      if (t >= lo && t < hi) out[t - lo].score += static_cast<double>(c) * present;
  }
  rank_terms(out);
  return out;
}

LikelihoodResult tag_likelihood(std::span<const ScoredTerm> scores, std::span<const std::uint32_t> heldout) {
  std::map<std::uint32_t, double> lookup;
  double total = 0;
  for (const auto& s : scores) {
    if (s.score < 0) throw InvalidArgument("tag_likelihood: negative score");
    lookup[s.term] = s.score;
    total += s.score + kScoreSmoothing;
  }
  if (!(total > 0)) throw InvalidArgument("tag_likelihood: empty candidate set");
  LikelihoodResult r;
  double sum = 0;
  for (auto tag : heldout) {
    auto it = lookup.find(tag);
    if (it == lookup.end()) {
      ++r.skipped;
      continue;
    }
    sum += std::log((it->second + kScoreSmoothing) / total);
    ++r.scored;
  }
  r.mean_log_prob = r.scored ? sum / static_cast<double>(r.scored) : 0.0;
  return r;
}

namespace {

void mean_std(const std::vector<double>& v, double& mean, double& sd) {
  mean = v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double s = 0;
  for (double x : v) s += (x - mean) * (x - mean);
  sd = v.size() > 1 ? std::sqrt(s / static_cast<double>(v.size() - 1)) : 0.0;
}

}  // namespace

CvResult annotation_cv(std::span<const Document> docs, const JointVocabulary& vocab, const LdaOptions& options,
                       int folds) {
  if (folds < 2) throw InvalidArgument("annotation_cv: need at least two folds");
  if (docs.size() < static_cast<std::size_t>(folds)) throw InvalidArgument("annotation_cv: fewer documents than folds");
  std::vector<std::size_t> order(docs.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(mix_seed(options.seed, "annotation-cv"));
  std::shuffle(order.begin(), order.end(), rng);
  const auto [tlo, thi] = vocab.range(Modality::Text);
  const auto [mlo, mhi] = vocab.range(Modality::Meme);

  CvResult res;
  for (int f = 0; f < folds; ++f) {
    std::vector<Document> train;
    std::vector<std::size_t> test;
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (static_cast<int>(i % folds) == f)
        test.push_back(order[i]);
      else
        train.push_back(docs[order[i]]);
    }
    const TopicModel model = fit_lda(train, vocab.size(), options);
    const auto theta = infer_corpus_theta(model, train, vocab, Modality::Meme);
    const double sigma = median_sq_distance(theta);

    std::vector<double> cm2_lp(test.size(), 0.0), co_lp(test.size(), 0.0);
    std::vector<std::size_t> tags_scored(test.size(), 0);
    parallel_for(test.size(), [&](std::size_t i) {
      const Document& d = docs[test[i]];
      Cm2Query q;
      q.candidates = Modality::Text;
      q.sigma = sigma;
      std::vector<std::uint32_t> tags;
      for (const auto& [t, c] : d.counts) {
        if (t >= mlo && t < mhi) q.words.push_back(t);
        if (t >= tlo && t < thi) tags.push_back(t);
      }
      if (q.words.empty() || tags.empty()) return;
      const auto a = tag_likelihood(cm2_score(model, theta, train, vocab, q), tags);
      const auto b = tag_likelihood(cooccur_score(train, vocab, q), tags);
      cm2_lp[i] = a.mean_log_prob * static_cast<double>(a.scored);
      co_lp[i] = b.mean_log_prob * static_cast<double>(b.scored);
      tags_scored[i] = a.scored;
    });
    const double n = static_cast<double>(std::accumulate(tags_scored.begin(), tags_scored.end(), std::size_t{0}));
    if (n == 0) continue;
    res.cm2_folds.push_back(std::accumulate(cm2_lp.begin(), cm2_lp.end(), 0.0) / n);
    res.cooccur_folds.push_back(std::accumulate(co_lp.begin(), co_lp.end(), 0.0) / n);
  }
  if (res.cm2_folds.empty()) throw InvalidArgument("annotation_cv: no held-out document has both memes and text");
  mean_std(res.cm2_folds, res.cm2_mean, res.cm2_std);
  mean_std(res.cooccur_folds, res.cooccur_mean, res.cooccur_std);
  return res;
}

JointVocabulary build_joint_vocabulary(const corpus::TextVocabulary& text, std::span<const MemeOccurrence> memes,
                                       std::size_t cap) {
  std::map<std::uint32_t, std::vector<std::uint32_t>> videos;
  for (const auto& o : memes) videos[o.meme_id].push_back(o.video);
  std::vector<std::pair<std::size_t, std::uint32_t>> freq;
  for (auto& [id, v] : videos) {
    std::sort(v.begin(), v.end());
    freq.push_back({static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin()), id});
  }
  std::sort(freq.begin(), freq.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  if (freq.size() > cap) freq.resize(cap);
  JointVocabulary v;
  v.text_terms = text.terms;
  for (const auto& [n, id] : freq) v.meme_ids.push_back(id);
  std::sort(v.meme_ids.begin(), v.meme_ids.end());
  return v;
}

std::vector<Document> build_documents(const std::vector<corpus::BagOfWords>& bags, const JointVocabulary& vocab,
                                      std::span<const MemeOccurrence> memes, std::size_t videos) {
  if (bags.size() != videos) throw InvalidArgument("build_documents: one bag per video expected");
  std::vector<std::map<std::uint32_t, std::uint32_t>> counts(videos);
  for (std::size_t v = 0; v < videos; ++v)
    for (const auto& [t, c] : bags[v].counts)
      if (t < vocab.text_size()) counts[v][t] += c;
  for (const auto& o : memes) {
    if (o.video >= videos) throw InvalidArgument("build_documents: meme occurrence references unknown video");
    auto it = std::lower_bound(vocab.meme_ids.begin(), vocab.meme_ids.end(), o.meme_id);
    if (it == vocab.meme_ids.end() || *it != o.meme_id) continue;
    counts[o.video][vocab.meme_term(static_cast<std::size_t>(it - vocab.meme_ids.begin()))] += o.count;
  }
  std::vector<Document> docs(videos);
  for (std::size_t v = 0; v < videos; ++v) docs[v].counts.assign(counts[v].begin(), counts[v].end());
  return docs;
}

void save_model(const std::string& dir, const TopicModel& model, const JointVocabulary& vocab) {
  std::filesystem::create_directories(dir);
  FeatureMatrix phi(static_cast<std::uint32_t>(model.k), static_cast<std::uint32_t>(model.vocab_size));
  std::copy(model.phi.begin(), model.phi.end(), phi.values.begin());
  write_vmf(dir + "/phi.bin", phi);
  FeatureMatrix theta(static_cast<std::uint32_t>(model.documents()), static_cast<std::uint32_t>(model.k));
  std::copy(model.theta.begin(), model.theta.end(), theta.values.begin());
  write_vmf(dir + "/theta.bin", theta);
  nlohmann::json meta{{"K", model.k},
                      {"alpha", model.alpha},
                      {"vocab_size", model.vocab_size},
                      {"vocab_hash", vocab.fingerprint()},
                      {"text_terms", vocab.text_terms},
                      {"meme_ids", vocab.meme_ids},
                      {"bound_history", model.bound_history},
                      {"skipped_documents", model.skipped_documents}};
  write_text_file(dir + "/meta.json", meta.dump(1) + "\n");
}

namespace {

void renormalize_rows(std::vector<double>& values, std::size_t cols) {
  for (std::size_t r = 0; r * cols < values.size(); ++r) {
    double s = 0;
    for (std::size_t c = 0; c < cols; ++c) s += values[r * cols + c];
    if (s > 0)
      for (std::size_t c = 0; c < cols; ++c) values[r * cols + c] /= s;
  }
}

}  // namespace

TopicModel load_model(const std::string& dir, JointVocabulary* vocab) {
  const auto meta = nlohmann::json::parse(read_text_file(dir + "/meta.json"));
  TopicModel m;
  m.k = meta.at("K").get<int>();
  m.alpha = meta.at("alpha").get<double>();
  m.vocab_size = meta.at("vocab_size").get<std::size_t>();
  m.bound_history = meta.value("bound_history", std::vector<double>{});
  m.skipped_documents = meta.value("skipped_documents", std::size_t{0});
  const auto phi = read_vmf(dir + "/phi.bin");
  if (phi.rows != static_cast<std::uint32_t>(m.k) || phi.dim != m.vocab_size)
    throw Error(dir + ": phi.bin shape does not match meta.json");
  m.phi.assign(phi.values.begin(), phi.values.end());
  renormalize_rows(m.phi, m.vocab_size);
  const auto theta = read_vmf(dir + "/theta.bin");
  m.theta.assign(theta.values.begin(), theta.values.end());
  renormalize_rows(m.theta, static_cast<std::size_t>(m.k));
  JointVocabulary v;
  v.text_terms = meta.at("text_terms").get<std::vector<std::string>>();
  v.meme_ids = meta.at("meme_ids").get<std::vector<std::uint32_t>>();
  if (v.fingerprint() != meta.at("vocab_hash").get<std::string>()) throw Error(dir + ": vocabulary hash mismatch");
  if (vocab) *vocab = std::move(v);
  return m;
}

}  // namespace vmeme::topics

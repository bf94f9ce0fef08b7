#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "vmeme/util.hpp"

namespace vmeme::corpus {

// One decoded frame listed in the manifest. `shot` is the upstream sequence
// index; frames of a video are kept sorted by it.
struct FrameRef {
  int shot = 0;
  std::string path;
  double t_offset_s = 0.0;
};

struct VideoDoc {
  std::string video_id;
  std::string author_id;
  Timestamp upload_time = 0;
  std::string title;
  std::string description;
  std::uint64_t view_count = 0;
  std::vector<FrameRef> frames;

  bool frameless() const { return frames.empty(); }
};

struct AuthorRecord {
  std::string author_id;
  std::vector<std::string> video_ids;  // sorted

  std::size_t productivity() const { return video_ids.size(); }
};

struct Reject {
  std::size_t line = 0;
  std::string reason;
};

struct IngestOptions {
  // Directory relative frame paths resolve against; empty means the manifest's
  // own directory.
  std::string frame_root;
};

// Immutable after construction; safe to share between reader threads.
class Corpus {
 public:
  Corpus() = default;

  // Throws ParseError on malformed lines, ConflictError on duplicate ids.
  // Unparseable timestamps are collected in rejects().
  static Corpus ingest_manifest(const std::string& path, const IngestOptions& options = {});
  static Corpus ingest_stream(std::istream& in, const std::string& frame_root);

  // Builds a corpus from already-validated documents (tests, generators).
  static Corpus from_videos(std::vector<VideoDoc> videos);

  const std::vector<VideoDoc>& videos() const { return videos_; }
  const std::vector<AuthorRecord>& authors() const { return authors_; }
  const std::vector<Reject>& rejects() const { return rejects_; }

  std::optional<std::size_t> find_video(std::string_view video_id) const;
  std::optional<std::size_t> find_author(std::string_view author_id) const;
  // Index into authors() of the author who uploaded videos()[video].
  std::size_t author_of(std::size_t video) const { return video_author_[video]; }

  // Writes videos.jsonl and authors.jsonl into dir (created if missing).
  void save(const std::string& dir) const;
  static Corpus load(const std::string& dir);

 private:
  void index();

  std::vector<VideoDoc> videos_;
  std::vector<AuthorRecord> authors_;
  std::vector<Reject> rejects_;
  std::vector<std::size_t> video_author_;
  std::unordered_map<std::string, std::size_t> video_lookup_;
  std::unordered_map<std::string, std::size_t> author_lookup_;
};

void write_rejects(const std::string& path, const std::vector<Reject>& rejects);

// Stopword removal and dictionary-based inflection collapsing. Tokens not in
// the dictionary pass through unchanged.
class TextNormalizer {
 public:
  TextNormalizer() = default;
  TextNormalizer(std::unordered_set<std::string> stopwords, std::unordered_map<std::string, std::string> dictionary)
      : stopwords_(std::move(stopwords)), dictionary_(std::move(dictionary)) {}

  // Stopword list: one token per line, '#' comments. Dictionary: TSV
  // "inflected<TAB>normalized".
  static TextNormalizer load(const std::string& stopword_path, const std::string& dictionary_path);
  // The lists shipped in the data directory.
  static TextNormalizer shipped();

  std::vector<std::string> operator()(std::string_view raw) const;

  bool is_stopword(std::string_view token) const { return stopwords_.count(std::string(token)) > 0; }

 private:
  std::unordered_set<std::string> stopwords_;
  std::unordered_map<std::string, std::string> dictionary_;
};

std::vector<std::string> normalize_text(std::string_view raw, const TextNormalizer& normalizer);

struct TextVocabulary {
  std::vector<std::string> terms;
  std::vector<double> idf;

  std::size_t size() const { return terms.size(); }
  std::optional<std::size_t> find(std::string_view term) const;

  void save_tsv(const std::string& path) const;
  static TextVocabulary load_tsv(const std::string& path);

  // Call after filling terms directly.
  void rebuild_lookup();

 private:
  std::unordered_map<std::string, std::size_t> lookup_;
};

// Document frequencies from a wider collection, used for cross-topic idf.
struct BackgroundDf {
  std::size_t documents = 0;
  std::unordered_map<std::string, std::size_t> df;
};

// idf = ln((1 + N) / (1 + df)) + 1.
double smooth_idf(std::size_t documents, std::size_t df);

// Tokens of title + description for every video, in corpus order.
std::vector<std::vector<std::string>> document_tokens(const Corpus& corpus, const TextNormalizer& normalizer);

// Ranks terms by total count * idf, descending; ties by term. Keeps `cap`.
TextVocabulary build_vocabulary(const std::vector<std::vector<std::string>>& docs, std::size_t cap,
                                const BackgroundDf* background = nullptr);
TextVocabulary build_vocabulary(const Corpus& corpus, const TextNormalizer& normalizer, std::size_t cap,
                                const BackgroundDf* background = nullptr);

struct BagOfWords {
  std::string doc_id;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> counts;  // (term, count), sorted by term

  std::size_t total() const;
};

BagOfWords make_bag(std::string doc_id, const std::vector<std::string>& tokens, const TextVocabulary& vocab);

}  // namespace vmeme::corpus

#include "vmeme/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace vmeme::corpus {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string require_string(const json& rec, const char* key, std::size_t line) {
  auto it = rec.find(key);
  if (it == rec.end() || !it->is_string() || it->get_ref<const std::string&>().empty())
    throw ParseError(line, std::string("missing or non-string field '") + key + "'");
  return it->get<std::string>();
}

std::string optional_string(const json& rec, const char* key, std::size_t line) {
  auto it = rec.find(key);
  if (it == rec.end() || it->is_null()) return {};
  if (!it->is_string()) throw ParseError(line, std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

std::vector<FrameRef> parse_frames(const json& rec, std::size_t line, const std::string& frame_root) {
  std::vector<FrameRef> frames;
  auto it = rec.find("frames");
  if (it == rec.end() || it->is_null()) return frames;
  if (!it->is_array()) throw ParseError(line, "field 'frames' must be an array");
  for (const auto& f : *it) {
    if (!f.is_object()) throw ParseError(line, "frame entries must be objects");
    FrameRef ref;
    auto shot = f.find("shot");
    if (shot == f.end() || !shot->is_number_integer()) throw ParseError(line, "frame without integer 'shot'");
    ref.shot = shot->get<int>();
    ref.path = require_string(f, "path", line);
    if (!frame_root.empty() && fs::path(ref.path).is_relative()) ref.path = (fs::path(frame_root) / ref.path).string();
    auto off = f.find("t_offset_s");
    if (off != f.end() && !off->is_null()) {
      if (!off->is_number()) throw ParseError(line, "frame 't_offset_s' must be numeric");
      ref.t_offset_s = off->get<double>();
      if (!std::isfinite(ref.t_offset_s)) throw ParseError(line, "frame 't_offset_s' must be finite");
    }
    frames.push_back(std::move(ref));
  }
  std::sort(frames.begin(), frames.end(), [](const FrameRef& a, const FrameRef& b) { return a.shot < b.shot; });
  for (std::size_t i = 1; i < frames.size(); ++i)
    if (frames[i].shot == frames[i - 1].shot)
      throw ParseError(line, "duplicate frame shot index " + std::to_string(frames[i].shot));
  return frames;
}

json video_to_json(const VideoDoc& v) {
  json frames = json::array();
  for (const auto& f : v.frames) frames.push_back({{"shot", f.shot}, {"path", f.path}, {"t_offset_s", f.t_offset_s}});
  return json{{"video_id", v.video_id},
              {"author_id", v.author_id},
              {"upload_time", format_iso8601(v.upload_time)},
              {"title", v.title},
              {"description", v.description},
              {"view_count", v.view_count},
              {"frames", frames}};
}

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

}  // namespace

Corpus Corpus::ingest_manifest(const std::string& path, const IngestOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest " + path);
  std::string root = options.frame_root;
  if (root.empty()) root = fs::path(path).parent_path().string();
  return ingest_stream(in, root);
}

Corpus Corpus::ingest_stream(std::istream& in, const std::string& frame_root) {
  Corpus c;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (std::all_of(text.begin(), text.end(), [](unsigned char ch) { return std::isspace(ch); })) continue;
    json rec;
    try {
      rec = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ParseError(line, std::string("malformed JSON: ") + e.what());
    }
    if (!rec.is_object()) throw ParseError(line, "record is not a JSON object");
    VideoDoc v;
    v.video_id = require_string(rec, "video_id", line);
    v.author_id = require_string(rec, "author_id", line);
    const std::string when = require_string(rec, "upload_time", line);
    v.title = optional_string(rec, "title", line);
    v.description = optional_string(rec, "description", line);
    if (auto it = rec.find("view_count"); it != rec.end() && !it->is_null()) {
      if (!it->is_number_integer() || it->get<std::int64_t>() < 0)
        throw ParseError(line, "field 'view_count' must be a non-negative integer");
      v.view_count = it->get<std::uint64_t>();
    }
    v.frames = parse_frames(rec, line, frame_root);
    if (c.video_lookup_.count(v.video_id)) throw ConflictError("duplicate video_id '" + v.video_id + "' at line " + std::to_string(line));
    auto ts = parse_iso8601(when);
    if (!ts) {
      c.rejects_.push_back({line, "unparseable upload_time '" + when + "'"});
      continue;
    }
    v.upload_time = *ts;
    c.video_lookup_.emplace(v.video_id, c.videos_.size());
    c.videos_.push_back(std::move(v));
  }
  c.index();
  const auto frameless = std::count_if(c.videos_.begin(), c.videos_.end(), [](const VideoDoc& v) { return v.frameless(); });
  if (frameless > 0) log_info(std::to_string(frameless) + " video(s) ingested without frames");
  return c;
}

Corpus Corpus::from_videos(std::vector<VideoDoc> videos) {
  Corpus c;
  c.videos_ = std::move(videos);
  for (std::size_t i = 0; i < c.videos_.size(); ++i) {
    if (!c.video_lookup_.emplace(c.videos_[i].video_id, i).second)
      throw ConflictError("duplicate video_id '" + c.videos_[i].video_id + "'");
  }
  c.index();
  return c;
}

void Corpus::index() {
  video_lookup_.clear();
  std::map<std::string, std::vector<std::string>> by_author;
  for (std::size_t i = 0; i < videos_.size(); ++i) {
    video_lookup_.emplace(videos_[i].video_id, i);
    by_author[videos_[i].author_id].push_back(videos_[i].video_id);
  }
  authors_.clear();
  author_lookup_.clear();
  for (auto& [id, vids] : by_author) {
    std::sort(vids.begin(), vids.end());
    author_lookup_.emplace(id, authors_.size());
    authors_.push_back({id, std::move(vids)});
  }
  video_author_.resize(videos_.size());
  for (std::size_t i = 0; i < videos_.size(); ++i) video_author_[i] = author_lookup_.at(videos_[i].author_id);
}

std::optional<std::size_t> Corpus::find_video(std::string_view video_id) const {
  auto it = video_lookup_.find(std::string(video_id));
  if (it == video_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Corpus::find_author(std::string_view author_id) const {
  auto it = author_lookup_.find(std::string(author_id));
  if (it == author_lookup_.end()) return std::nullopt;
  return it->second;
}

void Corpus::save(const std::string& dir) const {
  fs::create_directories(dir);
  std::ostringstream vs;
  for (const auto& v : videos_) vs << video_to_json(v).dump() << '\n';
  write_text_file((fs::path(dir) / "videos.jsonl").string(), vs.str());
  std::ostringstream as;
  for (const auto& a : authors_)
    as << json{{"author_id", a.author_id}, {"video_ids", a.video_ids}, {"productivity", a.productivity()}}.dump() << '\n';
  write_text_file((fs::path(dir) / "authors.jsonl").string(), as.str());
}

Corpus Corpus::load(const std::string& dir) {
  std::ifstream in(fs::path(dir) / "videos.jsonl");
  if (!in) throw Error("cannot open " + (fs::path(dir) / "videos.jsonl").string());
  // Paths were resolved at ingest time.
  Corpus c = ingest_stream(in, "");
  if (!c.rejects_.empty()) throw Error("corrupt corpus store in " + dir);
  return c;
}

void write_rejects(const std::string& path, const std::vector<Reject>& rejects) {
  std::ostringstream out;
  for (const auto& r : rejects) out << json{{"line", r.line}, {"reason", r.reason}}.dump() << '\n';
  write_text_file(path, out.str());
}

TextNormalizer TextNormalizer::load(const std::string& stopword_path, const std::string& dictionary_path) {
  std::unordered_set<std::string> stop;
  {
    std::istringstream in(read_text_file(stopword_path));
    std::string line;
    while (std::getline(in, line)) {
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      std::istringstream words(line);
      std::string w;
      while (words >> w) {
        std::transform(w.begin(), w.end(), w.begin(), [](unsigned char c) { return std::tolower(c); });
        stop.insert(w);
      }
    }
  }
  std::unordered_map<std::string, std::string> dict;
  {
    std::istringstream in(read_text_file(dictionary_path));
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      auto tab = line.find('\t');
      if (tab == std::string::npos) continue;
      std::string from = line.substr(0, tab), to = line.substr(tab + 1);
      while (!to.empty() && (to.back() == '\r' || to.back() == ' ')) to.pop_back();
      if (!from.empty() && !to.empty()) dict[from] = to;
    }
  }
  return TextNormalizer(std::move(stop), std::move(dict));
}

TextNormalizer TextNormalizer::shipped() {
  const std::string dir = VMEME_DATA_DIR;
  return load(dir + "/stopwords.txt", dir + "/normalization.tsv");
}

std::vector<std::string> TextNormalizer::operator()(std::string_view raw) const {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < raw.size()) {
    while (i < raw.size() && !is_word_byte(static_cast<unsigned char>(raw[i]))) ++i;
    std::size_t j = i;
    while (j < raw.size() && is_word_byte(static_cast<unsigned char>(raw[j]))) ++j;
    if (j > i) {
      std::string tok(raw.substr(i, j - i));
      std::transform(tok.begin(), tok.end(), tok.begin(),
                     [](unsigned char c) { return c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c); });
      if (auto it = dictionary_.find(tok); it != dictionary_.end()) tok = it->second;
      if (!tok.empty() && !stopwords_.count(tok)) out.push_back(std::move(tok));
    }
    i = j;
  }
  return out;
}

std::vector<std::string> normalize_text(std::string_view raw, const TextNormalizer& normalizer) {
  return normalizer(raw);
}

std::optional<std::size_t> TextVocabulary::find(std::string_view term) const {
  auto it = lookup_.find(std::string(term));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

void TextVocabulary::rebuild_lookup() {
  lookup_.clear();
  for (std::size_t i = 0; i < terms.size(); ++i) lookup_.emplace(terms[i], i);
}

void TextVocabulary::save_tsv(const std::string& path) const {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t i = 0; i < terms.size(); ++i) out << terms[i] << '\t' << idf[i] << '\n';
  write_text_file(path, out.str());
}

TextVocabulary TextVocabulary::load_tsv(const std::string& path) {
  TextVocabulary v;
  std::istringstream in(read_text_file(path));
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(n, "expected term<TAB>idf");
    v.terms.push_back(line.substr(0, tab));
    v.idf.push_back(std::stod(line.substr(tab + 1)));
  }
  v.rebuild_lookup();
  return v;
}

double smooth_idf(std::size_t documents, std::size_t df) {
  return std::log((1.0 + static_cast<double>(documents)) / (1.0 + static_cast<double>(df))) + 1.0;
}

std::vector<std::vector<std::string>> document_tokens(const Corpus& corpus, const TextNormalizer& normalizer) {
  std::vector<std::vector<std::string>> docs;
  docs.reserve(corpus.videos().size());
  for (const auto& v : corpus.videos()) docs.push_back(normalizer(v.title + " " + v.description));
  return docs;
}

TextVocabulary build_vocabulary(const std::vector<std::vector<std::string>>& docs, std::size_t cap,
                                const BackgroundDf* background) {
  if (docs.empty()) throw InvalidArgument("build_vocabulary: empty corpus");
  if (cap == 0) throw InvalidArgument("build_vocabulary: cap must be >= 1");
  std::unordered_map<std::string, std::pair<std::size_t, std::size_t>> stats;  // term -> (tf, df)
  for (const auto& doc : docs) {
    std::unordered_set<std::string_view> seen;
    for (const auto& tok : doc) {
      auto& s = stats[tok];
      ++s.first;
      if (seen.insert(tok).second) ++s.second;
    }
  }
  struct Scored {
    std::string term;
    double score;
    double idf;
  };
  std::vector<Scored> scored;
  scored.reserve(stats.size());
  for (const auto& [term, s] : stats) {
    double idf;
    if (background) {
      auto it = background->df.find(term);
      idf = smooth_idf(background->documents, it == background->df.end() ? 0 : it->second);
    } else {
      idf = smooth_idf(docs.size(), s.second);
    }
    scored.push_back({term, static_cast<double>(s.first) * idf, idf});
  }
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.term < b.term;
  });
  if (scored.size() > cap) scored.resize(cap);
  TextVocabulary vocab;
  for (auto& s : scored) {
    vocab.terms.push_back(std::move(s.term));
    vocab.idf.push_back(s.idf);
  }
  vocab.rebuild_lookup();
  return vocab;
}

TextVocabulary build_vocabulary(const Corpus& corpus, const TextNormalizer& normalizer, std::size_t cap,
                                const BackgroundDf* background) {
  return build_vocabulary(document_tokens(corpus, normalizer), cap, background);
}

std::size_t BagOfWords::total() const {
  std::size_t n = 0;
  for (const auto& [t, c] : counts) n += c;
  return n;
}

BagOfWords make_bag(std::string doc_id, const std::vector<std::string>& tokens, const TextVocabulary& vocab) {
  std::map<std::uint32_t, std::uint32_t> counts;
  for (const auto& tok : tokens)
    if (auto idx = vocab.find(tok)) ++counts[static_cast<std::uint32_t>(*idx)];
  BagOfWords bag{std::move(doc_id), {}};
  bag.counts.assign(counts.begin(), counts.end());
  return bag;
}

}  // namespace vmeme::corpus

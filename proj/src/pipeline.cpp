#include "vmeme/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>

#include "json.hpp"
#include "vmeme/ann.hpp"
#include "vmeme/centrality.hpp"
#include "vmeme/correlogram.hpp"
#include "vmeme/image.hpp"
#include "vmeme/imgproc.hpp"
#include "vmeme/memegraph.hpp"
#include "vmeme/predict.hpp"
#include "vmeme/report.hpp"

namespace vmeme::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::Built: return "built";
    case Outcome::UpToDate: return "up-to-date";
    case Outcome::NotApplicable: return "not applicable";
  }
  return "?";
}

const std::vector<std::string>& stage_order() {
  static const std::vector<std::string> order{"ingest", "shots", "features", "index", "detect",
                                              "evaluate", "graph", "topics", "predict", "report"};
  return order;
}

const std::vector<std::string>& upstream_of(const std::string& stage) {
  static const std::map<std::string, std::vector<std::string>> up{
      {"ingest", {}},
      {"shots", {"ingest"}},
      {"features", {"shots"}},
      {"index", {"features"}},
      {"detect", {"index"}},
      {"evaluate", {"detect"}},
      {"graph", {"detect"}},
      {"topics", {"detect"}},
      {"predict", {"detect", "topics"}},
      {"report", {"graph", "predict", "evaluate"}},
  };
  auto it = up.find(stage);
  if (it == up.end()) throw InvalidArgument("unknown stage '" + stage + "'");
  return it->second;
}

namespace {

const std::vector<std::string>& config_keys(const std::string& stage) {
  static const std::map<std::string, std::vector<std::string>> keys{
      {"ingest", {"vocab_cap"}},
      {"shots", {"shot_threshold", "seed"}},
      {"features", {"blank_entropy", "border_var", "clip_limit", "tiles"}},
      {"index", {"index", "budget", "trees", "branching", "seed"}},
      {"detect", {"tau", "knn"}},
      {"evaluate", {"tau_grid"}},
      {"graph", {"eta", "weight_variant"}},
      {"topics", {"topics_k", "meme_vocab", "lda_iters", "lda_tol", "seed"}},
      {"predict",
       {"delta_days", "min_volume", "splits", "min_corr", "targets", "feature_sets", "seed", "eta", "weight_variant"}},
      {"report", {"zipf_min_count", "timeline_top"}},
  };
  return keys.at(stage);
}

bool applicable(const Config& config, const std::string& stage) {
  return stage != "evaluate" || !config.get("labels").empty();
}

std::uint64_t seed_of(const Config& c) { return static_cast<std::uint64_t>(c.integer("seed")); }

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string manifest_path(const Config& c) {
  const auto& m = c.get("manifest");
  if (m.empty()) throw StageError("ingest", "no manifest configured (pass --manifest or set manifest in the config)");
  if (!fs::exists(m)) throw StageError("ingest", "manifest not found: " + m);
  return m;
}

// Keys of upstream stages as recorded, with "-" for stages that do not apply.
std::map<std::string, std::string> upstream_keys(const Workspace& ws, const Config& config, const std::string& stage) {
  std::map<std::string, std::string> out;
  for (const auto& u : upstream_of(stage)) {
    if (!applicable(config, u)) {
      out[u] = "-";
      continue;
    }
    auto rec = ws.record(u);
    if (!rec) throw StageError(stage, "upstream stage '" + u + "' has not been built; run `vmeme " + u + "` first");
    out[u] = rec->key;
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---- artifact helpers ----

struct ShotRow {
  std::string video_id;
  int shot = 0;
  std::string keyframe;
};

std::vector<ShotRow> load_shots(const Workspace& ws) {
  std::istringstream in(read_text_file(ws.path("shots", "shots.jsonl")));
  std::vector<ShotRow> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = json::parse(line);
    out.push_back({j.at("video_id").get<std::string>(), j.at("shot").get<int>(), j.at("keyframe").get<std::string>()});
  }
  return out;
}

ann::IndexParams index_params(const Config& c) {
  ann::IndexParams p;
  p.kind = ann::parse_index_kind(c.get("index"));
  const long budget = c.integer("budget");
  if (budget < 0) throw InvalidArgument("budget must be >= 0");
  p.budget = static_cast<std::size_t>(budget);
  p.trees = static_cast<int>(c.integer("trees"));
  p.branching = static_cast<int>(c.integer("branching"));
  p.seed = seed_of(c);
  return p;
}

struct TextInputs {
  corpus::TextVocabulary vocab;
  std::vector<corpus::BagOfWords> bags;
};

TextInputs load_text(const Workspace& ws, const corpus::Corpus& corpus) {
  TextInputs t;
  t.vocab = corpus::TextVocabulary::load_tsv(ws.path("ingest", "vocab.tsv"));
  const auto normalizer = corpus::TextNormalizer::shipped();
  const auto tokens = corpus::document_tokens(corpus, normalizer);
  t.bags.reserve(tokens.size());
  for (std::size_t v = 0; v < tokens.size(); ++v)
    t.bags.push_back(corpus::make_bag(corpus.videos()[v].video_id, tokens[v], t.vocab));
  return t;
}

// Serial for loop body errors: the first failing index wins so the message
// does not depend on scheduling.
class FirstError {
 public:
  void record(std::size_t index, const std::string& message) {
    std::lock_guard<std::mutex> lock(mu_);
    if (!index_ || index < *index_) {
      index_ = index;
      message_ = message;
    }
  }
  void rethrow() const {
    if (index_) throw Error(message_);
  }

 private:
  std::mutex mu_;
  std::optional<std::size_t> index_;
  std::string message_;
};

// ---- stages ----

void build_ingest(const Workspace& ws, const Config& c) {
  const auto manifest = manifest_path(c);
  corpus::IngestOptions opts;
  opts.frame_root = fs::absolute(manifest).parent_path().string();
  const auto corpus = corpus::Corpus::ingest_manifest(manifest, opts);
  if (corpus.videos().empty()) throw Error("manifest has no valid records");
  const auto dir = ws.dir("ingest");
  corpus.save(dir);
  corpus::write_rejects(ws.path("ingest", "rejects.jsonl"), corpus.rejects());
  const auto vocab =
      corpus::build_vocabulary(corpus, corpus::TextNormalizer::shipped(), static_cast<std::size_t>(c.integer("vocab_cap")));
  vocab.save_tsv(ws.path("ingest", "vocab.tsv"));
  log_info("ingest: " + std::to_string(corpus.videos().size()) + " videos, " + std::to_string(corpus.authors().size()) +
           " authors, " + std::to_string(corpus.rejects().size()) + " rejects, " + std::to_string(vocab.size()) +
           " vocabulary terms");
}

void build_shots(const Workspace& ws, const Config& c) {
  const auto corpus = load_corpus(ws);
  const double threshold = c.number("shot_threshold");
  const auto seed = seed_of(c);
  const auto& videos = corpus.videos();
  std::vector<std::vector<ShotRow>> per_video(videos.size());
  FirstError err;
  parallel_for(videos.size(), [&](std::size_t v) {
    const auto& doc = videos[v];
    if (doc.frameless()) return;
    try {
      std::vector<imgproc::RawFrame> frames;
      frames.reserve(doc.frames.size());
      for (const auto& f : doc.frames) frames.push_back({read_image(f.path), doc.video_id, f.t_offset_s});
      for (const auto& s : imgproc::segment_shots(frames, threshold, seed))
        per_video[v].push_back({doc.video_id, s.shot_index, doc.frames[s.keyframe].path});
    } catch (const std::exception& e) {
      err.record(v, "video " + doc.video_id + ": " + e.what());
    }
  });
  err.rethrow();
  std::ostringstream out;
  std::size_t shots = 0;
  for (const auto& rows : per_video)
    for (const auto& r : rows) {
      out << json{{"video_id", r.video_id}, {"shot", r.shot}, {"keyframe", r.keyframe}}.dump() << '\n';
      ++shots;
    }
  write_text_file(ws.path("shots", "shots.jsonl"), out.str());
  log_info("shots: " + std::to_string(shots) + " keyframes");
}

void build_features(const Workspace& ws, const Config& c) {
  const auto shots = load_shots(ws);
  imgproc::PrepOptions prep;
  prep.blank_entropy = c.number("blank_entropy");
  prep.border_var = c.number("border_var");
  prep.clip_limit = c.number("clip_limit");
  prep.tiles = static_cast<int>(c.integer("tiles"));
  const auto& distances = correlogram::default_distances();

  std::vector<std::vector<float>> rows(shots.size());
  std::vector<std::string> skip_reason(shots.size());
  FirstError err;
  const auto t0 = std::chrono::steady_clock::now();
  parallel_for(shots.size(), [&](std::size_t i) {
    try {
      const auto prepared = imgproc::prepare_frame(read_image(shots[i].keyframe), prep);
      if (prepared.blank) {
        skip_reason[i] = "blank";
        return;
      }
      rows[i] = correlogram::to_floats(correlogram::extract(prepared, distances));
    } catch (const DegenerateInput& e) {
      skip_reason[i] = e.what();
    } catch (const std::exception& e) {
      err.record(i, shots[i].keyframe + ": " + e.what());
    }
  });
  err.rethrow();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  FeatureMatrix m(0, correlogram::kDim);
  std::ostringstream frames, skipped;
  std::size_t n = 0;
  for (std::size_t i = 0; i < shots.size(); ++i) {
    if (!skip_reason[i].empty()) {
      skipped << json{{"video_id", shots[i].video_id}, {"shot", shots[i].shot}, {"reason", skip_reason[i]}}.dump()
              << '\n';
      continue;
    }
    m.append(rows[i]);
    frames << json{{"row", n++}, {"video_id", shots[i].video_id}, {"shot", shots[i].shot}}.dump() << '\n';
  }
  write_vmf(ws.path("features", "features.vmf"), m);
  write_text_file(ws.path("features", "frames.jsonl"), frames.str());
  write_text_file(ws.path("features", "skipped.jsonl"), skipped.str());
  char rate[64];
  std::snprintf(rate, sizeof rate, "%.2f s per 1k frames", shots.empty() ? 0.0 : secs * 1000.0 / shots.size());
  log_info("features: " + std::to_string(n) + " rows, " + std::to_string(shots.size() - n) + " skipped, " + rate);
}

std::shared_ptr<const FeatureMatrix> load_matrix(const Workspace& ws) {
  return std::make_shared<const FeatureMatrix>(read_vmf(ws.path("features", "features.vmf")));
}

void build_index(const Workspace& ws, const Config& c) {
  const auto m = load_matrix(ws);
  json j{{"rows", m->rows}};
  if (m->rows < 2) {
    j["kind"] = "none";
  } else {
    const auto idx = ann::AnnIndex::build(m, index_params(c));
    const auto& p = idx.probe();
    j["kind"] = ann::to_string(idx.kind());
    j["budget"] = idx.budget();
    j["probe"] = {{"queries", p.queries},
                  {"kd_recall", p.kd_recall},
                  {"kmeans_recall", p.kmeans_recall},
                  {"kd_cost", p.kd_cost},
                  {"kmeans_cost", p.kmeans_cost}};
    log_info("index: " + ann::to_string(idx.kind()) + ", budget " + std::to_string(idx.budget()));
  }
  write_text_file(ws.path("index", "index.json"), j.dump(1) + "\n");
}

void write_candidates(const std::string& path, const std::vector<memedetect::Candidate>& cands) {
  std::ostringstream out;
  out << "query,neighbor,distance\n";
  for (const auto& k : cands) out << k.query << ',' << k.neighbor << ',' << fmt(k.distance) << '\n';
  write_text_file(path, out.str());
}

std::vector<memedetect::Candidate> read_candidates(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::vector<memedetect::Candidate> out;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    memedetect::Candidate k;
    unsigned long q = 0, nb = 0;
    if (std::sscanf(line.c_str(), "%lu,%lu,%lf", &q, &nb, &k.distance) != 3) throw Error("bad candidate line: " + line);
    k.query = static_cast<std::uint32_t>(q);
    k.neighbor = static_cast<std::uint32_t>(nb);
    out.push_back(k);
  }
  return out;
}

void build_detect(const Workspace& ws, const Config& c) {
  const auto corpus = load_corpus(ws);
  const auto frames = load_frames(ws, corpus);
  const auto m = load_matrix(ws);
  const double tau = c.number("tau");
  const long knn = c.integer("knn");
  if (knn < 1) throw InvalidArgument("knn must be >= 1");

  std::vector<memedetect::Candidate> cands;
  double max_norm = 0.0;
  std::string kind = "none";
  if (m->rows >= 2) {
    const auto idx = ann::AnnIndex::build(m, index_params(c));
    kind = ann::to_string(idx.kind());
    cands = memedetect::collect_candidates(idx, static_cast<std::size_t>(knn));
    max_norm = correlogram::collection_max(*m).l2_norm;
  }
  const auto norms = memedetect::row_norms(*m);
  std::vector<memedetect::MatchPair> pairs;
  if (max_norm > 0.0) pairs = memedetect::threshold_candidates(cands, norms, max_norm, tau);
  const auto components = memedetect::close_clusters(pairs);
  const auto clusters = memedetect::filter_clusters(components, frames, corpus);

  memedetect::write_clusters_jsonl(ws.path("detect", "clusters.jsonl"), clusters, corpus);
  memedetect::write_pairs_csv(ws.path("detect", "pairs.csv"), pairs, frames, corpus);
  write_candidates(ws.path("detect", "candidates.csv"), cands);
  json j{{"rows", m->rows},      {"index", kind},           {"tau", tau},
         {"knn", knn},           {"max_norm", max_norm},    {"candidates", cands.size()},
         {"pairs", pairs.size()}, {"components", components.size()}, {"memes", clusters.size()}};
  write_text_file(ws.path("detect", "detect.json"), j.dump(1) + "\n");
  log_info("detect: " + std::to_string(pairs.size()) + " pairs, " + std::to_string(components.size()) +
           " components, " + std::to_string(clusters.size()) + " memes");
}

void build_evaluate(const Workspace& ws, const Config& c) {
  const auto corpus = load_corpus(ws);
  const auto frames = load_frames(ws, corpus);
  const auto m = load_matrix(ws);
  const auto labels = memedetect::read_labels_csv(c.get("labels"), frames, corpus);
  const auto cands = read_candidates(ws.path("detect", "candidates.csv"));
  const auto norms = memedetect::row_norms(*m);
  const double max_norm = m->rows ? correlogram::collection_max(*m).l2_norm : 0.0;
  auto taus = c.numbers("tau_grid");
  const double tau = c.number("tau");
  taus.push_back(tau);
  std::sort(taus.begin(), taus.end());
  taus.erase(std::unique(taus.begin(), taus.end()), taus.end());
  const auto sweep = memedetect::sweep_tau(cands, norms, max_norm, taus, labels);

  std::ostringstream out;
  out << "tau,pair_precision,pair_recall,pair_f1,cluster_precision,cluster_recall,cluster_f1,true_pos,false_pos,"
         "false_neg\n";
  json at;
  for (const auto& p : sweep) {
    out << report::num(p.tau) << ',' << report::num(p.pairs.precision) << ',' << report::num(p.pairs.recall) << ','
        << report::num(p.pairs.f1) << ',' << report::num(p.clusters.precision) << ','
        << report::num(p.clusters.recall) << ',' << report::num(p.clusters.f1) << ',' << p.pairs.true_pos << ','
        << p.pairs.false_pos << ',' << p.pairs.false_neg << '\n';
    if (p.tau == tau)
      at = {{"tau", tau},
            {"pair_precision", p.pairs.precision},
            {"pair_recall", p.pairs.recall},
            {"pair_f1", p.pairs.f1},
            {"cluster_precision", p.clusters.precision},
            {"cluster_recall", p.clusters.recall},
            {"cluster_f1", p.clusters.f1}};
  }
  write_text_file(ws.path("evaluate", "sweep.csv"), out.str());
  write_text_file(ws.path("evaluate", "evaluate.json"), json{{"labels", labels.size()}, {"operating_point", at}}.dump(1) + "\n");
  log_info("evaluate: " + std::to_string(labels.size()) + " labeled pairs, F1 " + report::num(at.value("pair_f1", 0.0)) +
           " at tau " + report::num(tau));
}

void build_graph(const Workspace& ws, const Config& c) {
  const auto det = load_detection(ws);
  const auto variant = memegraph::parse_weight_variant(c.get("weight_variant"));
  const auto vg = memegraph::build_video_graph(det.clusters, det.corpus, c.number("eta"));
  const auto ag = memegraph::build_author_graph(vg, det.corpus, variant);
  const auto inf = memegraph::influence_indices(det.clusters, det.corpus);
  const auto orig = memegraph::originality_index(det.clusters, det.corpus);
  const auto cen = graph::centralities(memegraph::adjacency(ag));

  memegraph::write_video_edges_csv(ws.path("graph", "video_edges.csv"), vg, det.corpus);
  memegraph::write_author_edges_csv(ws.path("graph", "author_edges.csv"), ag, det.corpus);
  memegraph::write_influence_csv(ws.path("graph", "influence.csv"), inf, det.corpus);
  memegraph::write_originality_csv(ws.path("graph", "originality.csv"), orig, det.corpus);
  std::ostringstream out;
  out << "author_id,degree,closeness,betweenness\n";
  for (std::size_t i = 0; i < ag.nodes.size(); ++i)
    out << det.corpus.authors()[ag.nodes[i]].author_id << ',' << report::num(cen.degree[i]) << ','
        << report::num(cen.closeness[i]) << ',' << report::num(cen.betweenness[i]) << '\n';
  write_text_file(ws.path("graph", "author_centrality.csv"), out.str());
  json j{{"video_nodes", vg.nodes.size()},   {"video_edges", vg.edges.size()},
         {"author_nodes", ag.nodes.size()},  {"author_edges", ag.edges.size()},
         {"acyclic", memegraph::is_acyclic(vg)}, {"simultaneous_pairs", vg.simultaneous_pairs}};
  write_text_file(ws.path("graph", "graph.json"), j.dump(1) + "\n");
  log_info("graph: " + std::to_string(vg.nodes.size()) + " videos, " + std::to_string(vg.edges.size()) + " edges, " +
           std::to_string(ag.edges.size()) + " author edges");
}

topics::LdaOptions lda_options(const Config& c) {
  topics::LdaOptions o;
  o.k = static_cast<int>(c.integer("topics_k"));
  if (o.k < 1) throw InvalidArgument("topics_k must be >= 1");
  o.max_iters = static_cast<int>(c.integer("lda_iters"));
  o.tol = c.number("lda_tol");
  o.seed = seed_of(c);
  return o;
}

struct JointInputs {
  topics::JointVocabulary vocab;
  std::vector<topics::Document> docs;
};

JointInputs joint_inputs(const Workspace& ws, const DetectArtifacts& det, std::size_t cap) {
  const auto text = load_text(ws, det.corpus);
  const auto occ = meme_occurrences(det.clusters);
  JointInputs j;
  j.vocab = topics::build_joint_vocabulary(text.vocab, occ, cap);
  j.docs = topics::build_documents(text.bags, j.vocab, occ, det.corpus.videos().size());
  return j;
}

void build_topics(const Workspace& ws, const Config& c) {
  const auto det = load_detection(ws);
  const auto joint = joint_inputs(ws, det, static_cast<std::size_t>(c.integer("meme_vocab")));
  if (joint.vocab.size() == 0) throw DegenerateInput("joint vocabulary is empty");
  const auto model = topics::fit_lda(joint.docs, joint.vocab.size(), lda_options(c));
  const auto dir = ws.dir("topics") + "/model";
  topics::save_model(dir, model, joint.vocab);

  std::ostringstream out;
  out << "topic,rank,term,probability\n";
  for (int k = 0; k < model.k; ++k) {
    std::vector<topics::ScoredTerm> terms;
    const auto row = model.phi_row(k);
    for (std::size_t w = 0; w < row.size(); ++w) terms.push_back({static_cast<std::uint32_t>(w), row[w]});
    topics::rank_terms(terms);
    for (std::size_t r = 0; r < std::min<std::size_t>(10, terms.size()); ++r)
      out << k << ',' << r + 1 << ',' << joint.vocab.label(terms[r].term) << ',' << report::num(terms[r].score) << '\n';
  }
  write_text_file(ws.path("topics", "top_terms.csv"), out.str());
  log_info("topics: K=" + std::to_string(model.k) + ", " + std::to_string(joint.vocab.text_size()) + " text + " +
           std::to_string(joint.vocab.meme_size()) + " meme terms, " + std::to_string(model.bound_history.size()) +
           " EM iterations, alpha " + report::num(model.alpha));
}

void build_predict(const Workspace& ws, const Config& c) {
  const auto det = load_detection(ws);
  const auto top = load_topics(ws, det);
  const auto text = load_text(ws, det.corpus);
  predict::ContentInputs content;
  content.text_bags = &text.bags;
  content.text_vocab_size = text.vocab.size();
  content.joint_vocab = &top.vocab;
  content.joint_docs = &top.docs;
  content.model = &top.model;
  predict::AssembleOptions ao;
  ao.delta_days = c.number("delta_days");
  ao.min_volume = static_cast<std::size_t>(c.integer("min_volume"));
  ao.eta = c.number("eta");
  ao.weights = memegraph::parse_weight_variant(c.get("weight_variant"));
  const auto table = predict::assemble_features(det.clusters, det.corpus, content, ao);
  predict::save_features(ws.path("predict", "features.vmf"), ws.path("predict", "features.schema.json"), table);

  predict::EvalOptions eo;
  eo.splits = static_cast<std::size_t>(c.integer("splits"));
  eo.seed = seed_of(c);
  eo.train.min_corr = c.number("min_corr");
  eo.train.seed = seed_of(c);
  predict::RegressionReport rep;
  json skipped = json::array();
  for (const auto& t : c.list("targets")) {
    const auto target = predict::parse_target(t);
    for (const auto& fs_name : c.list("feature_sets")) {
      try {
        if (table.rows.size() < 40)
          throw DegenerateInput(std::to_string(table.rows.size()) + " memes are too few for a train/test split");
        rep.results.push_back(predict::evaluate_regressor(table, fs_name, target, eo));
      } catch (const DegenerateInput& e) {
        skipped.push_back({{"target", t}, {"feature_set", fs_name}, {"reason", e.what()}});
        log_warn("predict: " + t + " / " + fs_name + " skipped: " + e.what());
      }
    }
  }
  predict::write_report_json(ws.path("predict", "report.json"), rep);
  predict::write_report_csv(ws.path("predict", "report.csv"), rep);
  write_text_file(ws.path("predict", "predict.json"),
                  json{{"memes", table.rows.size()}, {"columns", table.dim()}, {"skipped", skipped}}.dump(1) + "\n");
  log_info("predict: " + std::to_string(table.rows.size()) + " memes x " + std::to_string(table.dim()) + " columns, " +
           std::to_string(rep.results.size()) + " configurations");
}

void build(const Workspace& ws, const Config& c, const std::string& stage) {
  if (stage == "ingest") return build_ingest(ws, c);
  if (stage == "shots") return build_shots(ws, c);
  if (stage == "features") return build_features(ws, c);
  if (stage == "index") return build_index(ws, c);
  if (stage == "detect") return build_detect(ws, c);
  if (stage == "evaluate") return build_evaluate(ws, c);
  if (stage == "graph") return build_graph(ws, c);
  if (stage == "topics") return build_topics(ws, c);
  if (stage == "predict") return build_predict(ws, c);
  if (stage == "report") {
    report::emit_reports(ws, c);
    return;
  }
  throw InvalidArgument("unknown stage '" + stage + "'");
}

}  // namespace

std::string stage_key(const Workspace& ws, const Config& config, const std::string& stage) {
  Fnv1a h;
  h.update(stage).update("\n").update(config.subset(config_keys(stage)).dump()).update("\n");
  if (stage == "ingest") h.update(hex64(hash_file(manifest_path(config))));
  if (stage == "evaluate" && applicable(config, stage)) {
    const auto& labels = config.get("labels");
    if (!fs::exists(labels)) throw StageError(stage, "labels file not found: " + labels);
    h.update(hex64(hash_file(labels)));
  }
  for (const auto& [u, k] : upstream_keys(ws, config, stage)) h.update(u).update("=").update(k).update("\n");
  return h.hex();
}

bool up_to_date(const Workspace& ws, const Config& config, const std::string& stage) {
  if (!applicable(config, stage)) return true;
  const auto rec = ws.record(stage);
  return rec && rec->key == stage_key(ws, config, stage);
}

StageStatus run_stage(const Workspace& ws, const Config& config, const std::string& stage, bool force) {
  upstream_of(stage);  // validates the name
  StageStatus st{stage, Outcome::Built, 0.0};
  if (!applicable(config, stage)) {
    ws.clear_record(stage);
    st.outcome = Outcome::NotApplicable;
    return st;
  }
  set_thread_limit(static_cast<unsigned>(std::max(0L, config.integer("threads"))));
  for (const auto& u : upstream_of(stage))
    if (!up_to_date(ws, config, u))
      throw StageError(stage, "upstream stage '" + u + "' is missing or stale; run `vmeme " + u + "` first");
  const auto key = stage_key(ws, config, stage);
  const auto rec = ws.record(stage);
  if (!force && rec && rec->key == key) {
    st.outcome = Outcome::UpToDate;
    log_info("[" + stage + "] up-to-date");
    return st;
  }
  ws.clear_record(stage);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    build(ws, config, stage);
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
  st.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  ws.write_record({stage, key, config.subset(config_keys(stage)), upstream_keys(ws, config, stage)});
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2fs", st.seconds);
  log_info("[" + stage + "] built in " + buf);
  return st;
}

std::vector<StageStatus> run_pipeline(const Workspace& ws, const Config& config, bool force) {
  std::vector<StageStatus> out;
  for (const auto& s : stage_order()) out.push_back(run_stage(ws, config, s, force));
  return out;
}

corpus::Corpus load_corpus(const Workspace& ws) {
  if (!ws.record("ingest")) throw Error("stage 'ingest' has not been built; run `vmeme ingest` first");
  return corpus::Corpus::load(ws.dir("ingest"));
}

std::vector<memedetect::FrameKey> load_frames(const Workspace& ws, const corpus::Corpus& corpus) {
  std::istringstream in(read_text_file(ws.path("features", "frames.jsonl")));
  std::vector<memedetect::FrameKey> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = json::parse(line);
    const auto v = corpus.find_video(j.at("video_id").get<std::string>());
    if (!v) throw Error("frames.jsonl references unknown video " + j.at("video_id").get<std::string>());
    out.push_back({static_cast<std::uint32_t>(*v), j.at("shot").get<int>()});
  }
  return out;
}

DetectArtifacts load_detection(const Workspace& ws) {
  if (!ws.record("detect")) throw Error("stage 'detect' has not been built; run `vmeme detect` first");
  DetectArtifacts d;
  d.corpus = load_corpus(ws);
  d.frames = load_frames(ws, d.corpus);
  d.clusters = memedetect::read_clusters_jsonl(ws.path("detect", "clusters.jsonl"), d.corpus);
  return d;
}

TopicArtifacts load_topics(const Workspace& ws, const DetectArtifacts& det) {
  if (!ws.record("topics")) throw Error("stage 'topics' has not been built; run `vmeme topics fit` first");
  TopicArtifacts t;
  t.model = topics::load_model(ws.dir("topics") + "/model", &t.vocab);
  const auto text = load_text(ws, det.corpus);
  t.docs = topics::build_documents(text.bags, t.vocab, meme_occurrences(det.clusters), det.corpus.videos().size());
  return t;
}

std::vector<topics::MemeOccurrence> meme_occurrences(const std::vector<memedetect::MemeCluster>& clusters) {
  std::vector<topics::MemeOccurrence> out;
  for (const auto& c : clusters) {
    for (std::size_t i = 0; i < c.members.size();) {
      std::size_t j = i;
      while (j < c.members.size() && c.members[j].video == c.members[i].video) ++j;
      out.push_back({c.meme_id, c.members[i].video, static_cast<std::uint32_t>(j - i)});
      i = j;
    }
  }
  return out;
}

}  // namespace vmeme::pipeline

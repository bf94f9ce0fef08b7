#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vmeme/memegraph.hpp"
#include "vmeme/pipeline.hpp"
#include "vmeme/report.hpp"
#include "vmeme/synth.hpp"
#include "vmeme/topics.hpp"
#include "vmeme/workspace.hpp"

namespace fs = std::filesystem;
using namespace vmeme;

namespace {

// Flag -> config key. Only flags the user actually passed override the file.
struct Overrides {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::vector<std::string> sets;  // --set key=value
};

struct Globals {
  std::string workspace;
  std::string config_file;
  bool force = false;
  bool quiet = false;
};

void add_flag(CLI::App& app, Overrides& ov, const std::string& flag, const std::string& key, const std::string& help) {
  app.add_option_function<std::string>(
      flag, [&ov, key](const std::string& v) { ov.pairs.emplace_back(key, v); }, help);
}

Config effective_config(const Workspace* ws, const Globals& g, const Overrides& ov) {
  Config c;
  if (ws && fs::exists(ws->config_path())) c.load_file(ws->config_path());
  if (!g.config_file.empty()) c.load_file(g.config_file);
  for (const auto& [k, v] : ov.pairs) c.set(k, v);
  for (const auto& s : ov.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw InvalidArgument("--set expects key=value, got '" + s + "'");
    c.set(s.substr(0, eq), s.substr(eq + 1));
  }
  return c;
}

void print_status(const std::vector<pipeline::StageStatus>& st) {
  for (const auto& s : st) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-9s %-15s %8.2fs", s.stage.c_str(), pipeline::to_string(s.outcome).c_str(),
                  s.seconds);
    std::cout << buf << '\n';
  }
}

void print_terms(const std::vector<topics::ScoredTerm>& terms, const topics::JointVocabulary& vocab, std::size_t top) {
  for (std::size_t i = 0; i < std::min(top, terms.size()); ++i)
    std::cout << i + 1 << '\t' << vocab.label(terms[i].term) << '\t' << report::num(terms[i].score) << '\n';
}

int annotate(const Workspace& ws, std::optional<long> meme, const std::string& word, std::size_t top) {
  const auto det = pipeline::load_detection(ws);
  const auto t = pipeline::load_topics(ws, det);
  topics::Cm2Query q;
  topics::Modality from;
  if (meme) {
    const auto it = std::find(t.vocab.meme_ids.begin(), t.vocab.meme_ids.end(), static_cast<std::uint32_t>(*meme));
    if (it == t.vocab.meme_ids.end())
      throw InvalidArgument("meme " + std::to_string(*meme) + " is not in the topic model vocabulary");
    q.words = {t.vocab.meme_term(static_cast<std::size_t>(it - t.vocab.meme_ids.begin()))};
    q.candidates = topics::Modality::Text;
    from = topics::Modality::Meme;
  } else {
    const auto it = std::find(t.vocab.text_terms.begin(), t.vocab.text_terms.end(), word);
    if (it == t.vocab.text_terms.end()) throw InvalidArgument("term '" + word + "' is not in the vocabulary");
    q.words = {static_cast<std::uint32_t>(it - t.vocab.text_terms.begin())};
    q.candidates = topics::Modality::Meme;
    from = topics::Modality::Text;
  }
  const auto theta = topics::infer_corpus_theta(t.model, t.docs, t.vocab, from);
  print_terms(topics::cm2_score(t.model, theta, t.docs, t.vocab, q), t.vocab, top);
  return 0;
}

int influence(const Workspace& ws, std::size_t top) {
  const auto det = pipeline::load_detection(ws);
  const auto inf = memegraph::influence_indices(det.clusters, det.corpus);
  std::vector<std::size_t> order(det.corpus.authors().size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return inf.chi_hat[a] > inf.chi_hat[b]; });
  std::cout << "author_id\tproductivity\tchi_hat\tchi_bar\tin_degree\tout_degree\n";
  for (std::size_t i = 0; i < std::min(top, order.size()); ++i) {
    const auto a = order[i];
    std::cout << det.corpus.authors()[a].author_id << '\t' << det.corpus.authors()[a].productivity() << '\t'
              << report::num(inf.chi_hat[a]) << '\t' << report::num(inf.chi_bar[a]) << '\t' << inf.author_in_degree[a]
              << '\t' << inf.author_out_degree[a] << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vmeme: visual meme detection, diffusion graphs, topic annotation and popularity prediction"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  Overrides ov;
  app.add_option("--workspace", g.workspace, "Workspace root (default: $VMEME_WORKSPACE)");
  app.add_option("--config", g.config_file, "key = value config file; flags win over it");
  app.add_flag("--force", g.force, "Rebuild stages even when up to date");
  app.add_flag("--quiet", g.quiet, "Silence progress logging");
  app.add_option("--set", ov.sets, "Override any config key (key=value, repeatable)");
  add_flag(app, ov, "--seed", "seed", "Random seed");
  add_flag(app, ov, "--threads", "threads", "Worker cap (0 = all cores)");
  add_flag(app, ov, "--manifest", "manifest", "Corpus manifest (JSON Lines)");
  add_flag(app, ov, "--labels", "labels", "Labeled frame pairs CSV for eval-detect");
  add_flag(app, ov, "--shot-threshold", "shot_threshold", "Histogram L1 distance that cuts a shot");
  add_flag(app, ov, "--blank-entropy", "blank_entropy", "Entropy (bits) below which a frame is blank");
  add_flag(app, ov, "--border-var", "border_var", "Luma variance below which an edge line is border");
  add_flag(app, ov, "--index", "index", "auto | kdforest | kmeans | linear");
  add_flag(app, ov, "--budget", "budget", "Leaf candidates per query (0 = sqrt(N))");
  add_flag(app, ov, "--tau", "tau", "Near-duplicate threshold scale");
  add_flag(app, ov, "--knn", "knn", "Neighbors retrieved per keyframe");
  add_flag(app, ov, "--eta", "eta", "Time decay exponent of video edge weights");
  add_flag(app, ov, "--weight-variant", "weight_variant", "star | prime");
  add_flag(app, ov, "--splits", "splits", "Random train/test splits");

  auto* demo = app.add_subcommand("demo", "Write the synthetic demo corpus");
  std::string demo_out;
  synth::DemoOptions demo_opts;
  demo->add_option("--out", demo_out, "Output directory")->required();
  demo->add_option("--keyframes", demo_opts.keyframes, "Keyframes");
  demo->add_option("--groups", demo_opts.groups, "Planted duplicate groups");
  demo->add_option("--demo-seed", demo_opts.seed, "Generator seed");

  std::vector<std::pair<CLI::App*, std::string>> stage_cmds;
  auto stage_cmd = [&](const std::string& name, const std::string& stage, const std::string& help) {
    auto* c = app.add_subcommand(name, help);
    stage_cmds.emplace_back(c, stage);
    return c;
  };
  stage_cmd("ingest", "ingest", "Parse the manifest, build the text vocabulary");
  stage_cmd("shots", "shots", "Segment shots and pick keyframes");
  stage_cmd("features", "features", "Prepare keyframes and extract correlograms");
  stage_cmd("index", "index", "Build and probe the nearest-neighbor index");
  stage_cmd("detect", "detect", "Match keyframes and close meme clusters");
  stage_cmd("eval-detect", "evaluate", "Score detection against labeled pairs over a tau sweep");
  stage_cmd("graph", "graph", "Video and author diffusion graphs, influence, originality");
  auto* predict_cmd = stage_cmd("predict", "predict", "Assemble meme features and evaluate regressors");
  add_flag(*predict_cmd, ov, "--target", "targets", "volume | life (comma separated)");
  add_flag(*predict_cmd, ov, "--features", "feature_sets", "Feature sets (comma separated)");
  add_flag(*predict_cmd, ov, "--delta-days", "delta_days", "Observation window in days");
  stage_cmd("report", "report", "Write timeline, remix, Zipf, influence and detection reports");

  auto* topics_cmd = app.add_subcommand("topics", "Joint text/meme topic model");
  topics_cmd->require_subcommand(1);
  auto* fit = topics_cmd->add_subcommand("fit", "Fit the topic model");
  add_flag(*fit, ov, "--k", "topics_k", "Number of topics");
  long meme_arg = -1;
  std::string word_arg;
  std::size_t top = 10;
  auto* t_annotate = topics_cmd->add_subcommand("annotate", "Rank words for a meme");
  t_annotate->add_option("--meme", meme_arg, "Meme id")->required();
  t_annotate->add_option("--top", top, "Terms to print");
  auto* illustrate = topics_cmd->add_subcommand("illustrate", "Rank memes for a word");
  illustrate->add_option("--word", word_arg, "Vocabulary term")->required();
  illustrate->add_option("--top", top, "Memes to print");
  auto* annotate_cmd = app.add_subcommand("annotate", "Rank words for a meme (same as topics annotate)");
  annotate_cmd->add_option("--meme", meme_arg, "Meme id")->required();
  annotate_cmd->add_option("--top", top, "Terms to print");

  auto* influence_cmd = app.add_subcommand("influence", "Print the most influential authors");
  influence_cmd->add_option("--top", top, "Authors to print");

  auto* pipeline_cmd = app.add_subcommand("pipeline", "Run every stage, skipping up-to-date ones");

  CLI11_PARSE(app, argc, argv);
  set_log_quiet(g.quiet);

  try {
    if (demo->parsed()) {
      const auto s = synth::write_demo_corpus(demo_out, demo_opts);
      std::cout << "manifest " << s.manifest << "\nlabels " << s.labels << "\nvideos " << s.videos << "\nframes "
                << s.frames << '\n';
      return 0;
    }
    const Workspace ws(Workspace::resolve_root(g.workspace));
    const Config config = effective_config(&ws, g, ov);
    auto persist = [&] { write_text_file(ws.config_path(), config.to_toml()); };

    if (pipeline_cmd->parsed()) {
      const auto st = pipeline::run_pipeline(ws, config, g.force);
      persist();
      print_status(st);
      return 0;
    }
    for (const auto& [cmd, stage] : stage_cmds)
      if (cmd->parsed()) {
        const auto st = pipeline::run_stage(ws, config, stage, g.force);
        persist();
        print_status({st});
        return 0;
      }
    if (fit->parsed()) {
      const auto st = pipeline::run_stage(ws, config, "topics", g.force);
      persist();
      print_status({st});
      return 0;
    }
    if (t_annotate->parsed() || annotate_cmd->parsed()) return annotate(ws, meme_arg, "", top);
    if (illustrate->parsed()) return annotate(ws, std::nullopt, word_arg, top);
    if (influence_cmd->parsed()) return influence(ws, top);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

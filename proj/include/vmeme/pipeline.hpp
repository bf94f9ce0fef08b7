#pragma once

#include <string>
#include <vector>

#include "vmeme/corpus.hpp"
#include "vmeme/feature_matrix.hpp"
#include "vmeme/memedetect.hpp"
#include "vmeme/topics.hpp"
#include "vmeme/util.hpp"
#include "vmeme/workspace.hpp"

namespace vmeme::pipeline {

// A stage failure, carrying the stage name.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error("stage '" + stage + "' failed: " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

enum class Outcome { Built, UpToDate, NotApplicable };
std::string to_string(Outcome o);

struct StageStatus {
  std::string stage;
  Outcome outcome = Outcome::Built;
  double seconds = 0.0;
};

// ingest, shots, features, index, detect, evaluate, graph, topics, predict, report.
const std::vector<std::string>& stage_order();
const std::vector<std::string>& upstream_of(const std::string& stage);

// Hash of the stage's config subset, its input file contents and the keys of
// its upstream stages. Throws StageError naming the first missing upstream.
std::string stage_key(const Workspace& ws, const Config& config, const std::string& stage);

bool up_to_date(const Workspace& ws, const Config& config, const std::string& stage);

// Builds one stage if stale (or forced).
StageStatus run_stage(const Workspace& ws, const Config& config, const std::string& stage, bool force = false);

// All stages in order; stops at the first failure (StageError).
std::vector<StageStatus> run_pipeline(const Workspace& ws, const Config& config, bool force = false);

// Workspace artifact readers shared by the CLI and the report emitter.
struct DetectArtifacts {
  corpus::Corpus corpus;
  std::vector<memedetect::FrameKey> frames;  // per feature row
  std::vector<memedetect::MemeCluster> clusters;
};

corpus::Corpus load_corpus(const Workspace& ws);
std::vector<memedetect::FrameKey> load_frames(const Workspace& ws, const corpus::Corpus& corpus);
DetectArtifacts load_detection(const Workspace& ws);

struct TopicArtifacts {
  topics::TopicModel model;
  topics::JointVocabulary vocab;
  std::vector<topics::Document> docs;  // per corpus video
};

TopicArtifacts load_topics(const Workspace& ws, const DetectArtifacts& detect);

// Meme occurrence counts (keyframes per video) from clusters.
std::vector<topics::MemeOccurrence> meme_occurrences(const std::vector<memedetect::MemeCluster>& clusters);

}  // namespace vmeme::pipeline

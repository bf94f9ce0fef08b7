#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vmeme/corpus.hpp"
#include "vmeme/memedetect.hpp"
#include "vmeme/memegraph.hpp"
#include "vmeme/svr.hpp"
#include "vmeme/topics.hpp"

namespace vmeme::predict {

enum class Target { Volume, Lifespan };
Target parse_target(const std::string& name);  // "volume" | "life"
std::string to_string(Target t);

struct AssembleOptions {
  double delta_days = 1.0;
  std::size_t min_volume = 4;  // memes in fewer videos are pruned
  double eta = memegraph::kDefaultEta;
  memegraph::WeightVariant weights = memegraph::WeightVariant::Star;
};

struct MemeFeatureRow {
  std::uint32_t meme_id = 0;
  std::vector<double> values;
  double log_volume = 0.0;         // log10(videos containing the meme)
  double log_lifespan_days = 0.0;  // log10(1 + last - onset in days)

  double target(Target t) const { return t == Target::Volume ? log_volume : log_lifespan_days; }
};

struct FeatureTable {
  std::vector<std::string> columns;
  std::vector<std::string> blocks;  // block name per column
  std::vector<MemeFeatureRow> rows;

  std::size_t dim() const { return columns.size(); }
  // Column indices belonging to any of the named blocks.
  std::vector<std::size_t> block_columns(std::span<const std::string> names) const;
};

// Inputs beyond clusters and corpus; any pointer may be null, in which case
// the block is zero with its presence flag cleared.
struct ContentInputs {
  const std::vector<corpus::BagOfWords>* text_bags = nullptr;  // per corpus video
  std::size_t text_vocab_size = 0;
  const topics::JointVocabulary* joint_vocab = nullptr;
  const std::vector<topics::Document>* joint_docs = nullptr;  // per corpus video
  const topics::TopicModel* model = nullptr;
};

// Block layout: volume_d1 (1), connectivity (28), influence (16),
// txt (|text vocab| + flag), vmeme (|meme vocab| + flag), topic (K + flag).
// Aggregates are (max, mean, median, std) over first-window authors.
FeatureTable assemble_features(std::span<const memedetect::MemeCluster> clusters, const corpus::Corpus& corpus,
                               const ContentInputs& content, const AssembleOptions& options = {});

// Named feature sets: volume-d1, connectivity, influence, net-all, txt,
// txt+vmeme, net+txt+vmeme, topic; or '+'-joined block names.
std::vector<std::string> feature_set_blocks(const std::string& name);
const std::vector<std::string>& standard_feature_sets();

// Columns of x (row-major, rows x cols) whose |Pearson| with y >= min_corr.
std::vector<std::size_t> filter_features(const std::vector<std::vector<double>>& x, std::span<const double> y,
                                         double min_corr = 0.03);

struct GridPoint {
  svr::Kernel kernel;
  double c = 1.0;
  double epsilon = 0.1;
};

// C in {0.1, 1, 10}, epsilon in {0.05, 0.2}; linear, polynomial degree 2 and
// 3, RBF at 0.5/1/2 times 1/dim.
std::vector<GridPoint> default_grid(std::size_t dim);

struct Regressor {
  std::vector<std::size_t> columns;  // selected input columns
  std::vector<double> mean, scale;   // standardization over training rows
  GridPoint params;
  bool constant = false;
  double constant_value = 0.0;
  Eigen::MatrixXd support;  // standardized training rows
  Eigen::VectorXd support_norms;
  svr::SvrModel model;
  double cv_mse = 0.0;
  std::size_t skipped_folds = 0;

  std::vector<double> predict(const std::vector<std::vector<double>>& x) const;
};

struct TrainOptions {
  std::size_t inner_folds = 3;
  double min_corr = 0.03;
  std::uint64_t seed = 1;
  std::vector<GridPoint> grid;  // empty -> default_grid
};

Regressor train_regressor(const std::vector<std::vector<double>>& x, std::span<const double> y,
                          const TrainOptions& options = {});

struct SplitResult {
  std::uint64_t seed = 0;
  double mse = 0, pearson = 0, kendall = 0;
  std::size_t train = 0, test = 0;
  std::string chosen;
};

struct ConfigResult {
  std::string feature_set;
  Target target = Target::Volume;
  std::vector<SplitResult> splits;
  double mse_mean = 0, mse_std = 0, pearson_mean = 0, pearson_std = 0, kendall_mean = 0, kendall_std = 0;
};

struct RegressionReport {
  std::vector<ConfigResult> results;
};

struct EvalOptions {
  std::size_t splits = 5;
  std::uint64_t seed = 1;
  TrainOptions train;
};

// Random halves per split; reports mean and std across splits.
ConfigResult evaluate_regressor(const FeatureTable& table, const std::string& feature_set, Target target,
                                const EvalOptions& options = {});

// Serialization: VMF1 values plus a JSON sidecar with the schema and targets.
void save_features(const std::string& vmf_path, const std::string& schema_path, const FeatureTable& table);
FeatureTable load_features(const std::string& vmf_path, const std::string& schema_path);

void write_report_json(const std::string& path, const RegressionReport& report);
void write_report_csv(const std::string& path, const RegressionReport& report);

}  // namespace vmeme::predict

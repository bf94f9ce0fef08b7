#include "vmeme/predict.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "vmeme/centrality.hpp"
#include "vmeme/feature_matrix.hpp"
#include "vmeme/metrics.hpp"

namespace vmeme::predict {

using memedetect::MemeCluster;

Target parse_target(const std::string& name) {
  if (name == "volume") return Target::Volume;
  if (name == "life" || name == "lifespan") return Target::Lifespan;
  throw InvalidArgument("unknown target '" + name + "' (expected volume or life)");
}

std::string to_string(Target t) { return t == Target::Volume ? "volume" : "life"; }

std::vector<std::size_t> FeatureTable::block_columns(std::span<const std::string> names) const {
  std::set<std::string> want(names.begin(), names.end());
  for (const auto& n : want)
    if (std::find(blocks.begin(), blocks.end(), n) == blocks.end())
      throw InvalidArgument("feature table has no block '" + n + "'");
  std::vector<std::size_t> cols;
  for (std::size_t i = 0; i < blocks.size(); ++i)
    if (want.count(blocks[i])) cols.push_back(i);
  return cols;
}

namespace {

const char* const kAggregates[] = {"max", "mean", "median", "std"};
const char* const kConnectivity[] = {"productivity", "author_degree", "author_closeness", "author_betweenness",
                                     "video_degree", "video_closeness", "video_betweenness"};
const char* const kInfluence[] = {"chi_hat", "chi_bar", "author_in_degree", "author_out_degree"};

void aggregate(std::vector<double> v, double* out) {
  if (v.empty()) {
    std::fill(out, out + 4, 0.0);
    return;
  }
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double var = 0;
  for (double x : v) var += (x - mean) * (x - mean);
  const std::size_t h = v.size() / 2;
  out[0] = v.back();
  out[1] = mean;
  out[2] = v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
  out[3] = std::sqrt(var / n);
}

struct Layout {
  std::size_t volume = 0, connectivity = 1, influence = 29, txt = 45, vmeme = 0, topic = 0, dim = 0;
  std::size_t txt_size = 0, vmeme_size = 0, topic_size = 0;
};

Layout make_layout(const ContentInputs& in, FeatureTable& t) {
  Layout l;
  l.txt_size = in.text_bags ? in.text_vocab_size : 0;
  l.vmeme_size = in.joint_vocab && in.joint_docs ? in.joint_vocab->meme_size() : 0;
  l.topic_size = in.model && in.joint_docs ? static_cast<std::size_t>(in.model->k) : 0;
  l.vmeme = l.txt + l.txt_size + 1;
  l.topic = l.vmeme + l.vmeme_size + 1;
  l.dim = l.topic + l.topic_size + 1;

  auto add = [&](std::string name, const std::string& block) {
    t.columns.push_back(std::move(name));
    t.blocks.push_back(block);
  };
  add("volume_d1", "volume_d1");
  for (const char* m : kConnectivity)
    for (const char* a : kAggregates) add(std::string("conn_") + m + "_" + a, "connectivity");
  for (const char* m : kInfluence)
    for (const char* a : kAggregates) add(std::string("infl_") + m + "_" + a, "influence");
  for (std::size_t i = 0; i < l.txt_size; ++i) add("txt_" + std::to_string(i), "txt");
  add("txt_present", "txt");
  for (std::size_t i = 0; i < l.vmeme_size; ++i) add("vmeme_" + std::to_string(in.joint_vocab->meme_ids[i]), "vmeme");
  add("vmeme_present", "vmeme");
  for (std::size_t i = 0; i < l.topic_size; ++i) add("topic_" + std::to_string(i), "topic");
  add("topic_present", "topic");
  return l;
}

// Graph state of the corpus truncated at one window end.
struct Snapshot {
  memegraph::VideoGraph vg;
  memegraph::AuthorGraph ag;
  memegraph::InfluenceRecord influence;
  graph::Centrality video_c, author_c;
};

std::size_t local(const std::vector<std::uint32_t>& nodes, std::uint32_t id) {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), id);
  return it != nodes.end() && *it == id ? static_cast<std::size_t>(it - nodes.begin()) : nodes.size();
}

}  // namespace

FeatureTable assemble_features(std::span<const MemeCluster> clusters, const corpus::Corpus& corpus,
                               const ContentInputs& content, const AssembleOptions& opt) {
  const auto& docs = corpus.videos();
  if (content.text_bags && content.text_bags->size() != docs.size())
    throw InvalidArgument("assemble_features: one text bag per video expected");
  if (content.joint_docs && content.joint_docs->size() != docs.size())
    throw InvalidArgument("assemble_features: one joint document per video expected");

  FeatureTable table;
  const Layout L = make_layout(content, table);

  // Per-author upload times for window-limited productivity.
  std::vector<std::vector<Timestamp>> author_times(corpus.authors().size());
  for (std::size_t v = 0; v < docs.size(); ++v) author_times[corpus.author_of(v)].push_back(docs[v].upload_time);
  for (auto& t : author_times) std::sort(t.begin(), t.end());

  std::map<Timestamp, std::vector<std::size_t>> by_window;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    const auto& c = clusters[i];
    if (c.videos.empty()) {
      log_warn("assemble_features: meme " + std::to_string(c.meme_id) + " has no onset; skipped");
      continue;
    }
    if (c.videos.size() < opt.min_volume) continue;
    const Timestamp end = c.onset_time + static_cast<Timestamp>(std::llround(opt.delta_days * kSecondsPerDay));
    by_window[end].push_back(i);
  }

  std::vector<MemeFeatureRow> rows;
  for (const auto& [end, members] : by_window) {
    Snapshot s;
    s.vg = memegraph::build_video_graph(clusters, corpus, opt.eta, end);
    s.ag = memegraph::build_author_graph(s.vg, corpus, opt.weights);
    s.influence = memegraph::influence_indices(clusters, corpus, end);
    std::vector<std::uint32_t> vt, at;
    for (auto i : members)
      for (auto v : clusters[i].videos)
        if (docs[v].upload_time <= end) {
          vt.push_back(static_cast<std::uint32_t>(local(s.vg.nodes, v)));
          const auto a = local(s.ag.nodes, static_cast<std::uint32_t>(corpus.author_of(v)));
          if (a < s.ag.nodes.size()) at.push_back(static_cast<std::uint32_t>(a));
        }
    s.video_c = graph::centralities(memegraph::adjacency(s.vg), vt);
    s.author_c = graph::centralities(memegraph::adjacency(s.ag), at);

    std::vector<MemeFeatureRow> group(members.size());
    parallel_for(members.size(), [&](std::size_t gi) {
      const auto& c = clusters[members[gi]];
      MemeFeatureRow& row = group[gi];
      row.meme_id = c.meme_id;
      row.values.assign(L.dim, 0.0);
      row.log_volume = std::log10(static_cast<double>(c.videos.size()));
      row.log_lifespan_days = std::log10(1.0 + static_cast<double>(c.last_time - c.onset_time) / kSecondsPerDay);

      std::vector<std::uint32_t> window;
      for (auto v : c.videos)
        if (docs[v].upload_time <= end) window.push_back(v);
      row.values[L.volume] = static_cast<double>(window.size());

      std::map<std::size_t, std::vector<std::uint32_t>> by_author;
      for (auto v : window) by_author[corpus.author_of(v)].push_back(v);
      std::vector<std::vector<double>> conn(7), infl(4);
      for (const auto& [a, vids] : by_author) {
        const auto& times = author_times[a];
        conn[0].push_back(static_cast<double>(std::upper_bound(times.begin(), times.end(), end) - times.begin()));
        const auto la = local(s.ag.nodes, static_cast<std::uint32_t>(a));
        const bool in_ag = la < s.ag.nodes.size();
        conn[1].push_back(in_ag ? s.author_c.degree[la] : 0.0);
        conn[2].push_back(in_ag ? s.author_c.closeness[la] : 0.0);
        conn[3].push_back(in_ag ? s.author_c.betweenness[la] : 0.0);
        double vd = 0, vc = 0, vb = 0;
        for (auto v : vids) {
          const auto lv = local(s.vg.nodes, v);
          vd += s.video_c.degree[lv];
          vc += s.video_c.closeness[lv];
          vb += s.video_c.betweenness[lv];
        }
        const double nv = static_cast<double>(vids.size());
        conn[4].push_back(vd / nv);
        conn[5].push_back(vc / nv);
        conn[6].push_back(vb / nv);
        infl[0].push_back(s.influence.chi_hat[a]);
        infl[1].push_back(s.influence.chi_bar[a]);
        infl[2].push_back(s.influence.author_in_degree[a]);
        infl[3].push_back(s.influence.author_out_degree[a]);
      }
      for (std::size_t m = 0; m < 7; ++m) aggregate(conn[m], &row.values[L.connectivity + 4 * m]);
      for (std::size_t m = 0; m < 4; ++m) aggregate(infl[m], &row.values[L.influence + 4 * m]);

      const double nw = static_cast<double>(window.size());
      if (L.txt_size) {
        double total = 0;
        for (auto v : window)
          for (const auto& [t, cnt] : (*content.text_bags)[v].counts)
            if (t < L.txt_size) {
              row.values[L.txt + t] += cnt / nw;
              total += cnt;
            }
        row.values[L.txt + L.txt_size] = total > 0 ? 1.0 : 0.0;
      }
      topics::Document words;
      if (content.joint_docs) {
        std::map<std::uint32_t, std::uint32_t> merged;
        for (auto v : window)
          for (const auto& [t, cnt] : (*content.joint_docs)[v].counts) merged[t] += cnt;
        words.counts.assign(merged.begin(), merged.end());
      }
      if (L.vmeme_size) {
        const std::size_t base = content.joint_vocab->text_size();
        double total = 0;
        for (const auto& [t, cnt] : words.counts)
          if (t >= base && t < base + L.vmeme_size) {
            row.values[L.vmeme + (t - base)] = cnt / nw;
            total += cnt;
          }
        row.values[L.vmeme + L.vmeme_size] = total > 0 ? 1.0 : 0.0;
      }
      if (L.topic_size && words.total() > 0) {
        const auto theta = topics::infer_theta(*content.model, words);
        std::copy(theta.begin(), theta.end(), row.values.begin() + static_cast<std::ptrdiff_t>(L.topic));
        row.values[L.topic + L.topic_size] = 1.0;
      }
    });
    for (auto& r : group) rows.push_back(std::move(r));
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.meme_id < b.meme_id; });
  table.rows = std::move(rows);
  return table;
}

const std::vector<std::string>& standard_feature_sets() {
  static const std::vector<std::string> sets{"volume-d1", "connectivity",  "influence",    "net-all",
                                             "txt",       "txt+vmeme",     "net+txt+vmeme"};
  return sets;
}

std::vector<std::string> feature_set_blocks(const std::string& name) {
  std::vector<std::string> out;
  std::stringstream ss(name);
  std::string tok;
  auto add = [&](const std::string& b) {
    if (std::find(out.begin(), out.end(), b) == out.end()) out.push_back(b);
  };
  while (std::getline(ss, tok, '+')) {
    if (tok == "net" || tok == "net-all") {
      add("volume_d1");
      add("connectivity");
      add("influence");
    } else if (tok == "volume-d1" || tok == "volume_d1") {
      add("volume_d1");
    } else if (tok == "connectivity" || tok == "influence" || tok == "txt" || tok == "vmeme" || tok == "topic") {
      add(tok);
    } else if (tok == "all") {
      for (const char* b : {"volume_d1", "connectivity", "influence", "txt", "vmeme", "topic"}) add(b);
    } else {
      throw InvalidArgument("unknown feature block '" + tok + "'");
    }
  }
  if (out.empty()) throw InvalidArgument("empty feature set");
  return out;
}

std::vector<std::size_t> filter_features(const std::vector<std::vector<double>>& x, std::span<const double> y,
                                         double min_corr) {
  if (x.size() < 2) throw InvalidArgument("filter_features: need at least two rows");
  if (x.size() != y.size()) throw InvalidArgument("filter_features: row/target count mismatch");
  const std::size_t d = x.front().size();
  std::vector<std::size_t> keep;
  std::vector<double> col(x.size());
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < x.size(); ++i) col[i] = x[i][j];
    if (std::abs(metrics::pearson(col, y)) >= min_corr) keep.push_back(j);
  }
  if (keep.empty()) throw DegenerateInput("filter_features: every column fell below the correlation threshold");
  return keep;
}

std::vector<GridPoint> default_grid(std::size_t dim) {
  const double g = 1.0 / static_cast<double>(std::max<std::size_t>(dim, 1));
  std::vector<svr::Kernel> kernels;
  kernels.push_back({svr::KernelType::Linear, 1, 1.0, 0.0});
  kernels.push_back({svr::KernelType::Polynomial, 2, g, 1.0});
  kernels.push_back({svr::KernelType::Polynomial, 3, g, 1.0});
  for (double f : {0.5, 1.0, 2.0}) kernels.push_back({svr::KernelType::Rbf, 1, f * g, 0.0});
  std::vector<GridPoint> grid;
  for (const auto& k : kernels)
    for (double c : {0.1, 1.0, 10.0})
      for (double e : {0.05, 0.2}) grid.push_back({k, c, e});
  return grid;
}

namespace {

Eigen::MatrixXd standardized(const std::vector<std::vector<double>>& x, const std::vector<std::size_t>& cols,
                             const std::vector<double>& mean, const std::vector<double>& scale) {
  Eigen::MatrixXd z(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (x[i][cols[j]] - mean[j]) / scale[j];
  return z;
}

bool constant(std::span<const double> y) {
  return std::all_of(y.begin(), y.end(), [&](double v) { return v == y.front(); });
}

bool same_kernel(const svr::Kernel& a, const svr::Kernel& b) {
  return a.type == b.type && a.degree == b.degree && a.gamma == b.gamma && a.coef0 == b.coef0;
}

}  // namespace

std::vector<double> Regressor::predict(const std::vector<std::vector<double>>& x) const {
  if (constant) return std::vector<double>(x.size(), constant_value);
  const Eigen::MatrixXd z = standardized(x, columns, mean, scale);
  const Eigen::MatrixXd dots = support * z.transpose();
  const Eigen::VectorXd norms = z.rowwise().squaredNorm();
  return model.predict(svr::kernel_matrix(params.kernel, dots, support_norms, norms));
}

Regressor train_regressor(const std::vector<std::vector<double>>& x, std::span<const double> y,
                          const TrainOptions& opt) {
  if (x.size() != y.size()) throw InvalidArgument("train_regressor: row/target count mismatch");
  if (x.size() < 20) throw InvalidArgument("train_regressor: need at least 20 training rows");
  Regressor r;
  if (constant(y)) {
    r.constant = true;
    r.constant_value = y.front();
    return r;
  }
  r.columns = filter_features(x, y, opt.min_corr);
  const std::size_t n = x.size(), d = r.columns.size();
  r.mean.assign(d, 0.0);
  r.scale.assign(d, 1.0);
  for (std::size_t j = 0; j < d; ++j) {
    double m = 0, v = 0;
    for (const auto& row : x) m += row[r.columns[j]];
    m /= static_cast<double>(n);
    for (const auto& row : x) v += (row[r.columns[j]] - m) * (row[r.columns[j]] - m);
    r.mean[j] = m;
    const double sd = std::sqrt(v / static_cast<double>(n));
    r.scale[j] = sd > 0 ? sd : 1.0;
  }
  const Eigen::MatrixXd z = standardized(x, r.columns, r.mean, r.scale);
  const Eigen::MatrixXd dots = z * z.transpose();
  const Eigen::VectorXd norms = z.rowwise().squaredNorm();

  const auto grid = opt.grid.empty() ? default_grid(d) : opt.grid;
  const std::size_t folds = std::max<std::size_t>(2, std::min(opt.inner_folds, n));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(mix_seed(opt.seed, "inner-cv"));
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<int>> train_idx(folds), val_idx(folds);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t f = 0; f < folds; ++f) (i % folds == f ? val_idx : train_idx)[f].push_back(static_cast<int>(order[i]));

  std::vector<double> score(grid.size(), 0.0);
  std::vector<std::size_t> used(grid.size(), 0);
  std::size_t skipped = 0;
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<double> ytr, yval;
    for (int i : train_idx[f]) ytr.push_back(y[static_cast<std::size_t>(i)]);
    for (int i : val_idx[f]) yval.push_back(y[static_cast<std::size_t>(i)]);
    if (constant(ytr)) {
      ++skipped;
      continue;
    }
    const Eigen::MatrixXd dtt = dots(train_idx[f], train_idx[f]);
    const Eigen::MatrixXd dtv = dots(train_idx[f], val_idx[f]);
    const Eigen::VectorXd ntr = norms(train_idx[f]);
    const Eigen::VectorXd nval = norms(val_idx[f]);
    // Kernel matrices are shared by every grid point with the same kernel.
    std::vector<std::size_t> heads;
    for (std::size_t g = 0; g < grid.size(); ++g)
      if (g == 0 || !same_kernel(grid[g].kernel, grid[g - 1].kernel)) heads.push_back(g);
    parallel_for(heads.size(), [&](std::size_t h) {
      const std::size_t g0 = heads[h];
      const std::size_t g1 = h + 1 < heads.size() ? heads[h + 1] : grid.size();
      const Eigen::MatrixXd gram = svr::kernel_matrix(grid[g0].kernel, dtt, ntr, ntr);
      const Eigen::MatrixXd cross = svr::kernel_matrix(grid[g0].kernel, dtv, ntr, nval);
      for (std::size_t g = g0; g < g1; ++g) {
        svr::SvrParams p;
        p.kernel = grid[g].kernel;
        p.c = grid[g].c;
        p.epsilon = grid[g].epsilon;
        const auto model = svr::SvrModel::fit(gram, ytr, p);
        score[g] += metrics::mse(model.predict(cross), yval);
        ++used[g];
      }
    });
  }
  r.skipped_folds = skipped;
  if (skipped) log_warn("train_regressor: " + std::to_string(skipped) + " inner fold(s) with constant target skipped");
  std::size_t best = 0;
  double best_score = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (!used[g]) continue;
    const double s = score[g] / static_cast<double>(used[g]);
    if (s < best_score) {
      best_score = s;
      best = g;
    }
  }
  r.params = grid[best];
  r.cv_mse = std::isfinite(best_score) ? best_score : 0.0;
  svr::SvrParams p;
  p.kernel = r.params.kernel;
  p.c = r.params.c;
  p.epsilon = r.params.epsilon;
  std::vector<double> yall(y.begin(), y.end());
  r.model = svr::SvrModel::fit(svr::kernel_matrix(p.kernel, dots, norms, norms), yall, p);
  r.support = z;
  r.support_norms = norms;
  return r;
}

ConfigResult evaluate_regressor(const FeatureTable& table, const std::string& feature_set, Target target,
                                const EvalOptions& opt) {
  const auto blocks = feature_set_blocks(feature_set);
  const auto cols = table.block_columns(blocks);
  const std::size_t n = table.rows.size();
  if (n - n / 2 < 5) throw InvalidArgument("evaluate_regressor: test split would have fewer than 5 rows");
  if (n / 2 < 20) throw DegenerateInput("evaluate_regressor: " + std::to_string(n) + " memes leave fewer than 20 training rows");
  std::vector<std::vector<double>> x(n);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto c : cols) x[i].push_back(table.rows[i].values[c]);
    y[i] = table.rows[i].target(target);
  }
  ConfigResult res;
  res.feature_set = feature_set;
  res.target = target;
  for (std::size_t s = 0; s < opt.splits; ++s) {
    SplitResult sr;
    sr.seed = mix_seed(opt.seed, "split-" + std::to_string(s));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(sr.seed);
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t half = n / 2;
    std::vector<std::vector<double>> xtr, xte;
    std::vector<double> ytr, yte;
    for (std::size_t i = 0; i < n; ++i) {
      (i < half ? xtr : xte).push_back(x[order[i]]);
      (i < half ? ytr : yte).push_back(y[order[i]]);
    }
    TrainOptions to = opt.train;
    to.seed = sr.seed;
    const Regressor reg = train_regressor(xtr, ytr, to);
    const auto pred = reg.predict(xte);
    sr.mse = metrics::mse(pred, yte);
    sr.pearson = metrics::pearson(pred, yte);
    sr.kendall = metrics::kendall_tau(pred, yte);
    sr.train = xtr.size();
    sr.test = xte.size();
    std::ostringstream chosen;
    if (reg.constant)
      chosen << "constant";
    else
      chosen << reg.params.kernel.describe() << " C=" << reg.params.c << " eps=" << reg.params.epsilon;
    sr.chosen = chosen.str();
    res.splits.push_back(sr);
  }
  auto collect = [&](auto field) {
    std::vector<double> v;
    for (const auto& s : res.splits) v.push_back(field(s));
    return metrics::mean_std(v);
  };
  auto m = collect([](const SplitResult& s) { return s.mse; });
  res.mse_mean = m.mean;
  res.mse_std = m.std;
  m = collect([](const SplitResult& s) { return s.pearson; });
  res.pearson_mean = m.mean;
  res.pearson_std = m.std;
  m = collect([](const SplitResult& s) { return s.kendall; });
  res.kendall_mean = m.mean;
  res.kendall_std = m.std;
  return res;
}

void save_features(const std::string& vmf_path, const std::string& schema_path, const FeatureTable& table) {
  FeatureMatrix m(static_cast<std::uint32_t>(table.rows.size()), static_cast<std::uint32_t>(table.dim()));
  std::vector<std::uint32_t> ids;
  std::vector<double> vol, life;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    std::copy(r.values.begin(), r.values.end(), m.row(i).begin());
    ids.push_back(r.meme_id);
    vol.push_back(r.log_volume);
    life.push_back(r.log_lifespan_days);
  }
  write_vmf(vmf_path, m);
  nlohmann::json schema{{"columns", table.columns},
                        {"blocks", table.blocks},
                        {"meme_ids", ids},
                        {"log_volume", vol},
                        {"log_lifespan_days", life}};
  write_text_file(schema_path, schema.dump(1) + "\n");
}

FeatureTable load_features(const std::string& vmf_path, const std::string& schema_path) {
  const auto m = read_vmf(vmf_path);
  const auto schema = nlohmann::json::parse(read_text_file(schema_path));
  FeatureTable t;
  t.columns = schema.at("columns").get<std::vector<std::string>>();
  t.blocks = schema.at("blocks").get<std::vector<std::string>>();
  const auto ids = schema.at("meme_ids").get<std::vector<std::uint32_t>>();
  const auto vol = schema.at("log_volume").get<std::vector<double>>();
  const auto life = schema.at("log_lifespan_days").get<std::vector<double>>();
  if (m.dim != t.columns.size() || m.rows != ids.size()) throw Error(schema_path + ": schema does not match " + vmf_path);
  for (std::size_t i = 0; i < m.rows; ++i) {
    MemeFeatureRow r;
    r.meme_id = ids[i];
    r.values.assign(m.row(i).begin(), m.row(i).end());
    r.log_volume = vol[i];
    r.log_lifespan_days = life[i];
    t.rows.push_back(std::move(r));
  }
  return t;
}

void write_report_json(const std::string& path, const RegressionReport& report) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : report.results) {
    nlohmann::json splits = nlohmann::json::array();
    for (const auto& s : r.splits)
      splits.push_back({{"seed", s.seed},
                        {"mse", s.mse},
                        {"corr", s.pearson},
                        {"tau", s.kendall},
                        {"train", s.train},
                        {"test", s.test},
                        {"model", s.chosen}});
    out.push_back({{"features", r.feature_set},
                   {"target", to_string(r.target)},
                   {"mse", {{"mean", r.mse_mean}, {"std", r.mse_std}}},
                   {"corr", {{"mean", r.pearson_mean}, {"std", r.pearson_std}}},
                   {"tau", {{"mean", r.kendall_mean}, {"std", r.kendall_std}}},
                   {"splits", splits}});
  }
  write_text_file(path, out.dump(1) + "\n");
}

void write_report_csv(const std::string& path, const RegressionReport& report) {
  std::ostringstream out;
  out.precision(8);
  out << "target,features,mse_mean,mse_std,corr_mean,corr_std,tau_mean,tau_std,splits\n";
  for (const auto& r : report.results)
    out << to_string(r.target) << ',' << r.feature_set << ',' << r.mse_mean << ',' << r.mse_std << ','
        << r.pearson_mean << ',' << r.pearson_std << ',' << r.kendall_mean << ',' << r.kendall_std << ','
        << r.splits.size() << '\n';
  write_text_file(path, out.str());
}

}  // namespace vmeme::predict

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "vmeme/pipeline.hpp"
#include "vmeme/report.hpp"
#include "vmeme/synth.hpp"

using namespace vmeme;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Config small_config(const synth::DemoSummary& demo) {
  Config c;
  c.set("manifest", demo.manifest);
  c.set("labels", demo.labels);
  c.set("topics_k", "4");
  c.set("lda_iters", "10");
  c.set("splits", "2");
  return c;
}

}  // namespace

TEST_CASE("configuration parsing") {
  Config c;
  CHECK(c.number("tau") == 11.5);
  c.load_string("# comment\n[detect]\ntau = 8\nindex = \"kdtree\"\n\nfeature_sets = txt, volume-d1\n");
  CHECK(c.number("tau") == 8.0);
  CHECK(c.get("index") == "kdtree");
  CHECK(c.list("feature_sets") == std::vector<std::string>{"txt", "volume-d1"});
  CHECK(c.numbers("tau_grid").size() == 17);
  CHECK_THROWS_AS(c.set("taux", "1"), InvalidArgument);
  CHECK_THROWS_AS(c.load_string("tau 8\n"), ParseError);
  c.set("knn", "many");
  CHECK_THROWS_AS(c.integer("knn"), InvalidArgument);

  Config round;
  round.load_string(c.to_toml());
  CHECK(round.to_toml() == c.to_toml());
  CHECK_THROWS_AS(Workspace(""), InvalidArgument);
}

TEST_CASE("pipeline caching and invalidation") {
  TempDir tmp("vmeme_pipeline_test");
  synth::DemoOptions opts;
  opts.keyframes = 60;
  opts.groups = 6;
  opts.authors = 10;
  const auto demo = synth::write_demo_corpus((tmp.path / "demo").string(), opts);
  const Workspace ws((tmp.path / "ws").string());
  auto config = small_config(demo);

  SUBCASE("missing upstream names the stage") {
    try {
      pipeline::run_stage(ws, config, "detect");
      FAIL("expected a stage error");
    } catch (const pipeline::StageError& e) {
      CHECK(e.stage() == "detect");
    }
    Config none;
    try {
      pipeline::run_stage(ws, none, "ingest");
      FAIL("expected a stage error");
    } catch (const pipeline::StageError& e) {
      CHECK(e.stage() == "ingest");
    }
  }

  SUBCASE("rerun skips, parameter change rebuilds downstream only") {
    const auto first = pipeline::run_pipeline(ws, config);
    REQUIRE(first.size() == pipeline::stage_order().size());
    for (const auto& s : first) CHECK(s.outcome == pipeline::Outcome::Built);
    const auto summary = slurp(fs::path(ws.root()) / "report" / "summary.json");

    for (const auto& s : pipeline::run_pipeline(ws, config)) CHECK(s.outcome == pipeline::Outcome::UpToDate);

    config.set("tau", "8");
    const auto again = pipeline::run_pipeline(ws, config);
    for (const auto& s : again) {
      const bool upstream = s.stage == "ingest" || s.stage == "shots" || s.stage == "features" || s.stage == "index";
      INFO(s.stage);
      CHECK(s.outcome == (upstream ? pipeline::Outcome::UpToDate : pipeline::Outcome::Built));
    }
    config.set("tau", "11.5");
    pipeline::run_pipeline(ws, config);
    CHECK(slurp(fs::path(ws.root()) / "report" / "summary.json") == summary);

    // Without labels the evaluation stage drops out.
    config.set("labels", "");
    const auto st = pipeline::run_stage(ws, config, "evaluate");
    CHECK(st.outcome == pipeline::Outcome::NotApplicable);

    const auto det = pipeline::load_detection(ws);
    CHECK(!det.clusters.empty());
    for (const auto& m : det.clusters) CHECK(m.videos.size() >= 2);
  }
}

TEST_CASE("timeline rows") {
  const auto c = fixture::cascade({{"A", 0}, {"B", 0.25}, {"C", 2}, {"D", 2.5}}, {{0, 1, 2, 3}, {1, 3}});
  const auto rows = report::timeline(c.clusters, c.corpus);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].meme_id == 0);
  CHECK(rows[0].videos == 2);
  CHECK(rows[1].videos == 2);
  CHECK(rows[0].day < rows[1].day);
  CHECK(rows[2].meme_id == 1);
  CHECK(rows[2].videos == 1);
  std::size_t total = 0;
  for (const auto& r : rows) total += r.videos;
  CHECK(total == 6);

  const auto empty = report::timeline_csv(report::timeline({}, c.corpus));
  CHECK(std::count(empty.begin(), empty.end(), '\n') == 1);
  CHECK(report::num(0.1) == "0.1");
  CHECK(report::num(1.0 / 3) == "0.3333333333");
}

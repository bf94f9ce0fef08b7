#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vmeme/corpus.hpp"
#include "vmeme/memedetect.hpp"
#include "vmeme/memegraph.hpp"
#include "vmeme/workspace.hpp"

namespace vmeme::report {

// Locale-independent "%.10g".
std::string num(double v);

struct TimelineRow {
  std::uint32_t meme_id = 0;
  std::string day;  // YYYY-MM-DD
  std::size_t videos = 0;
};

// Videos per (meme, upload day) for every day with at least one posting;
// sorted by meme then day.
std::vector<TimelineRow> timeline(std::span<const memedetect::MemeCluster> clusters, const corpus::Corpus& corpus);
std::string timeline_csv(std::span<const TimelineRow> rows);

std::string remix_csv(const memegraph::RemixStats& stats);

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
  bool line = false;
};

struct PlotSpec {
  std::string title, xlabel, ylabel;
  bool logx = false, logy = false;  // non-positive values are dropped on log axes
};

std::string svg_plot(const PlotSpec& spec, std::span<const Series> series);

struct ReportBundle {
  std::string dir;
  std::vector<std::string> files;  // relative to dir, in write order
};

// Reads the built stages and writes the report directory. Requires ingest,
// detect and graph; the detection curve and prediction tables are included
// when their stages were built.
ReportBundle emit_reports(const Workspace& ws, const Config& config);

}  // namespace vmeme::report

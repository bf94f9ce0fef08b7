#include "vmeme/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "vmeme/pipeline.hpp"
#include "vmeme/predict.hpp"

namespace vmeme::report {

namespace fs = std::filesystem;
using nlohmann::json;

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::vector<TimelineRow> timeline(std::span<const memedetect::MemeCluster> clusters, const corpus::Corpus& corpus) {
  std::vector<TimelineRow> rows;
  for (const auto& c : clusters) {
    std::map<std::int64_t, std::size_t> per_day;
    for (auto v : c.videos) ++per_day[day_index(corpus.videos()[v].upload_time)];
    for (const auto& [d, n] : per_day)
      rows.push_back({c.meme_id, format_iso8601(static_cast<Timestamp>(d) * 86400).substr(0, 10), n});
  }
  std::sort(rows.begin(), rows.end(),
            [](const TimelineRow& a, const TimelineRow& b) { return std::tie(a.meme_id, a.day) < std::tie(b.meme_id, b.day); });
  return rows;
}

std::string timeline_csv(std::span<const TimelineRow> rows) {
  std::ostringstream out;
  out << "meme_id,day,videos\n";
  for (const auto& r : rows) out << r.meme_id << ',' << r.day << ',' << r.videos << '\n';
  return out.str();
}

std::string remix_csv(const memegraph::RemixStats& s) {
  std::ostringstream out;
  out << "first_rank,last_rank,videos,with_memes,fraction\n";
  for (const auto& b : s.by_view_rank)
    out << b.first_rank << ',' << b.last_rank << ',' << b.videos << ',' << b.with_memes << ',' << num(b.fraction)
        << '\n';
  out << "1," << s.videos << ',' << s.videos << ',' << s.videos_with_memes << ',' << num(s.fraction) << '\n';
  return out.str();
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace

std::string svg_plot(const PlotSpec& spec, std::span<const Series> series) {
  constexpr double W = 720, H = 440, L = 70, R = 170, T = 40, B = 55;
  auto tx = [&](double v) { return spec.logx ? std::log10(v) : v; };
  auto ty = [&](double v) { return spec.logy ? std::log10(v) : v; };
  auto usable = [&](const std::pair<double, double>& p) {
    return std::isfinite(p.first) && std::isfinite(p.second) && (!spec.logx || p.first > 0) &&
           (!spec.logy || p.second > 0);
  };
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series)
    for (const auto& p : s.points)
      if (usable(p)) {
        x0 = std::min(x0, tx(p.first));
        x1 = std::max(x1, tx(p.first));
        y0 = std::min(y0, ty(p.second));
        y1 = std::max(y1, ty(p.second));
      }
  if (!(x0 <= x1)) x0 = 0, x1 = 1;
  if (!(y0 <= y1)) y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
  const double padx = 0.04 * (x1 - x0), pady = 0.04 * (y1 - y0);
  x0 -= padx, x1 += padx, y0 -= pady, y1 += pady;
  const double pw = W - L - R, ph = H - T - B;
  auto sx = [&](double v) { return L + (tx(v) - x0) / (x1 - x0) * pw; };
  auto sy = [&](double v) { return T + ph - (ty(v) - y0) / (y1 - y0) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << px(L + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(spec.title)
    << "</text>\n";
  o << "<rect x=\"" << px(L) << "\" y=\"" << px(T) << "\" width=\"" << px(pw) << "\" height=\"" << px(ph)
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double fx = x0 + (x1 - x0) * i / 5.0, fy = y0 + (y1 - y0) * i / 5.0;
    const double gx = L + pw * i / 5.0, gy = T + ph - ph * i / 5.0;
    const double lx = spec.logx ? std::pow(10.0, fx) : fx, ly = spec.logy ? std::pow(10.0, fy) : fy;
    o << "<line x1=\"" << px(gx) << "\" y1=\"" << px(T + ph) << "\" x2=\"" << px(gx) << "\" y2=\"" << px(T + ph + 5)
      << "\" stroke=\"black\"/><text x=\"" << px(gx) << "\" y=\"" << px(T + ph + 18) << "\" text-anchor=\"middle\">"
      << tick_label(lx) << "</text>\n";
    o << "<line x1=\"" << px(L - 5) << "\" y1=\"" << px(gy) << "\" x2=\"" << px(L) << "\" y2=\"" << px(gy)
      << "\" stroke=\"black\"/><text x=\"" << px(L - 8) << "\" y=\"" << px(gy + 4) << "\" text-anchor=\"end\">"
      << tick_label(ly) << "</text>\n";
  }
  o << "<text x=\"" << px(L + pw / 2) << "\" y=\"" << px(H - 12) << "\" text-anchor=\"middle\">"
    << xml_escape(spec.xlabel + (spec.logx ? " (log)" : "")) << "</text>\n";
  o << "<text transform=\"translate(16," << px(T + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
    << xml_escape(spec.ylabel + (spec.logy ? " (log)" : "")) << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kPalette[si % 10];
    if (s.line) {
      o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      bool first = true;
      for (const auto& p : s.points)
        if (usable(p)) {
          o << (first ? "" : " ") << px(sx(p.first)) << ',' << px(sy(p.second));
          first = false;
        }
      o << "\"/>\n";
    } else {
      for (const auto& p : s.points)
        if (usable(p))
          o << "<circle cx=\"" << px(sx(p.first)) << "\" cy=\"" << px(sy(p.second)) << "\" r=\"2.5\" fill=\"" << color
            << "\" fill-opacity=\"0.7\"/>\n";
    }
    const double ly = T + 12 + 16.0 * si;
    o << "<rect x=\"" << px(W - R + 12) << "\" y=\"" << px(ly - 8) << "\" width=\"10\" height=\"10\" fill=\"" << color
      << "\"/><text x=\"" << px(W - R + 28) << "\" y=\"" << px(ly + 1) << "\">" << xml_escape(s.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

namespace {

void require(const Workspace& ws, const std::string& stage) {
  if (!ws.record(stage)) throw Error("stage '" + stage + "' has not been built; run `vmeme " + stage + "` first");
}

std::vector<double> sorted_desc(std::vector<double> v) {
  std::sort(v.begin(), v.end(), std::greater<>());
  return v;
}

json zipf_json(std::span<const double> freqs, double min_count) {
  try {
    const auto f = memegraph::zipf_fit(freqs, min_count);
    return {{"exponent", f.exponent}, {"intercept", f.intercept}, {"ranks", f.ranks}};
  } catch (const Error& e) {
    return {{"exponent", nullptr}, {"note", e.what()}};
  }
}

std::vector<std::pair<double, double>> rank_points(std::span<const double> freqs) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < freqs.size(); ++i) pts.emplace_back(static_cast<double>(i + 1), freqs[i]);
  return pts;
}

struct Writer {
  ReportBundle bundle;
  void operator()(const std::string& name, const std::string& content) {
    write_text_file((fs::path(bundle.dir) / name).string(), content);
    bundle.files.push_back(name);
  }
};

}  // namespace

ReportBundle emit_reports(const Workspace& ws, const Config& config) {
  for (const auto* s : {"ingest", "detect", "graph"}) require(ws, s);
  const auto det = pipeline::load_detection(ws);
  const auto& corpus = det.corpus;
  const auto& clusters = det.clusters;
  Writer write;
  write.bundle.dir = ws.dir("report");
  json summary;
  summary["videos"] = corpus.videos().size();
  summary["authors"] = corpus.authors().size();
  summary["keyframes"] = det.frames.size();
  summary["memes"] = clusters.size();

  // Timeline.
  const auto rows = timeline(clusters, corpus);
  write("timeline.csv", timeline_csv(rows));
  {
    std::vector<std::size_t> order(clusters.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return clusters[a].videos.size() > clusters[b].videos.size();
    });
    order.resize(std::min<std::size_t>(order.size(), static_cast<std::size_t>(std::max(0L, config.integer("timeline_top")))));
    std::int64_t day0 = 0;
    bool have_day = false;
    for (const auto& c : clusters) {
      const auto d = day_index(c.onset_time);
      day0 = have_day ? std::min(day0, d) : d;
      have_day = true;
    }
    std::vector<Series> series;
    for (auto i : order) {
      Series s{"meme " + std::to_string(clusters[i].meme_id), {}, true};
      std::map<std::int64_t, double> per_day;
      for (auto v : clusters[i].videos) per_day[day_index(corpus.videos()[v].upload_time)] += 1;
      for (auto d = per_day.begin()->first; d <= per_day.rbegin()->first; ++d)
        s.points.emplace_back(static_cast<double>(d - day0), per_day.count(d) ? per_day[d] : 0.0);
      series.push_back(std::move(s));
    }
    write("timeline.svg", svg_plot({"Meme volume per day", "days since first meme posting", "videos", false, false}, series));
  }

  // Remix probability by view rank.
  const auto remix = memegraph::remix_stats(clusters, corpus);
  write("remix.csv", remix_csv(remix));
  summary["remix_fraction"] = remix.fraction;

  // Zipf: text term counts and meme volumes.
  const double min_count = config.number("zipf_min_count");
  std::vector<double> text_freq, meme_freq, views;
  {
    std::unordered_map<std::string, double> counts;
    for (const auto& doc : corpus::document_tokens(corpus, corpus::TextNormalizer::shipped()))
      for (const auto& t : doc) counts[t] += 1;
    for (const auto& [t, n] : counts) text_freq.push_back(n);
    text_freq = sorted_desc(std::move(text_freq));
    for (const auto& c : clusters) meme_freq.push_back(static_cast<double>(c.videos.size()));
    meme_freq = sorted_desc(std::move(meme_freq));
    for (const auto& v : corpus.videos()) views.push_back(static_cast<double>(v.view_count));
  }
  {
    std::ostringstream out;
    out << "series,rank,frequency\n";
    for (std::size_t i = 0; i < text_freq.size(); ++i) out << "text," << i + 1 << ',' << num(text_freq[i]) << '\n';
    for (std::size_t i = 0; i < meme_freq.size(); ++i) out << "meme," << i + 1 << ',' << num(meme_freq[i]) << '\n';
    write("zipf.csv", out.str());
    const std::vector<Series> series{{"text terms", rank_points(text_freq), false}, {"memes", rank_points(meme_freq), false}};
    write("zipf.svg", svg_plot({"Rank-frequency", "rank", "frequency", true, true}, series));
  }
  summary["zipf"] = {{"text", zipf_json(text_freq, min_count)}, {"meme", zipf_json(meme_freq, min_count)}};
  summary["gini"] = {{"view_count", memegraph::gini(views)},
                     {"meme_volume", meme_freq.empty() ? 0.0 : memegraph::gini(meme_freq)}};

  // Influence against productivity.
  {
    const auto inf = memegraph::influence_indices(clusters, corpus);
    std::ostringstream out;
    out << "author_id,productivity,chi_hat,chi_bar\n";
    Series hat{"total influence", {}, false}, bar{"normalized influence", {}, false};
    for (std::size_t a = 0; a < corpus.authors().size(); ++a) {
      const double p = static_cast<double>(corpus.authors()[a].productivity());
      out << corpus.authors()[a].author_id << ',' << p << ',' << num(inf.chi_hat[a]) << ',' << num(inf.chi_bar[a])
          << '\n';
      hat.points.emplace_back(p, inf.chi_hat[a]);
      bar.points.emplace_back(p, inf.chi_bar[a]);
    }
    write("influence.csv", out.str());
    const std::vector<Series> series{hat, bar};
    write("influence.svg", svg_plot({"Meme influence vs author productivity", "videos by author", "influence index",
                                     true, true},
                                    series));
  }

  const auto graph_info = json::parse(read_text_file(ws.path("graph", "graph.json")));
  summary["video_graph"] = {{"nodes", graph_info.at("video_nodes")}, {"edges", graph_info.at("video_edges")}};
  summary["author_graph"] = {{"nodes", graph_info.at("author_nodes")}, {"edges", graph_info.at("author_edges")}};

  // Detection operating curve.
  {
    std::string csv = "tau,pair_precision,pair_recall,pair_f1,cluster_precision,cluster_recall,cluster_f1,true_pos,"
                      "false_pos,false_neg\n";
    std::vector<Series> series;
    if (ws.record("evaluate")) {
      csv = read_text_file(ws.path("evaluate", "sweep.csv"));
      Series pairs{"pairs", {}, true}, clus{"clusters", {}, true};
      std::istringstream in(csv);
      std::string line;
      std::getline(in, line);
      while (std::getline(in, line)) {
        double tau, pp, pr, pf, cp, cr, cf;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf,%lf", &tau, &pp, &pr, &pf, &cp, &cr, &cf) == 7) {
          pairs.points.emplace_back(pr, pp);
          clus.points.emplace_back(cr, cp);
        }
      }
      series = {pairs, clus};
      summary["detection"] = json::parse(read_text_file(ws.path("evaluate", "evaluate.json"))).at("operating_point");
    }
    write("detection_pr.csv", csv);
    write("detection_pr.svg", svg_plot({"Detection precision-recall", "recall", "precision", false, false}, series));
  }

  // Prediction tables.
  if (ws.record("predict")) {
    write("prediction.csv", read_text_file(ws.path("predict", "report.csv")));
    const auto rep = json::parse(read_text_file(ws.path("predict", "report.json")));
    json best = json::object();
    for (const auto& r : rep) {
      const auto target = r.at("target").get<std::string>();
      const double mse = r.at("mse").at("mean").get<double>();
      if (!best.contains(target) || mse < best[target].at("mse_mean").get<double>())
        best[target] = {{"feature_set", r.at("features")}, {"mse_mean", mse}, {"tau_mean", r.at("tau").at("mean")}};
    }
    summary["prediction_best"] = best;
  }

  write("summary.json", summary.dump(1) + "\n");
  log_info("report: " + std::to_string(write.bundle.files.size()) + " files in " + write.bundle.dir);
  return write.bundle;
}

}  // namespace vmeme::report

#include "vmeme/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"
#include "vmeme/imgproc.hpp"

namespace vmeme::synth {

namespace {

std::uint8_t clamp8(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

struct Rgb {
  double r, g, b;
};

Rgb random_color(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  // Full HSV range, with a share of near-gray colors.
  const double h = u(rng) * 6.0, s = u(rng) < 0.2 ? 0.05 * u(rng) : 0.15 + 0.85 * u(rng), v = 0.08 + 0.9 * u(rng);
  const int i = static_cast<int>(h) % 6;
  const double f = h - std::floor(h);
  const double p = v * (1 - s), q = v * (1 - s * f), t = v * (1 - s * (1 - f));
  double r = 0, g = 0, b = 0;
  switch (i) {
    case 0: r = v, g = t, b = p; break;
    case 1: r = q, g = v, b = p; break;
    case 2: r = p, g = v, b = t; break;
    case 3: r = p, g = q, b = v; break;
    case 4: r = t, g = p, b = v; break;
    default: r = v, g = p, b = q; break;
  }
  return {r * 255, g * 255, b * 255};
}

}  // namespace

namespace {

Image draw_scene(std::mt19937_64& rng, int width, int height) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> buf(static_cast<std::size_t>(width) * height * 3);
  const Rgb top = random_color(rng), bottom = random_color(rng);
  for (int y = 0; y < height; ++y) {
    const double a = static_cast<double>(y) / (height - 1);
    for (int x = 0; x < width; ++x) {
      double* p = &buf[(static_cast<std::size_t>(y) * width + x) * 3];
      p[0] = top.r * (1 - a) + bottom.r * a;
      p[1] = top.g * (1 - a) + bottom.g * a;
      p[2] = top.b * (1 - a) + bottom.b * a;
    }
  }
  const int shapes = 6 + static_cast<int>(u(rng) * 6);
  for (int s = 0; s < shapes; ++s) {
    const Rgb c = random_color(rng);
    const double cx = u(rng) * width, cy = u(rng) * height;
    const double rx = (0.1 + 0.25 * u(rng)) * width, ry = (0.1 + 0.25 * u(rng)) * height;
    const bool ellipse = u(rng) < 0.5;
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) {
        const double dx = (x - cx) / rx, dy = (y - cy) / ry;
        const bool inside = ellipse ? dx * dx + dy * dy <= 1.0 : std::abs(dx) <= 1.0 && std::abs(dy) <= 1.0;
        if (!inside) continue;
        double* p = &buf[(static_cast<std::size_t>(y) * width + x) * 3];
        p[0] = c.r;
        p[1] = c.g;
        p[2] = c.b;
      }
  }
  const double fx = (0.02 + 0.05 * u(rng)) * 2 * M_PI, fy = (0.02 + 0.05 * u(rng)) * 2 * M_PI, ph = u(rng) * 6.28;
  Image img(width, height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const double* p = &buf[(static_cast<std::size_t>(y) * width + x) * 3];
      const double ripple = 12.0 * std::sin(fx * x + fy * y + ph);
      img.set(x, y, clamp8(p[0] + ripple), clamp8(p[1] + ripple), clamp8(p[2] + ripple));
    }
  return img;
}

}  // namespace

// Redraws scenes too flat to survive the blank-frame test after jitter.
Image natural_image(std::mt19937_64& rng, int width, int height) {
  for (int attempt = 0;; ++attempt) {
    Image img = draw_scene(rng, width, height);
    if (attempt >= 50 || imgproc::gray_entropy(img) >= 1.8) return img;
  }
}

Image jitter(const Image& base, std::mt19937_64& rng, const JitterOptions& o) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double scale = 1.0 + o.max_rescale * (2 * u(rng) - 1);
  Image img = resize_bilinear(base, std::max(16, static_cast<int>(std::lround(base.width() * scale))),
                              std::max(16, static_cast<int>(std::lround(base.height() * scale))));
  const double gain = 1.0 + o.contrast * (2 * u(rng) - 1);
  const double offset = o.brightness * (2 * u(rng) - 1);
  std::uniform_int_distribution<int> noise(-o.noise, o.noise);
  for (auto& v : img.data()) v = clamp8((v - 128.0) * gain + 128.0 + offset + (o.noise ? noise(rng) : 0));

  const int w = img.width(), h = img.height();
  if (u(rng) < o.overlay_prob) {
    // Caption box in a random corner with dark strokes.
    const int bw = w / 4, bh = h / 8;
    const int x0 = u(rng) < 0.5 ? 2 : w - bw - 2, y0 = u(rng) < 0.5 ? 2 : h - bh - 2;
    for (int y = y0; y < y0 + bh; ++y)
      for (int x = x0; x < x0 + bw; ++x) {
        const bool stroke = (y - y0) % 4 == 2 && (x - x0) % 6 < 4;
        if (stroke)
          img.set(x, y, 20, 20, 20);
        else
          img.set(x, y, 235, 235, 235);
      }
  }
  if (u(rng) < o.border_prob) {
    const bool letterbox = u(rng) < 0.5;
    const int by = std::max(2, static_cast<int>(h * (0.06 + 0.08 * u(rng))));
    const int bx = letterbox ? 0 : std::max(2, static_cast<int>(w * (0.04 + 0.06 * u(rng))));
    Image framed(w + 2 * bx, h + 2 * by);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const auto* p = img.at(x, y);
        framed.set(x + bx, y + by, p[0], p[1], p[2]);
      }
    img = std::move(framed);
  }
  return img;
}

PlantedSet planted_frames(std::size_t frames, std::size_t groups, std::uint64_t seed, int width, int height) {
  std::mt19937_64 rng(mix_seed(seed, "planted"));
  std::uniform_int_distribution<int> size(5, 8);
  PlantedSet set;
  for (std::size_t g = 0; g < groups && set.frames.size() < frames; ++g) {
    const Image base = natural_image(rng, width, height);
    const int n = size(rng);
    for (int i = 0; i < n && set.frames.size() < frames; ++i) {
      set.frames.push_back(i == 0 ? base : jitter(base, rng));
      set.group.push_back(static_cast<int>(g));
    }
  }
  while (set.frames.size() < frames) {
    set.frames.push_back(natural_image(rng, width, height));
    set.group.push_back(-1);
  }
  std::vector<std::size_t> order(frames);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  PlantedSet out;
  for (auto i : order) {
    out.frames.push_back(std::move(set.frames[i]));
    out.group.push_back(set.group[i]);
  }
  return out;
}

std::vector<memedetect::LabeledPair> planted_labels(const std::vector<int>& group, std::uint64_t seed,
                                                    std::size_t negatives_per_positive) {
  std::vector<memedetect::LabeledPair> labels;
  const std::size_t n = group.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (group[i] >= 0 && group[i] == group[j])
        labels.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), true});
  const std::size_t want = labels.size() * negatives_per_positive;
  std::mt19937_64 rng(mix_seed(seed, "negatives"));
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t tries = 0; seen.size() < want && tries < want * 20; ++tries) {
    std::size_t a = pick(rng), b = pick(rng);
    if (a == b || (group[a] >= 0 && group[a] == group[b])) continue;
    if (a > b) std::swap(a, b);
    if (seen.insert({a, b}).second)
      labels.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b), false});
  }
  return labels;
}

namespace {

const std::vector<std::vector<std::string>>& topic_words() {
  static const std::vector<std::vector<std::string>> words{
      {"election", "ballot", "vote", "candidate", "poll", "campaign", "result", "count"},
      {"protest", "march", "crowd", "street", "rally", "square", "chant", "police"},
      {"speech", "president", "leader", "address", "statement", "minister", "parliament", "debate"},
      {"music", "song", "concert", "singer", "guitar", "band", "lyrics", "remix"},
      {"football", "match", "goal", "stadium", "team", "league", "coach", "score"},
      {"storm", "flood", "rain", "weather", "river", "damage", "rescue", "wind"},
      {"history", "archive", "documentary", "revolution", "propaganda", "1979", "footage", "interview"},
      {"cartoon", "parody", "comedy", "satire", "joke", "animation", "sketch", "funny"}};
  return words;
}

const std::vector<std::string>& filler_words() {
  static const std::vector<std::string> words{"video", "new", "today", "watch", "clip", "live", "report", "part",
                                              "news", "full", "original", "update"};
  return words;
}

std::string compose_text(std::mt19937_64& rng, const std::vector<int>& topics, int per_topic, int fillers) {
  std::vector<std::string> parts{"the"};
  for (int t : topics) {
    const auto& w = topic_words()[static_cast<std::size_t>(t) % topic_words().size()];
    std::uniform_int_distribution<std::size_t> pick(0, w.size() - 1);
    for (int i = 0; i < per_topic; ++i) parts.push_back(w[pick(rng)]);
  }
  std::uniform_int_distribution<std::size_t> pf(0, filler_words().size() - 1);
  for (int i = 0; i < fillers; ++i) parts.push_back(filler_words()[pf(rng)]);
  std::string s;
  for (const auto& p : parts) s += (s.empty() ? "" : " ") + p;
  return s;
}

std::string pad(std::size_t v, int width) {
  std::string s = std::to_string(v);
  return std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(s.size()))), '0') + s;
}

}  // namespace

DemoSummary write_demo_corpus(const std::string& dir, const DemoOptions& o) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(dir) / "frames");
  std::mt19937_64 rng(mix_seed(o.seed, "demo"));
  std::uniform_real_distribution<double> u(0.0, 1.0);

  const PlantedSet set = planted_frames(o.keyframes, o.groups, o.seed, o.width, o.height);
  // Pack keyframes into videos of 1..3 shots, never two copies of one group.
  std::vector<std::vector<std::size_t>> videos;
  {
    std::vector<std::size_t> pending(set.frames.size());
    std::iota(pending.begin(), pending.end(), 0);
    std::uniform_int_distribution<int> shots(1, 3);
    while (!pending.empty()) {
      std::vector<std::size_t> v;
      const int want = shots(rng);
      for (auto it = pending.begin(); it != pending.end() && static_cast<int>(v.size()) < want;) {
        const int g = set.group[*it];
        const bool clash = g >= 0 && std::any_of(v.begin(), v.end(), [&](std::size_t f) { return set.group[f] == g; });
        if (clash) {
          ++it;
          continue;
        }
        v.push_back(*it);
        it = pending.erase(it);
      }
      videos.push_back(std::move(v));
    }
  }
  // Consecutive shots must be separable by the default segmentation threshold.
  for (auto& v : videos)
    for (int attempt = 0; attempt < 20 && v.size() > 1; ++attempt) {
      bool ok = true;
      for (std::size_t i = 0; i + 1 < v.size(); ++i)
        ok &= imgproc::histogram_l1(imgproc::color_histogram(set.frames[v[i]]),
                                    imgproc::color_histogram(set.frames[v[i + 1]])) > 1.0;
      if (ok) break;
      std::shuffle(v.begin(), v.end(), rng);
    }

  // Author productivity is heavy tailed.
  std::vector<double> weight(o.authors);
  for (std::size_t a = 0; a < o.authors; ++a) weight[a] = 1.0 / std::pow(static_cast<double>(a + 1), 0.8);
  std::discrete_distribution<std::size_t> author(weight.begin(), weight.end());
  const Timestamp start = *parse_iso8601("2009-06-12T00:00:00Z");
  std::uniform_int_distribution<Timestamp> when(0, static_cast<Timestamp>(o.days) * 86400 - 1);
  std::lognormal_distribution<double> views(7.0, 1.8);
  std::uniform_int_distribution<int> pixel_noise(-1, 1);

  std::ostringstream manifest;
  std::vector<std::pair<std::string, int>> key_of(set.frames.size());
  std::size_t frame_files = 0;
  for (std::size_t vi = 0; vi < videos.size(); ++vi) {
    const std::string vid = "v" + pad(vi, 4);
    std::vector<int> topics;
    nlohmann::json frames = nlohmann::json::array();
    for (std::size_t s = 0; s < videos[vi].size(); ++s) {
      const std::size_t f = videos[vi][s];
      key_of[f] = {vid, static_cast<int>(s)};
      const int g = set.group[f];
      topics.push_back(g >= 0 ? g : static_cast<int>(u(rng) * topic_words().size()));
      for (int k = 0; k < o.frames_per_shot; ++k) {
        Image img = set.frames[f];
        if (k > 0)
          for (auto& px : img.data()) px = clamp8(px + pixel_noise(rng));
        const std::string rel = "frames/" + vid + "_" + pad(s, 2) + "_" + std::to_string(k) + ".png";
        write_png((fs::path(dir) / rel).string(), img);
        ++frame_files;
        const int seq = static_cast<int>(s) * o.frames_per_shot + k;
        frames.push_back({{"shot", seq}, {"path", rel}, {"t_offset_s", seq * 0.5}});
      }
    }
    nlohmann::json rec{{"video_id", vid},
                       {"author_id", "a" + pad(author(rng), 3)},
                       {"upload_time", format_iso8601(start + when(rng))},
                       {"title", compose_text(rng, topics, 2, 1)},
                       {"description", compose_text(rng, topics, 1, 2)},
                       {"view_count", static_cast<std::uint64_t>(views(rng))},
                       {"frames", frames}};
    manifest << rec.dump() << '\n';
  }
  DemoSummary out;
  out.manifest = (fs::path(dir) / "manifest.jsonl").string();
  write_text_file(out.manifest, manifest.str());

  std::ostringstream labels;
  labels << "video_a,shot_a,video_b,shot_b,label\n";
  for (const auto& l : planted_labels(set.group, o.seed))
    labels << key_of[l.a].first << ',' << key_of[l.a].second << ',' << key_of[l.b].first << ',' << key_of[l.b].second
           << ',' << (l.duplicate ? 1 : 0) << '\n';
  out.labels = (fs::path(dir) / "labels.csv").string();
  write_text_file(out.labels, labels.str());
  out.videos = videos.size();
  out.frames = frame_files;
  return out;
}

FeatureMatrix clustered_features(std::size_t rows, std::size_t dim, std::size_t clusters, std::uint64_t seed) {
  std::mt19937_64 rng(mix_seed(seed, "clustered"));
  std::normal_distribution<double> g(0.0, 1.0);
  constexpr std::size_t kRank = 6;
  std::vector<std::vector<double>> center(clusters, std::vector<double>(dim));
  std::vector<std::vector<double>> basis(clusters * kRank, std::vector<double>(dim));
  for (auto& c : center)
    for (auto& v : c) v = g(rng);
  for (auto& b : basis)
    for (auto& v : b) v = g(rng) * 0.25;
  FeatureMatrix m(static_cast<std::uint32_t>(rows), static_cast<std::uint32_t>(dim));
  std::uniform_int_distribution<std::size_t> pick(0, clusters - 1);
  for (std::size_t i = 0; i < rows; ++i) {
    const std::size_t c = pick(rng);
    double coef[kRank];
    for (auto& x : coef) x = g(rng);
    auto row = m.row(i);
    for (std::size_t d = 0; d < dim; ++d) {
      double v = center[c][d] + 0.05 * g(rng);
      for (std::size_t r = 0; r < kRank; ++r) v += coef[r] * basis[c * kRank + r][d];
      row[d] = static_cast<float>(v);
    }
  }
  return m;
}

PredictionCorpus prediction_corpus(const PredictionOptions& o) {
  std::mt19937_64 rng(mix_seed(o.seed, "prediction"));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g(0.0, 1.0);
  std::lognormal_distribution<double> reach_dist(0.0, 0.8);
  std::lognormal_distribution<double> views(6.0, 1.5);

  std::vector<double> reach(o.authors), log_reach(o.authors);
  for (std::size_t a = 0; a < o.authors; ++a) {
    reach[a] = reach_dist(rng);
    log_reach[a] = std::log(reach[a]);
  }
  std::discrete_distribution<std::size_t> by_reach(reach.begin(), reach.end());
  std::vector<double> topic_base(o.topics);
  for (auto& b : topic_base) b = 0.9 * g(rng);

  struct Post {
    std::size_t meme;
    std::size_t author;
    Timestamp time;
    int topic;
  };
  std::vector<Post> posts;
  const Timestamp start = *parse_iso8601("2009-06-12T00:00:00Z");
  const Timestamp horizon = start + static_cast<Timestamp>(o.days) * 86400;
  for (std::size_t m = 0; m < o.memes; ++m) {
    const int topic = static_cast<int>(m % o.topics);
    const double z = topic_base[static_cast<std::size_t>(topic)] + 0.5 * g(rng);
    const Timestamp onset = start + static_cast<Timestamp>(u(rng) * (o.days - 6) * 86400.0);
    // Popular memes tend to start from high-reach authors.
    std::vector<double> w(o.authors);
    for (std::size_t a = 0; a < o.authors; ++a) w[a] = std::exp(0.8 * z * log_reach[a]);
    std::discrete_distribution<std::size_t> origin(w.begin(), w.end());
    posts.push_back({m, origin(rng), onset, topic});
    std::poisson_distribution<int> early(0.8 * std::exp(0.4 * z));
    const int n1 = early(rng);
    for (int i = 0; i < n1; ++i)
      posts.push_back({m, by_reach(rng), onset + 1 + static_cast<Timestamp>(u(rng) * 86000), topic});
    std::poisson_distribution<int> late(3.0 * std::exp(0.9 * z));
    std::exponential_distribution<double> gap(1.0 / (4.0 * 86400));
    const int n2 = late(rng);
    for (int i = 0; i < n2; ++i) {
      const Timestamp t = onset + 86400 + 1 + static_cast<Timestamp>(gap(rng));
      if (t < horizon) posts.push_back({m, by_reach(rng), t, topic});
    }
  }
  // Unrelated uploads keep productivity from equalling meme activity.
  for (std::size_t i = 0; i < o.memes; ++i)
    posts.push_back({o.memes, by_reach(rng), start + static_cast<Timestamp>(u(rng) * o.days * 86400.0),
                     static_cast<int>(u(rng) * o.topics)});

  std::sort(posts.begin(), posts.end(), [](const Post& a, const Post& b) {
    if (a.time != b.time) return a.time < b.time;
    return a.meme < b.meme;
  });
  std::vector<corpus::VideoDoc> docs;
  std::vector<std::vector<memedetect::FrameKey>> members(o.memes);
  for (std::size_t i = 0; i < posts.size(); ++i) {
    const auto& p = posts[i];
    corpus::VideoDoc d;
    d.video_id = "p" + pad(i, 6);
    d.author_id = "u" + pad(p.author, 4);
    d.upload_time = p.time;
    d.title = compose_text(rng, {p.topic}, 2, 1);
    d.description = compose_text(rng, {p.topic}, 1, 2);
    d.view_count = static_cast<std::uint64_t>(views(rng));
    if (p.meme < o.memes) members[p.meme].push_back({static_cast<std::uint32_t>(i), 0});
    docs.push_back(std::move(d));
  }
  PredictionCorpus out;
  out.corpus = corpus::Corpus::from_videos(std::move(docs));
  for (std::size_t m = 0; m < o.memes; ++m) {
    auto c = memedetect::resolve_cluster(members[m], out.corpus);
    c.meme_id = static_cast<std::uint32_t>(m);
    out.clusters.push_back(std::move(c));
  }
  return out;
}

}  // namespace vmeme::synth

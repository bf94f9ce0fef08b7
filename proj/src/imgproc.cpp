#include "vmeme/imgproc.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "vmeme/util.hpp"

namespace vmeme::imgproc {

ColorHistogram color_histogram(const Image& img) {
  ColorHistogram h{};
  const auto& d = img.data();
  for (std::size_t i = 0; i < d.size(); i += 3) h[(d[i] >> 5) * 64 + (d[i + 1] >> 5) * 8 + (d[i + 2] >> 5)] += 1.0;
  const double n = static_cast<double>(d.size() / 3);
  if (n > 0)
    for (auto& v : h) v /= n;
  return h;
}

double histogram_l1(const ColorHistogram& a, const ColorHistogram& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

std::vector<ShotRecord> segment_shots(std::span<const RawFrame> frames, double threshold, std::uint64_t seed) {
  if (frames.empty()) throw InvalidArgument("segment_shots: empty frame sequence");
  if (!(threshold > 0)) throw InvalidArgument("segment_shots: threshold must be positive");

  std::vector<std::size_t> starts{0};
  ColorHistogram prev = color_histogram(frames[0].pixels);
  for (std::size_t i = 1; i < frames.size(); ++i) {
    ColorHistogram cur = color_histogram(frames[i].pixels);
    if (histogram_l1(prev, cur) > threshold) starts.push_back(i);
    prev = cur;
  }

  // Duration of the trailing shot: median inter-frame spacing, else 1 s.
  double spacing = 1.0;
  if (frames.size() > 1) {
    std::vector<double> gaps;
    for (std::size_t i = 1; i < frames.size(); ++i) gaps.push_back(frames[i].t_offset - frames[i - 1].t_offset);
    std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
    if (gaps[gaps.size() / 2] > 0) spacing = gaps[gaps.size() / 2];
  }

  std::mt19937_64 rng(mix_seed(seed, frames[0].video_id));
  std::vector<ShotRecord> shots;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    const std::size_t begin = starts[s];
    const std::size_t end = s + 1 < starts.size() ? starts[s + 1] : frames.size();
    ShotRecord rec;
    rec.video_id = frames[begin].video_id;
    rec.shot_index = static_cast<int>(s);
    rec.keyframe = begin + static_cast<std::size_t>(rng() % (end - begin));
    rec.start = frames[begin].t_offset;
    rec.end = end < frames.size() ? frames[end].t_offset : frames[end - 1].t_offset + spacing;
    if (!(rec.end > rec.start)) rec.end = rec.start + spacing;
    shots.push_back(std::move(rec));
  }
  return shots;
}

double gray_entropy(const Image& img) {
  std::array<double, 8> h{};
  const std::size_t n = static_cast<std::size_t>(img.width()) * img.height();
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) h[luma(img.at(x, y)) >> 5] += 1.0;
  double e = 0;
  for (double c : h)
    if (c > 0) {
      const double p = c / static_cast<double>(n);
      e -= p * std::log2(p);
    }
  return e;
}

namespace {

template <class Pixel>
double line_variance(int count, Pixel&& pixel) {
  double sum = 0, sq = 0;
  for (int i = 0; i < count; ++i) {
    const double l = luma(pixel(i));
    sum += l;
    sq += l * l;
  }
  const double mean = sum / count;
  return std::max(0.0, sq / count - mean * mean);
}

}  // namespace

BorderBox detect_border(const Image& img, double max_variance) {
  BorderBox b;
  const int w = img.width(), h = img.height();
  auto row_var = [&](int y, int x0, int x1) { return line_variance(x1 - x0, [&](int i) { return img.at(x0 + i, y); }); };
  auto col_var = [&](int x, int y0, int y1) { return line_variance(y1 - y0, [&](int i) { return img.at(x, y0 + i); }); };
  while (b.top < h && row_var(b.top, 0, w) < max_variance) ++b.top;
  while (b.bottom < h - b.top && row_var(h - 1 - b.bottom, 0, w) < max_variance) ++b.bottom;
  const int y0 = b.top, y1 = h - b.bottom;
  if (y1 <= y0) return b;
  while (b.left < w && col_var(b.left, y0, y1) < max_variance) ++b.left;
  while (b.right < w - b.left && col_var(w - 1 - b.right, y0, y1) < max_variance) ++b.right;
  return b;
}

Image normalize_aspect(const Image& img) {
  const int target = static_cast<int>(std::lround(img.height() * 4.0 / 3.0));
  if (target == img.width()) return img;
  return resize_bilinear(img, target, img.height());
}

Image median3x3(const Image& img) {
  const int w = img.width(), h = img.height();
  Image out(w, h);
  std::array<std::uint8_t, 9> win;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) {
        int k = 0;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int xx = std::clamp(x + dx, 0, w - 1), yy = std::clamp(y + dy, 0, h - 1);
            win[k++] = img.at(xx, yy)[c];
          }
        std::nth_element(win.begin(), win.begin() + 4, win.end());
        out.at(x, y)[c] = win[4];
      }
  return out;
}

Image equalize_luma(const Image& img, double clip_limit, int tiles) {
  const int w = img.width(), h = img.height();
  const int tx = std::clamp(tiles, 1, w), ty = std::clamp(tiles, 1, h);
  std::vector<std::uint8_t> y(static_cast<std::size_t>(w) * h);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) y[static_cast<std::size_t>(r) * w + c] = luma(img.at(c, r));

  // One lookup table per tile.
  std::vector<std::array<double, 256>> lut(static_cast<std::size_t>(tx) * ty);
  for (int j = 0; j < ty; ++j)
    for (int i = 0; i < tx; ++i) {
      const int x0 = i * w / tx, x1 = (i + 1) * w / tx;
      const int y0 = j * h / ty, y1 = (j + 1) * h / ty;
      std::array<int, 256> hist{};
      for (int r = y0; r < y1; ++r)
        for (int c = x0; c < x1; ++c) ++hist[y[static_cast<std::size_t>(r) * w + c]];
      const int area = (x1 - x0) * (y1 - y0);
      const int limit = std::max(1, static_cast<int>(clip_limit * area / 256.0));
      int excess = 0;
      for (auto& v : hist)
        if (v > limit) {
          excess += v - limit;
          v = limit;
        }
      const int bonus = excess / 256;
      int residual = excess - bonus * 256;
      for (auto& v : hist) v += bonus;
      // Spread the remainder evenly across the range.
      if (residual > 0) {
        const int step = std::max(1, 256 / residual);
        for (int b = 0; b < 256 && residual > 0; b += step, --residual) ++hist[b];
      }
      auto& table = lut[static_cast<std::size_t>(j) * tx + i];
      double cdf = 0;
      for (int b = 0; b < 256; ++b) {
        cdf += hist[b];
        table[b] = std::clamp(std::round(cdf * 255.0 / area), 0.0, 255.0);
      }
    }

  Image out(w, h);
  for (int r = 0; r < h; ++r) {
    const double fy = std::clamp((r + 0.5) * ty / h - 0.5, 0.0, static_cast<double>(ty - 1));
    const int j0 = static_cast<int>(fy), j1 = std::min(j0 + 1, ty - 1);
    const double wy = fy - j0;
    for (int c = 0; c < w; ++c) {
      const double fx = std::clamp((c + 0.5) * tx / w - 0.5, 0.0, static_cast<double>(tx - 1));
      const int i0 = static_cast<int>(fx), i1 = std::min(i0 + 1, tx - 1);
      const double wx = fx - i0;
      const std::uint8_t v = y[static_cast<std::size_t>(r) * w + c];
      const double top = lut[static_cast<std::size_t>(j0) * tx + i0][v] * (1 - wx) + lut[static_cast<std::size_t>(j0) * tx + i1][v] * wx;
      const double bot = lut[static_cast<std::size_t>(j1) * tx + i0][v] * (1 - wx) + lut[static_cast<std::size_t>(j1) * tx + i1][v] * wx;
      const double delta = top * (1 - wy) + bot * wy - v;
      const auto* src = img.at(c, r);
      auto* dst = out.at(c, r);
      for (int k = 0; k < 3; ++k) dst[k] = static_cast<std::uint8_t>(std::lround(std::clamp(src[k] + delta, 0.0, 255.0)));
    }
  }
  return out;
}

PreparedFrame prepare_frame(const Image& frame, const PrepOptions& options) {
  if (frame.width() < kMinFrameSide || frame.height() < kMinFrameSide)
    throw InvalidArgument("prepare_frame: raster smaller than 16x16");
  PreparedFrame out;
  if (gray_entropy(frame) < options.blank_entropy) {
    out.pixels = frame;
    out.blank = true;
    return out;
  }
  const BorderBox b = detect_border(frame, options.border_var);
  const int w = frame.width() - b.left - b.right, h = frame.height() - b.top - b.bottom;
  if (w < kMinFrameSide || h < kMinFrameSide)
    throw DegenerateInput("prepare_frame: frame smaller than 16x16 after border removal");
  Image img = frame;
  if (b.left || b.right || b.top || b.bottom) {
    img = frame.crop(b.left, b.top, w, h);
    out.border_removed = true;
  }
  img = normalize_aspect(img);
  img = median3x3(img);
  out.pixels = equalize_luma(img, options.clip_limit, options.tiles);
  return out;
}

}  // namespace vmeme::imgproc

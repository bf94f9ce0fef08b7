#include "vmeme/correlogram.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "vmeme/util.hpp"

namespace vmeme {

void FeatureMatrix::append(std::span<const float> r) {
  if (rows == 0 && dim == 0) dim = static_cast<std::uint32_t>(r.size());
  if (r.size() != dim) throw InvalidArgument("FeatureMatrix::append: dimension mismatch");
  values.insert(values.end(), r.begin(), r.end());
  ++rows;
}

namespace {

void put_u32(std::ofstream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::ifstream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void write_vmf(const std::string& path, const FeatureMatrix& m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out.write("VMF1", 4);
  put_u32(out, m.rows);
  put_u32(out, m.dim);
  for (float f : m.values) put_u32(out, std::bit_cast<std::uint32_t>(f));
  if (!out) throw Error("write failed: " + path);
}

FeatureMatrix read_vmf(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "VMF1", 4) != 0) throw Error(path + ": not a VMF1 file");
  FeatureMatrix m;
  m.rows = get_u32(in);
  m.dim = get_u32(in);
  m.values.resize(static_cast<std::size_t>(m.rows) * m.dim);
  for (auto& f : m.values) f = std::bit_cast<float>(get_u32(in));
  if (!in) throw Error(path + ": truncated VMF1 payload");
  return m;
}

double squared_l2(std::span<const float> a, std::span<const float> b) {
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  std::size_t i = 0;
  const std::size_t n = a.size();
  for (; i + 4 <= n; i += 4) {
    const double d0 = a[i] - b[i], d1 = a[i + 1] - b[i + 1], d2 = a[i + 2] - b[i + 2], d3 = a[i + 3] - b[i + 3];
    s0 += d0 * d0;
    s1 += d1 * d1;
    s2 += d2 * d2;
    s3 += d3 * d3;
  }
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s0 += d * d;
  }
  return (s0 + s1) + (s2 + s3);
}

double l2_norm(std::span<const float> a) {
  double s = 0;
  for (float v : a) s += static_cast<double>(v) * v;
  return std::sqrt(s);
}

}  // namespace vmeme

namespace vmeme::correlogram {

int quantize_hsv(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const int mx = std::max({r, g, b});
  const int mn = std::min({r, g, b});
  const double v = mx / 255.0;
  const double s = mx == 0 ? 0.0 : static_cast<double>(mx - mn) / mx;
  if (s < 0.1) {
    if (v < 0.25) return kChromaticBins;
    if (v < 0.5) return kChromaticBins + 1;
    if (v < 0.75) return kChromaticBins + 2;
    return kChromaticBins + 3;
  }
  const double delta = mx - mn;
  double h;
  if (mx == r)
    h = 60.0 * std::fmod((g - b) / delta + 6.0, 6.0);
  else if (mx == g)
    h = 60.0 * ((b - r) / delta + 2.0);
  else
    h = 60.0 * ((r - g) / delta + 4.0);
  const int hb = std::min(17, static_cast<int>(h / 20.0));
  auto level = [](double x) { return x < 0.25 ? 0 : (x < 0.7 ? 1 : 2); };
  return hb * 9 + level(s) * 3 + level(v);
}

const std::vector<int>& default_distances() {
  static const std::vector<int> d{1, 3, 5, 7};
  return d;
}

namespace {

// Same-color pair counts within the rectangle [x0,x1) x [y0,y1) of a
// quantized raster; neighbors outside the rectangle are not counted.
void block_correlogram(const std::vector<std::uint8_t>& q, int width, int x0, int y0, int x1, int y1,
                       std::span<const int> distances, double* out) {
  std::array<double, kColors> acc{};
  std::array<int, kColors> used{};
  std::array<std::int64_t, kColors> same{}, total{};
  for (int d : distances) {
    same.fill(0);
    total.fill(0);
    for (int y = y0; y < y1; ++y) {
      for (int x = x0; x < x1; ++x) {
        const std::uint8_t c = q[static_cast<std::size_t>(y) * width + x];
        std::int64_t s = 0, t = 0;
        const int xl = std::max(x0, x - d), xr = std::min(x1 - 1, x + d);
        // Top and bottom edges of the ring.
        for (int yy : {y - d, y + d}) {
          if (yy < y0 || yy >= y1) continue;
          const std::uint8_t* row = &q[static_cast<std::size_t>(yy) * width];
          for (int xx = xl; xx <= xr; ++xx) s += row[xx] == c;
          t += xr - xl + 1;
        }
        // Left and right edges, corners excluded.
        const int yt = std::max(y0, y - d + 1), yb = std::min(y1 - 1, y + d - 1);
        for (int xx : {x - d, x + d}) {
          if (xx < x0 || xx >= x1) continue;
          for (int yy = yt; yy <= yb; ++yy) s += q[static_cast<std::size_t>(yy) * width + xx] == c;
          t += yb - yt + 1;
        }
        same[c] += s;
        total[c] += t;
      }
    }
    for (int c = 0; c < kColors; ++c)
      if (total[c] > 0) {
        acc[c] += static_cast<double>(same[c]) / static_cast<double>(total[c]);
        ++used[c];
      }
  }
  for (int c = 0; c < kColors; ++c) out[c] = used[c] ? acc[c] / used[c] : 0.0;
}

}  // namespace

CorrelogramFeature extract(const Image& pixels, std::span<const int> distances) {
  if (distances.empty()) throw InvalidArgument("correlogram: empty distance set");
  for (int d : distances)
    if (d <= 0) throw InvalidArgument("correlogram: distances must be positive");
  const int w = pixels.width(), h = pixels.height();
  const int ry = h / 3, rx = w / 3;
  if (h - 2 * ry <= 1 || w - 2 * rx <= 1) throw DegenerateInput("correlogram: central stripe is at most 1 pixel wide");

  std::vector<std::uint8_t> q(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const auto* p = pixels.at(x, y);
      q[static_cast<std::size_t>(y) * w + x] = static_cast<std::uint8_t>(quantize_hsv(p[0], p[1], p[2]));
    }

  CorrelogramFeature f;
  block_correlogram(q, w, 0, ry, w, h - ry, distances, f.values.data());
  block_correlogram(q, w, rx, 0, w - rx, h, distances, f.values.data() + kColors);
  double s = 0;
  for (double v : f.values) s += v * v;
  f.l2_norm = std::sqrt(s);
  return f;
}

CorrelogramFeature extract(const imgproc::PreparedFrame& frame, std::span<const int> distances) {
  if (frame.blank) throw InvalidArgument("correlogram: blank frame");
  return extract(frame.pixels, distances);
}

CollectionMaxFeature collection_max(std::span<const CorrelogramFeature> features) {
  if (features.empty()) throw InvalidArgument("collection_max: empty feature stream");
  CollectionMaxFeature m;
  m.values = features[0].values;
  for (const auto& f : features.subspan(1))
    for (int i = 0; i < kDim; ++i) m.values[i] = std::max(m.values[i], f.values[i]);
  double s = 0;
  for (double v : m.values) s += v * v;
  m.l2_norm = std::sqrt(s);
  return m;
}

CollectionMaxFeature collection_max(const FeatureMatrix& features) {
  if (features.rows == 0) throw InvalidArgument("collection_max: empty feature stream");
  if (features.dim != kDim) throw InvalidArgument("collection_max: expected 332-d rows");
  CollectionMaxFeature m;
  m.values.fill(-std::numeric_limits<double>::infinity());
  for (std::size_t r = 0; r < features.rows; ++r) {
    auto row = features.row(r);
    for (int i = 0; i < kDim; ++i) m.values[i] = std::max(m.values[i], static_cast<double>(row[i]));
  }
  double s = 0;
  for (double v : m.values) s += v * v;
  m.l2_norm = std::sqrt(s);
  return m;
}

CollectionMaxFeature merge(const CollectionMaxFeature& a, const CollectionMaxFeature& b) {
  CollectionMaxFeature m;
  double s = 0;
  for (int i = 0; i < kDim; ++i) {
    m.values[i] = std::max(a.values[i], b.values[i]);
    s += m.values[i] * m.values[i];
  }
  m.l2_norm = std::sqrt(s);
  return m;
}

std::vector<float> to_floats(const CorrelogramFeature& f) {
  return std::vector<float>(f.values.begin(), f.values.end());
}

}  // namespace vmeme::correlogram

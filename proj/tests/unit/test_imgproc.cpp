#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "vmeme/correlogram.hpp"
#include "vmeme/imgproc.hpp"
#include "vmeme/synth.hpp"
#include "vmeme/util.hpp"

using namespace vmeme;
using namespace vmeme::imgproc;
namespace fs = std::filesystem;

namespace {

std::vector<RawFrame> solid_frames(std::initializer_list<std::array<int, 3>> colors, int repeat) {
  std::vector<RawFrame> frames;
  for (const auto& c : colors)
    for (int i = 0; i < repeat; ++i)
      frames.push_back({Image(32, 24, c[0], c[1], c[2]), "v", static_cast<double>(frames.size())});
  return frames;
}

Image with_border(const Image& inner, int border) {
  Image out(inner.width() + 2 * border, inner.height() + 2 * border, 0, 0, 0);
  for (int y = 0; y < inner.height(); ++y)
    for (int x = 0; x < inner.width(); ++x) {
      const auto* p = inner.at(x, y);
      out.set(x + border, y + border, p[0], p[1], p[2]);
    }
  return out;
}

}  // namespace

TEST_CASE("shot segmentation") {
  SUBCASE("identical frames form one shot") {
    const auto frames = solid_frames({{{10, 200, 30}}}, 10);
    const auto shots = segment_shots(frames, 0.5, 1);
    REQUIRE(shots.size() == 1);
    CHECK(shots[0].keyframe < 10);
  }
  SUBCASE("red then blue cuts at index 5") {
    const auto frames = solid_frames({{{255, 0, 0}}, {{0, 0, 255}}}, 5);
    const auto shots = segment_shots(frames, 0.5, 1);
    REQUIRE(shots.size() == 2);
    CHECK(shots[0].keyframe < 5);
    CHECK(shots[1].keyframe >= 5);
    CHECK(shots[1].start == doctest::Approx(5.0));
  }
  SUBCASE("planted transitions agree with a histogram scan") {
    std::mt19937_64 rng(3);
    std::vector<RawFrame> frames;
    std::vector<Image> bases;
    for (int s = 0; s < 4; ++s) bases.push_back(synth::natural_image(rng, 64, 48));
    for (int s = 0; s < 4; ++s)
      for (int i = 0; i < 6; ++i) frames.push_back({bases[s], "v", static_cast<double>(frames.size())});
    std::size_t cuts = 0;
    for (std::size_t i = 1; i < frames.size(); ++i)
      cuts += histogram_l1(color_histogram(frames[i - 1].pixels), color_histogram(frames[i].pixels)) > 0.5;
    const auto shots = segment_shots(frames, 0.5, 1);
    CHECK(shots.size() == cuts + 1);
    CHECK(shots.size() == 4);
    CHECK(segment_shots(frames, 0.5, 1)[2].keyframe == shots[2].keyframe);
  }
  CHECK_THROWS_AS(segment_shots(std::vector<RawFrame>{}, 0.5, 1), InvalidArgument);
}

TEST_CASE("frame preparation") {
  SUBCASE("black frame is blank") {
    const auto p = prepare_frame(Image(64, 48, 0, 0, 0));
    CHECK(p.blank);
  }
  SUBCASE("normalized frame keeps its size") {
    std::mt19937_64 rng(9);
    const auto img = synth::natural_image(rng, 640, 480);
    const auto p = prepare_frame(img);
    CHECK_FALSE(p.blank);
    CHECK_FALSE(p.border_removed);
    CHECK(p.pixels.width() == 640);
    CHECK(p.pixels.height() == 480);
  }
  SUBCASE("black borders are stripped") {
    std::mt19937_64 rng(10);
    const auto inner = synth::natural_image(rng, 160, 120);
    const auto a = prepare_frame(with_border(inner, 20));
    const auto b = prepare_frame(inner);
    CHECK(a.border_removed);
    REQUIRE(a.pixels.width() == b.pixels.width());
    REQUIRE(a.pixels.height() == b.pixels.height());
    int worst = 0;
    for (std::size_t i = 0; i < a.pixels.data().size(); ++i)
      worst = std::max(worst, std::abs(int(a.pixels.data()[i]) - int(b.pixels.data()[i])));
    CHECK(worst <= 2);
  }
  SUBCASE("aspect becomes 4:3") {
    std::mt19937_64 rng(11);
    const auto p = prepare_frame(synth::natural_image(rng, 200, 90));
    CHECK(p.pixels.height() == 90);
    CHECK(p.pixels.width() == 120);
  }
  SUBCASE("tiny frames are rejected") {
    Image img(40, 40, 0, 0, 0);
    std::mt19937_64 rng(12);
    const auto small = synth::natural_image(rng, 10, 10);
    for (int y = 0; y < 10; ++y)
      for (int x = 0; x < 10; ++x) {
        const auto* p = small.at(x, y);
        img.set(x + 15, y + 15, p[0], p[1], p[2]);
      }
    CHECK_THROWS_AS(prepare_frame(img, {0.0, 25.0, 2.0, 8}), DegenerateInput);
    CHECK_THROWS_AS(prepare_frame(Image(8, 8, 1, 2, 3)), InvalidArgument);
  }
  SUBCASE("entropy") {
    CHECK(gray_entropy(Image(16, 16, 90, 90, 90)) == 0.0);
    Image half(16, 16, 0, 0, 0);
    for (int y = 0; y < 8; ++y)
      for (int x = 0; x < 16; ++x) half.set(x, y, 255, 255, 255);
    CHECK(gray_entropy(half) == doctest::Approx(1.0));
  }
}

TEST_CASE("image io round trip") {
  const auto dir = fs::temp_directory_path() / "vmeme_test_io";
  fs::create_directories(dir);
  std::mt19937_64 rng(2);
  const auto img = synth::natural_image(rng, 37, 23);
  write_png((dir / "a.png").string(), img);
  write_ppm((dir / "a.ppm").string(), img);
  CHECK(read_image((dir / "a.png").string()) == img);
  CHECK(read_image((dir / "a.ppm").string()) == img);
  CHECK(img.flipped_horizontal().flipped_horizontal() == img);
}

TEST_CASE("hsv quantization") {
  using correlogram::kChromaticBins;
  CHECK(correlogram::quantize_hsv(0, 0, 0) == kChromaticBins);
  CHECK(correlogram::quantize_hsv(255, 255, 255) == kChromaticBins + 3);
  // hue sector 0, top saturation level, top value level
  CHECK(correlogram::quantize_hsv(255, 0, 0) == 0 * 9 + 2 * 3 + 2);
  CHECK(correlogram::quantize_hsv(0, 255, 0) == 6 * 9 + 8);
  CHECK(correlogram::quantize_hsv(0, 0, 255) == 12 * 9 + 8);
  for (int r = 0; r < 256; r += 15)
    for (int g = 0; g < 256; g += 15)
      for (int b = 0; b < 256; b += 15) {
        const int q = correlogram::quantize_hsv(r, g, b);
        CHECK((q >= 0 && q < correlogram::kColors));
      }
}

TEST_CASE("correlogram values") {
  const auto& dist = correlogram::default_distances();
  SUBCASE("uniform frame is an indicator") {
    const auto f = correlogram::extract(Image(30, 24, 0, 0, 255), dist);
    const int c = correlogram::quantize_hsv(0, 0, 255);
    for (int i = 0; i < correlogram::kDim; ++i)
      CHECK(f.values[i] == ((i == c || i == c + correlogram::kColors) ? 1.0 : 0.0));
    CHECK(f.l2_norm == doctest::Approx(std::sqrt(2.0)));
  }
  SUBCASE("checkerboard against pair enumeration") {
    Image img(8, 8);
    for (int y = 0; y < 8; ++y)
      for (int x = 0; x < 8; ++x) {
        const std::uint8_t v = (x + y) % 2 ? 255 : 0;
        img.set(x, y, v, v, v);
      }
    for (const std::vector<int>& d : {std::vector<int>{1}, std::vector<int>{1, 3, 5, 7}, std::vector<int>{2}}) {
      const auto f = correlogram::extract(img, d);
      const auto o = oracle::correlogram(img, d);
      for (int i = 0; i < correlogram::kDim; ++i) CHECK(std::abs(f.values[i] - o[i]) <= 1e-12);
    }
  }
  SUBCASE("random natural frames against pair enumeration") {
    std::mt19937_64 rng(4);
    const auto img = synth::natural_image(rng, 24, 21);
    const auto f = correlogram::extract(img, dist);
    const auto o = oracle::correlogram(img, dist);
    double worst = 0;
    for (int i = 0; i < correlogram::kDim; ++i) worst = std::max(worst, std::abs(f.values[i] - o[i]));
    CHECK(worst <= 1e-12);
  }
  SUBCASE("flip invariance is exact") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 3; ++t) {
      const auto img = synth::natural_image(rng, 61 + t, 47 + 2 * t);
      const auto f = correlogram::extract(img, dist);
      CHECK(f.values == correlogram::extract(img.flipped_horizontal(), dist).values);
      CHECK(f.values == correlogram::extract(img.flipped_vertical(), dist).values);
    }
  }
  SUBCASE("degenerate input") {
    CHECK_THROWS_AS(correlogram::extract(Image(3, 3, 1, 1, 1), dist), DegenerateInput);
    PreparedFrame blank;
    blank.pixels = Image(32, 32);
    blank.blank = true;
    CHECK_THROWS_AS(correlogram::extract(blank, dist), InvalidArgument);
  }
}

TEST_CASE("collection max") {
  std::vector<correlogram::CorrelogramFeature> fs(1);
  fs[0].values[5] = 0.3;
  fs[0].values[200] = 0.7;
  auto m = correlogram::collection_max(fs);
  CHECK(m.values == fs[0].values);
  CHECK(m.l2_norm == doctest::Approx(std::sqrt(0.58)));

  std::vector<correlogram::CorrelogramFeature> basis(2);
  basis[0].values[0] = 1;
  basis[1].values[1] = 1;
  m = correlogram::collection_max(basis);
  CHECK(m.values[0] == 1);
  CHECK(m.values[1] == 1);

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<correlogram::CorrelogramFeature> many(100);
  for (auto& f : many)
    for (auto& v : f.values) v = u(rng);
  m = correlogram::collection_max(many);
  for (int d = 0; d < correlogram::kDim; ++d) {
    double brute = 0;
    for (const auto& f : many) brute = std::max(brute, f.values[d]);
    CHECK(m.values[d] == brute);
  }
  const auto half = correlogram::merge(correlogram::collection_max(std::span(many).first(40)),
                                       correlogram::collection_max(std::span(many).subspan(40)));
  CHECK(half.values == m.values);
  CHECK_THROWS_AS(correlogram::collection_max(std::span<const correlogram::CorrelogramFeature>{}), InvalidArgument);
}

TEST_CASE("vmf round trip") {
  FeatureMatrix m(3, 4);
  for (std::size_t i = 0; i < m.values.size(); ++i) m.values[i] = 0.25f * i;
  const auto path = (fs::temp_directory_path() / "vmeme_test.vmf").string();
  write_vmf(path, m);
  const auto back = read_vmf(path);
  CHECK(back.rows == 3);
  CHECK(back.dim == 4);
  CHECK(back.values == m.values);
  CHECK_THROWS_AS(m.append(std::vector<float>(3)), InvalidArgument);
}

TEST_CASE("prepare_frame is idempotent on its own output") {
  std::mt19937_64 rng(21);
  const auto once = prepare_frame(synth::natural_image(rng, 160, 120));
  const auto twice = prepare_frame(once.pixels);
  CHECK(twice.pixels.width() == once.pixels.width());
  CHECK(twice.pixels.height() == once.pixels.height());
  CHECK_FALSE(twice.border_removed);
}

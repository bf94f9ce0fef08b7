#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace vmeme {

// Dense row-major float matrix; the in-memory form of a VMF1 file.
struct FeatureMatrix {
  std::uint32_t rows = 0;
  std::uint32_t dim = 0;
  std::vector<float> values;

  FeatureMatrix() = default;
  FeatureMatrix(std::uint32_t r, std::uint32_t d) : rows(r), dim(d), values(static_cast<std::size_t>(r) * d, 0.0f) {}

  std::span<float> row(std::size_t i) { return {values.data() + i * dim, dim}; }
  std::span<const float> row(std::size_t i) const { return {values.data() + i * dim, dim}; }

  void append(std::span<const float> r);
};

// VMF1 layout: "VMF1", u32 rows, u32 dim, rows*dim float32, all little-endian.
void write_vmf(const std::string& path, const FeatureMatrix& m);
FeatureMatrix read_vmf(const std::string& path);

// Squared and plain Euclidean distance, accumulated in double.
double squared_l2(std::span<const float> a, std::span<const float> b);
double l2_norm(std::span<const float> a);

}  // namespace vmeme

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ifcm {

/// Channel-major image with intensities in [0,1].
struct Raster {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;
  std::vector<float> data;

  [[nodiscard]] float at(std::size_t ch, std::size_t row, std::size_t col) const {
    return data[(ch * height + row) * width + col];
  }
  void validate() const;
  friend bool operator==(const Raster &, const Raster &) = default;
};

/// Per-pixel region labels in [0, count).
struct SuperpixelMap {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t count = 0;
  std::vector<std::int32_t> labels;

  [[nodiscard]] std::int32_t at(std::size_t row, std::size_t col) const { return labels[row * width + col]; }
  friend bool operator==(const SuperpixelMap &, const SuperpixelMap &) = default;
};

/// delta channel-major feature maps of height x width.
struct FeatureMaps {
  std::size_t delta = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<float> values;

  [[nodiscard]] float at(std::size_t ch, std::size_t row, std::size_t col) const {
    return values[(ch * height + row) * width + col];
  }
  void validate() const;
  friend bool operator==(const FeatureMaps &, const FeatureMaps &) = default;
};

struct SuperpixelFeature {
  std::int32_t label = 0;
  double centroid_row = 0.0;
  double centroid_col = 0.0;
  std::vector<double> vector;
};

/// Full coverage, labels in [0, count) each present, every label 4-connected.
[[nodiscard]] bool is_valid_superpixel_map(const SuperpixelMap &sp);

struct SlicOptions {
  double compactness = 10.0;
  std::size_t iterations = 10;
};

/// SLIC over the raw raster channels. The returned label count is whatever
/// the segmentation yields after connectivity enforcement, which can differ
/// slightly from p_target.
[[nodiscard]] SuperpixelMap slic_segment(const Raster &raster, std::size_t p_target, const SlicOptions &opts = {});

/// Per-channel bilinear resampling (pixel-center aligned).
[[nodiscard]] FeatureMaps rescale_maps(const FeatureMaps &maps, std::size_t target_h, std::size_t target_w);

/// Mean feature vector and centroid of every superpixel, ordered by label.
[[nodiscard]] std::vector<SuperpixelFeature> pool_superpixels(const FeatureMaps &maps, const SuperpixelMap &sp);

/// Superpixels whose mean centroid distance and mean feature distance to all
/// others are both strictly below the respective averages. Falls back to the
/// full input when fewer than two qualify. Input order is preserved.
[[nodiscard]] std::vector<SuperpixelFeature> select_informative(std::span<const SuperpixelFeature> features);

struct FeaturePack;

struct RegionOptions {
  std::size_t superpixels = 16;
  SlicOptions slic{};
};

/// Region pipeline for one pack: segment (or reuse stored labels), rescale the
/// feature maps to the segmentation grid, pool, and keep the informative
/// regions. Returns their feature vectors.
[[nodiscard]] std::vector<std::vector<double>> extract_regions(const FeaturePack &pack, const RegionOptions &opts);

}  // namespace ifcm

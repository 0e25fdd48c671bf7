#pragma once

// Synthetic data for tests: Gaussian blobs in feature space laid out as
// tiled "images", so ground truth is known by construction.

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "ifcm/model.hpp"
#include "ifcm/pack.hpp"
#include "ifcm/training.hpp"

namespace fixtures {

struct BlobSpec {
  std::size_t classes = 3;
  std::size_t parts_per_class = 1;
  std::size_t delta = 8;
  std::size_t packs_per_class = 60;
  std::size_t grid = 6;   // tiles per side; one superpixel per tile
  std::size_t border = 1; // background ring width in tiles (grids >= 4 only)
  std::size_t tile = 4;   // pixels per tile side
  double noise = 0.08;    // per-dimension std-dev around a part center
  std::uint64_t seed = 1;
  bool with_raster = true;
  bool with_labels = true;
};

struct BlobSet {
  std::vector<ifcm::ClassSpec> classes;
  std::vector<ifcm::FeaturePack> packs;
  /// centers[c][p] is the generating center of part p of class c.
  std::vector<std::vector<ifcm::Vector>> centers;
};

BlobSet make_blobs(const BlobSpec &spec);

/// Region sets straight from the generator (no segmentation step).
std::vector<ifcm::LabeledRegions> blob_regions(const BlobSpec &spec);

/// Split every class: the first `train_per_class` items train, the rest test.
template <typename T>
void split_per_class(const std::vector<T> &items, std::size_t classes, std::size_t train_per_class,
                     std::vector<T> &train, std::vector<T> &test) {
  const std::size_t per_class = items.size() / classes;
  for (std::size_t k = 0; k < items.size(); ++k) {
    (k % per_class < train_per_class ? train : test).push_back(items[k]);
  }
}

/// Writes packs as <dir>/<image_id>.ifp and the manifest as <dir>/classes.txt.
void write_blob_dir(const BlobSet &set, const std::filesystem::path &dir);

/// Random valid IFS built from triangular shapes; about half are composites.
ifcm::IntuitionisticFuzzySet random_ifs(std::mt19937_64 &rng);

/// Random IfValue with mu + gamma <= 1.
ifcm::IfValue random_ifvalue(std::mt19937_64 &rng);

/// Random weight matrix shaped like a trained model: m inputs, f outputs,
/// input->output and symmetric input<->input edges only.
ifcm::IfWeightMatrix random_model_weights(std::mt19937_64 &rng, std::size_t m, std::size_t f);

}  // namespace fixtures

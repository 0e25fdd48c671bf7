#include "fixtures.hpp"

#include <algorithm>
#include <string>

namespace fixtures {

namespace {

std::vector<std::vector<ifcm::Vector>> make_centers(const BlobSpec &spec, std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<ifcm::Vector>> centers(spec.classes);
  for (auto &cls : centers) {
    cls.resize(spec.parts_per_class);
    for (auto &c : cls) {
      c.resize(spec.delta);
      for (auto &x : c) x = u(rng);
    }
  }
  return centers;
}

// Tile features of one image. The central object block is split into
// vertical part bands; the surrounding ring is random background clutter,
// which informative-region selection is expected to discard.
std::vector<ifcm::Vector> tile_features(const BlobSpec &spec, const std::vector<ifcm::Vector> &parts,
                                        std::mt19937_64 &rng) {
  std::normal_distribution<double> n(0.0, spec.noise);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t ring = spec.grid >= 4 ? spec.border : 0;
  const std::size_t inner = spec.grid - 2 * ring;
  std::vector<ifcm::Vector> tiles;
  for (std::size_t r = 0; r < spec.grid; ++r) {
    for (std::size_t c = 0; c < spec.grid; ++c) {
      const std::size_t dim = parts.front().size();
      ifcm::Vector v(dim);
      const bool object = r >= ring && r < ring + inner && c >= ring && c < ring + inner;
      if (object) {
        const auto &center = parts[(c - ring) * parts.size() / inner];
        for (std::size_t d = 0; d < dim; ++d) v[d] = center[d] + n(rng);
      } else {
        for (std::size_t d = 0; d < dim; ++d) v[d] = u(rng);
      }
      tiles.push_back(std::move(v));
    }
  }
  return tiles;
}

}  // namespace

BlobSet make_blobs(const BlobSpec &spec) {
  std::mt19937_64 rng(spec.seed);
  BlobSet set;
  set.centers = make_centers(spec, rng);
  for (std::size_t c = 0; c < spec.classes; ++c) {
    set.classes.push_back({static_cast<std::int32_t>(c + 1), "class" + std::to_string(c + 1)});
  }
  const std::size_t side = spec.grid * spec.tile;
  for (std::size_t c = 0; c < spec.classes; ++c) {
    for (std::size_t k = 0; k < spec.packs_per_class; ++k) {
      const auto tiles = tile_features(spec, set.centers[c], rng);
      ifcm::FeaturePack p;
      p.image_id = "c" + std::to_string(c + 1) + "_" + std::to_string(k);
      p.class_id = static_cast<std::int32_t>(c + 1);
      p.height = side;
      p.width = side;
      p.channels = 3;
      p.features = {spec.delta, side, side, std::vector<float>(spec.delta * side * side)};
      ifcm::SuperpixelMap sp{side, side, spec.grid * spec.grid, std::vector<std::int32_t>(side * side)};
      ifcm::Raster raster{side, side, 3, std::vector<float>(3 * side * side)};
      for (std::size_t r = 0; r < side; ++r) {
        for (std::size_t col = 0; col < side; ++col) {
          const std::size_t t = (r / spec.tile) * spec.grid + col / spec.tile;
          sp.labels[r * side + col] = static_cast<std::int32_t>(t);
          for (std::size_t d = 0; d < spec.delta; ++d) {
            p.features.values[(d * side + r) * side + col] = static_cast<float>(tiles[t][d]);
          }
          for (std::size_t ch = 0; ch < 3; ++ch) {
            const double v = tiles[t][ch % spec.delta];
            raster.data[(ch * side + r) * side + col] = static_cast<float>(std::clamp(v, 0.0, 1.0));
          }
        }
      }
      if (spec.with_labels) p.labels = std::move(sp);
      if (spec.with_raster) p.raster = std::move(raster);
      set.packs.push_back(std::move(p));
    }
  }
  return set;
}

std::vector<ifcm::LabeledRegions> blob_regions(const BlobSpec &spec) {
  std::mt19937_64 rng(spec.seed);
  const auto centers = make_centers(spec, rng);
  std::vector<ifcm::LabeledRegions> out;
  for (std::size_t c = 0; c < spec.classes; ++c) {
    for (std::size_t k = 0; k < spec.packs_per_class; ++k) {
      out.push_back({"c" + std::to_string(c + 1) + "_" + std::to_string(k), static_cast<std::int32_t>(c + 1),
                     tile_features(spec, centers[c], rng)});
    }
  }
  return out;
}

void write_blob_dir(const BlobSet &set, const std::filesystem::path &dir) {
  std::filesystem::create_directories(dir);
  for (const auto &p : set.packs) ifcm::write_pack(dir / (p.image_id + ".ifp"), p);
  std::string manifest;
  for (const auto &c : set.classes) manifest += std::to_string(c.id) + "," + c.name + "\n";
  ifcm::write_file_atomic(dir / "classes.txt", manifest);
}

ifcm::IntuitionisticFuzzySet random_ifs(std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto tri = [&]() {
    double a = u(rng), b = u(rng), c = u(rng);
    if (a > b) std::swap(a, b);
    if (b > c) std::swap(b, c);
    if (a > b) std::swap(a, b);
    if (c - a < 1e-3) {
      a = std::max(0.0, a - 0.05);
      c = std::min(1.0, c + 0.05);
    }
    return ifcm::MembershipFunction::triangular(a, b, c);
  };
  auto simple = [&]() {
    const double h = u(rng);
    return ifcm::IntuitionisticFuzzySet{ifcm::FuzzyFunction::scaled(tri(), h),
                                        ifcm::FuzzyFunction::scaled(tri(), 1.0 - h), "r"};
  };
  if (u(rng) < 0.5) return simple();
  const std::vector<ifcm::IntuitionisticFuzzySet> parts{simple(), simple(), simple()};
  return ifcm::ifs_union(parts);
}

ifcm::IfValue random_ifvalue(std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double mu = u(rng);
  return ifcm::IfValue(mu, u(rng) * (1.0 - mu));
}

ifcm::IfWeightMatrix random_model_weights(std::mt19937_64 &rng, std::size_t m, std::size_t f) {
  ifcm::IfWeightMatrix w(m + f);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t o = 0; o < f; ++o) w.set(i, m + o, random_ifvalue(rng));
    for (std::size_t j = i + 1; j < m; ++j) {
      const auto v = random_ifvalue(rng);
      w.set(i, j, v);
      w.set(j, i, v);
    }
  }
  return w;
}

}  // namespace fixtures

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ifcm {

using Vector = std::vector<double>;

struct KMeansOptions {
  std::size_t max_iters = 100;
  /// Stop once no centroid moves more than tolerance * (1 + its norm).
  double tolerance = 1e-6;
  std::uint64_t seed = 0x1f2c3d4e5a6b7c8dULL;
};

struct KMeansResult {
  std::vector<Vector> centroids;
  std::vector<std::size_t> assignment;
  std::size_t iterations = 0;
};

/// Lloyd's algorithm with k-means++ seeding. Deterministic for a given seed.
[[nodiscard]] KMeansResult kmeans(std::span<const Vector> points, std::size_t k, const KMeansOptions &opts = {});

/// For every cluster, the index of the member point closest to its centroid.
[[nodiscard]] std::vector<std::size_t> snap_to_members(std::span<const Vector> points, const KMeansResult &result);

[[nodiscard]] double squared_distance(std::span<const double> a, std::span<const double> b);
[[nodiscard]] double euclidean_distance(std::span<const double> a, std::span<const double> b);

}  // namespace ifcm

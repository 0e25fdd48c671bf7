#include "ifcm/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "ifcm/error.hpp"

namespace ifcm {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_distance(a, b));
}

namespace {

std::size_t nearest(std::span<const Vector> centroids, std::span<const double> p, double *dist = nullptr) {
  std::size_t best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = squared_distance(centroids[c], p);
    if (d < bd) {
      bd = d;
      best = c;
    }
  }
  if (dist != nullptr) *dist = bd;
  return best;
}

// Uniform double in [0,1) from raw engine output; avoids distribution
// implementation differences between standard libraries.
double unit(std::mt19937_64 &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::vector<Vector> seed_plus_plus(std::span<const Vector> points, std::size_t k, std::mt19937_64 &rng) {
  const std::size_t n = points.size();
  std::vector<Vector> centers;
  centers.reserve(k);
  centers.push_back(points[static_cast<std::size_t>(unit(rng) * static_cast<double>(n))]);
  std::vector<double> d2(n);
  for (std::size_t p = 0; p < n; ++p) d2[p] = squared_distance(points[p], centers.front());
  while (centers.size() < k) {
    double total = 0.0;
    for (double d : d2) total += d;
    std::size_t pick = 0;
    if (total > 0.0) {
      double target = unit(rng) * total;
      pick = n - 1;
      for (std::size_t p = 0; p < n; ++p) {
        target -= d2[p];
        if (target < 0.0 && d2[p] > 0.0) {
          pick = p;
          break;
        }
      }
    } else {
      pick = static_cast<std::size_t>(unit(rng) * static_cast<double>(n));
    }
    centers.push_back(points[pick]);
    for (std::size_t p = 0; p < n; ++p) d2[p] = std::min(d2[p], squared_distance(points[p], centers.back()));
  }
  return centers;
}

}  // namespace

KMeansResult kmeans(std::span<const Vector> points, std::size_t k, const KMeansOptions &opts) {
  const std::size_t n = points.size();
  if (k < 1) throw InvalidValueError("kmeans: k must be >= 1");
  if (n < k) throw TrainingError("kmeans: " + std::to_string(n) + " points cannot form " + std::to_string(k) + " clusters");
  const std::size_t dim = points.front().size();
  for (const auto &p : points) {
    if (p.size() != dim) throw DimensionMismatchError("kmeans: points differ in dimension");
  }

  std::mt19937_64 rng(opts.seed);
  KMeansResult res;
  res.centroids = seed_plus_plus(points, k, rng);
  res.assignment.assign(n, 0);

  for (std::size_t iter = 0; iter < opts.max_iters; ++iter) {
    res.iterations = iter + 1;
    std::vector<double> dist(n);
    for (std::size_t p = 0; p < n; ++p) res.assignment[p] = nearest(res.centroids, points[p], &dist[p]);

    std::vector<Vector> sums(k, Vector(dim, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t p = 0; p < n; ++p) {
      auto &s = sums[res.assignment[p]];
      for (std::size_t d = 0; d < dim; ++d) s[d] += points[p][d];
      ++counts[res.assignment[p]];
    }
    // Empty clusters take the point farthest from its current centroid.
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      std::size_t far = n;
      for (std::size_t p = 0; p < n; ++p) {
        if (counts[res.assignment[p]] > 1 && (far == n || dist[p] > dist[far])) far = p;
      }
      if (far == n) continue;
      const std::size_t old = res.assignment[far];
      for (std::size_t d = 0; d < dim; ++d) sums[old][d] -= points[far][d];
      --counts[old];
      res.assignment[far] = c;
      sums[c] = points[far];
      counts[c] = 1;
      dist[far] = 0.0;
    }

    double worst = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      Vector next(dim);
      for (std::size_t d = 0; d < dim; ++d) next[d] = sums[c][d] / static_cast<double>(counts[c]);
      const double shift = euclidean_distance(next, res.centroids[c]);
      const double norm = std::sqrt(squared_distance(next, Vector(dim, 0.0)));
      worst = std::max(worst, shift / (1.0 + norm));
      res.centroids[c] = std::move(next);
    }
    if (worst <= opts.tolerance) break;
  }
  for (std::size_t p = 0; p < n; ++p) res.assignment[p] = nearest(res.centroids, points[p]);
  return res;
}

std::vector<std::size_t> snap_to_members(std::span<const Vector> points, const KMeansResult &result) {
  const std::size_t k = result.centroids.size();
  std::vector<std::size_t> best(k, points.size());
  std::vector<double> bd(k, std::numeric_limits<double>::infinity());
  for (std::size_t p = 0; p < points.size(); ++p) {
    const std::size_t c = result.assignment[p];
    const double d = squared_distance(points[p], result.centroids[c]);
    if (d < bd[c]) {
      bd[c] = d;
      best[c] = p;
    }
  }
  // A cluster that lost all members to the final reassignment snaps to the
  // globally nearest point.
  for (std::size_t c = 0; c < k; ++c) {
    if (best[c] != points.size()) continue;
    for (std::size_t p = 0; p < points.size(); ++p) {
      const double d = squared_distance(points[p], result.centroids[c]);
      if (d < bd[c]) {
        bd[c] = d;
        best[c] = p;
      }
    }
  }
  return best;
}

}  // namespace ifcm

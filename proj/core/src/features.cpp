#include "ifcm/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "ifcm/error.hpp"
#include "ifcm/pack.hpp"

namespace ifcm {

void Raster::validate() const {
  if (height < 1 || width < 1 || channels < 1) throw DimensionMismatchError("raster dimensions must be >= 1");
  if (data.size() != height * width * channels) throw DimensionMismatchError("raster data length mismatch");
}

void FeatureMaps::validate() const {
  if (delta < 1 || height < 1 || width < 1) throw DimensionMismatchError("feature map dimensions must be >= 1");
  if (values.size() != delta * height * width) throw DimensionMismatchError("feature map data length mismatch");
  for (float v : values) {
    if (!std::isfinite(v)) throw InvalidValueError("feature maps contain non-finite values");
  }
}

namespace {

// Connected components of equal labels, 4-connectivity.
struct Components {
  std::vector<std::int32_t> id;
  std::vector<std::size_t> size;
};

Components label_components(const std::vector<std::int32_t> &labels, std::size_t h, std::size_t w) {
  Components c;
  c.id.assign(labels.size(), -1);
  std::vector<std::size_t> queue;
  for (std::size_t start = 0; start < labels.size(); ++start) {
    if (c.id[start] >= 0) continue;
    const auto comp = static_cast<std::int32_t>(c.size.size());
    std::size_t count = 0;
    queue.clear();
    queue.push_back(start);
    c.id[start] = comp;
    while (!queue.empty()) {
      const std::size_t p = queue.back();
      queue.pop_back();
      ++count;
      const std::size_t r = p / w;
      const std::size_t col = p % w;
      auto visit = [&](std::size_t q) {
        if (c.id[q] < 0 && labels[q] == labels[p]) {
          c.id[q] = comp;
          queue.push_back(q);
        }
      };
      if (r > 0) visit(p - w);
      if (r + 1 < h) visit(p + w);
      if (col > 0) visit(p - 1);
      if (col + 1 < w) visit(p + 1);
    }
    c.size.push_back(count);
  }
  return c;
}

std::size_t find_root(std::vector<std::size_t> &parent, std::size_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

// Merges components smaller than min_size into their largest neighbour and
// relabels the result to [0, count) in raster order.
std::size_t enforce_connectivity(std::vector<std::int32_t> &labels, std::size_t h, std::size_t w,
                                 std::size_t min_size) {
  Components comps = label_components(labels, h, w);
  const std::size_t n = comps.size.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<std::size_t> size = comps.size;

  bool changed = true;
  while (changed) {
    changed = false;
    // Adjacency between current merged groups.
    std::vector<std::vector<std::size_t>> neighbours(n);
    for (std::size_t p = 0; p < labels.size(); ++p) {
      const std::size_t a = find_root(parent, static_cast<std::size_t>(comps.id[p]));
      const std::size_t r = p / w;
      const std::size_t col = p % w;
      auto link = [&](std::size_t q) {
        const std::size_t b = find_root(parent, static_cast<std::size_t>(comps.id[q]));
        if (a != b) {
          neighbours[a].push_back(b);
          neighbours[b].push_back(a);
        }
      };
      if (r + 1 < h) link(p + w);
      if (col + 1 < w) link(p + 1);
    }
    // Smallest fragments first so they are absorbed before being used as targets.
    std::vector<std::size_t> roots;
    for (std::size_t k = 0; k < n; ++k) {
      if (find_root(parent, k) == k && size[k] < min_size) roots.push_back(k);
    }
    std::stable_sort(roots.begin(), roots.end(), [&](std::size_t a, std::size_t b) { return size[a] < size[b]; });
    for (std::size_t k : roots) {
      const std::size_t root = find_root(parent, k);
      if (root != k || size[k] >= min_size) continue;
      std::size_t best = n;
      for (std::size_t nb : neighbours[k]) {
        const std::size_t r = find_root(parent, nb);
        if (r == k) continue;
        if (best == n || size[r] > size[best] || (size[r] == size[best] && r < best)) best = r;
      }
      if (best == n) continue;
      parent[k] = best;
      size[best] += size[k];
      changed = true;
    }
  }

  std::vector<std::int32_t> relabel(n, -1);
  std::int32_t next = 0;
  for (std::size_t p = 0; p < labels.size(); ++p) {
    const std::size_t root = find_root(parent, static_cast<std::size_t>(comps.id[p]));
    if (relabel[root] < 0) relabel[root] = next++;
    labels[p] = relabel[root];
  }
  return static_cast<std::size_t>(next);
}

}  // namespace

bool is_valid_superpixel_map(const SuperpixelMap &sp) {
  if (sp.height < 1 || sp.width < 1 || sp.labels.size() != sp.height * sp.width || sp.count < 1) return false;
  std::vector<std::size_t> seen(sp.count, 0);
  for (auto l : sp.labels) {
    if (l < 0 || static_cast<std::size_t>(l) >= sp.count) return false;
    ++seen[static_cast<std::size_t>(l)];
  }
  if (std::any_of(seen.begin(), seen.end(), [](std::size_t s) { return s == 0; })) return false;
  // Each label must form exactly one component.
  const Components comps = label_components(sp.labels, sp.height, sp.width);
  return comps.size.size() == sp.count;
}

SuperpixelMap slic_segment(const Raster &raster, std::size_t p_target, const SlicOptions &opts) {
  raster.validate();
  const std::size_t h = raster.height;
  const std::size_t w = raster.width;
  const std::size_t nc = raster.channels;
  const std::size_t npix = h * w;
  if (p_target < 1 || p_target > npix) {
    throw InvalidValueError("slic: target superpixel count must lie in [1, " + std::to_string(npix) + "]");
  }
  if (!(opts.compactness > 0.0)) throw InvalidValueError("slic: compactness must be > 0");

  const double step = std::sqrt(static_cast<double>(npix) / static_cast<double>(p_target));
  const auto nx = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(p_target * w) / static_cast<double>(h)) - 1e-9)),
      1, w);
  const auto ny = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::lround(static_cast<double>(p_target) / static_cast<double>(nx))), 1, h);

  auto color = [&](std::size_t ch, std::size_t p) { return static_cast<double>(raster.data[ch * npix + p]); };
  auto gradient = [&](std::size_t r, std::size_t c) {
    if (r == 0 || c == 0 || r + 1 >= h || c + 1 >= w) return std::numeric_limits<double>::infinity();
    double g = 0.0;
    for (std::size_t ch = 0; ch < nc; ++ch) {
      const double dx = color(ch, r * w + c + 1) - color(ch, r * w + c - 1);
      const double dy = color(ch, (r + 1) * w + c) - color(ch, (r - 1) * w + c);
      g += dx * dx + dy * dy;
    }
    return g;
  };

  // Center layout: [row, col, channels...]
  const std::size_t dim = 2 + nc;
  std::vector<double> centers;
  for (std::size_t iy = 0; iy < ny; ++iy) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      auto r = static_cast<std::size_t>((static_cast<double>(iy) + 0.5) * static_cast<double>(h) /
                                        static_cast<double>(ny));
      auto c = static_cast<std::size_t>((static_cast<double>(ix) + 0.5) * static_cast<double>(w) /
                                        static_cast<double>(nx));
      // Move the seed to the lowest-gradient pixel of its 3x3 neighbourhood.
      double best = gradient(r, c);
      std::size_t br = r;
      std::size_t bc = c;
      for (std::size_t rr = r > 0 ? r - 1 : 0; rr <= std::min(r + 1, h - 1); ++rr) {
        for (std::size_t cc = c > 0 ? c - 1 : 0; cc <= std::min(c + 1, w - 1); ++cc) {
          const double g = gradient(rr, cc);
          if (g < best) {
            best = g;
            br = rr;
            bc = cc;
          }
        }
      }
      centers.push_back(static_cast<double>(br) + 0.5);
      centers.push_back(static_cast<double>(bc) + 0.5);
      for (std::size_t ch = 0; ch < nc; ++ch) centers.push_back(color(ch, br * w + bc));
    }
  }
  const std::size_t k = centers.size() / dim;
  const double spatial_weight = (opts.compactness / step) * (opts.compactness / step);

  auto distance2 = [&](std::size_t center, std::size_t p) {
    const double* cc = &centers[center * dim];
    const double dr = static_cast<double>(p / w) + 0.5 - cc[0];
    const double dc = static_cast<double>(p % w) + 0.5 - cc[1];
    double color_d = 0.0;
    for (std::size_t ch = 0; ch < nc; ++ch) {
      const double d = color(ch, p) - cc[2 + ch];
      color_d += d * d;
    }
    return color_d + spatial_weight * (dr * dr + dc * dc);
  };

  std::vector<std::int32_t> labels(npix, -1);
  std::vector<double> best(npix);
  const auto window = static_cast<std::ptrdiff_t>(std::ceil(step));
  for (std::size_t iter = 0; iter < opts.iterations; ++iter) {
    std::fill(labels.begin(), labels.end(), -1);
    std::fill(best.begin(), best.end(), std::numeric_limits<double>::infinity());
    for (std::size_t ci = 0; ci < k; ++ci) {
      const auto cr = static_cast<std::ptrdiff_t>(centers[ci * dim]);
      const auto cc = static_cast<std::ptrdiff_t>(centers[ci * dim + 1]);
      const auto r0 = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, cr - window));
      const auto r1 = static_cast<std::size_t>(std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(h) - 1, cr + window));
      const auto c0 = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, cc - window));
      const auto c1 = static_cast<std::size_t>(std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(w) - 1, cc + window));
      for (std::size_t r = r0; r <= r1; ++r) {
        for (std::size_t c = c0; c <= c1; ++c) {
          const std::size_t p = r * w + c;
          const double d = distance2(ci, p);
          if (d < best[p]) {
            best[p] = d;
            labels[p] = static_cast<std::int32_t>(ci);
          }
        }
      }
    }
    // Pixels outside every search window go to the nearest center overall.
    for (std::size_t p = 0; p < npix; ++p) {
      if (labels[p] >= 0) continue;
      for (std::size_t ci = 0; ci < k; ++ci) {
        const double d = distance2(ci, p);
        if (d < best[p]) {
          best[p] = d;
          labels[p] = static_cast<std::int32_t>(ci);
        }
      }
    }
    std::vector<double> sums(k * dim, 0.0);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t p = 0; p < npix; ++p) {
      const auto ci = static_cast<std::size_t>(labels[p]);
      double* s = &sums[ci * dim];
      s[0] += static_cast<double>(p / w) + 0.5;
      s[1] += static_cast<double>(p % w) + 0.5;
      for (std::size_t ch = 0; ch < nc; ++ch) s[2 + ch] += color(ch, p);
      ++counts[ci];
    }
    for (std::size_t ci = 0; ci < k; ++ci) {
      if (counts[ci] == 0) continue;
      for (std::size_t d = 0; d < dim; ++d) centers[ci * dim + d] = sums[ci * dim + d] / static_cast<double>(counts[ci]);
    }
  }
  if (opts.iterations == 0) {
    for (std::size_t p = 0; p < npix; ++p) {
      double bd = std::numeric_limits<double>::infinity();
      for (std::size_t ci = 0; ci < k; ++ci) {
        const double d = distance2(ci, p);
        if (d < bd) {
          bd = d;
          labels[p] = static_cast<std::int32_t>(ci);
        }
      }
    }
  }

  const std::size_t min_size = std::max<std::size_t>(1, npix / p_target / 4);
  SuperpixelMap out;
  out.height = h;
  out.width = w;
  out.count = enforce_connectivity(labels, h, w, min_size);
  out.labels = std::move(labels);
  return out;
}

FeatureMaps rescale_maps(const FeatureMaps &maps, std::size_t target_h, std::size_t target_w) {
  maps.validate();
  if (target_h < 1 || target_w < 1) throw InvalidValueError("rescale target must be >= 1x1");
  if (target_h == maps.height && target_w == maps.width) return maps;
  FeatureMaps out;
  out.delta = maps.delta;
  out.height = target_h;
  out.width = target_w;
  out.values.resize(maps.delta * target_h * target_w);

  auto source_coord = [](std::size_t dst, std::size_t in, std::size_t outn, std::size_t &i0, std::size_t &i1,
                         double &frac) {
    double s = (static_cast<double>(dst) + 0.5) * static_cast<double>(in) / static_cast<double>(outn) - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(in - 1));
    i0 = static_cast<std::size_t>(std::floor(s));
    i1 = std::min(i0 + 1, in - 1);
    frac = s - static_cast<double>(i0);
  };

  for (std::size_t r = 0; r < target_h; ++r) {
    std::size_t y0, y1;
    double fy;
    source_coord(r, maps.height, target_h, y0, y1, fy);
    for (std::size_t c = 0; c < target_w; ++c) {
      std::size_t x0, x1;
      double fx;
      source_coord(c, maps.width, target_w, x0, x1, fx);
      for (std::size_t ch = 0; ch < maps.delta; ++ch) {
        const double v = (1.0 - fy) * ((1.0 - fx) * maps.at(ch, y0, x0) + fx * maps.at(ch, y0, x1)) +
                         fy * ((1.0 - fx) * maps.at(ch, y1, x0) + fx * maps.at(ch, y1, x1));
        out.values[(ch * target_h + r) * target_w + c] = static_cast<float>(v);
      }
    }
  }
  return out;
}

std::vector<SuperpixelFeature> pool_superpixels(const FeatureMaps &maps, const SuperpixelMap &sp) {
  if (maps.height != sp.height || maps.width != sp.width) {
    throw DimensionMismatchError("feature maps and superpixel map differ in size");
  }
  if (sp.labels.size() != sp.height * sp.width) throw DimensionMismatchError("superpixel label length mismatch");
  const std::size_t npix = sp.height * sp.width;
  std::vector<SuperpixelFeature> out(sp.count);
  std::vector<std::size_t> counts(sp.count, 0);
  for (std::size_t l = 0; l < sp.count; ++l) {
    out[l].label = static_cast<std::int32_t>(l);
    out[l].vector.assign(maps.delta, 0.0);
  }
  for (std::size_t p = 0; p < npix; ++p) {
    const auto l = sp.labels[p];
    if (l < 0 || static_cast<std::size_t>(l) >= sp.count) throw InvalidValueError("superpixel label out of range");
    auto &f = out[static_cast<std::size_t>(l)];
    ++counts[static_cast<std::size_t>(l)];
    f.centroid_row += static_cast<double>(p / sp.width);
    f.centroid_col += static_cast<double>(p % sp.width);
    for (std::size_t ch = 0; ch < maps.delta; ++ch) f.vector[ch] += maps.values[ch * npix + p];
  }
  std::vector<SuperpixelFeature> present;
  present.reserve(sp.count);
  for (std::size_t l = 0; l < sp.count; ++l) {
    if (counts[l] == 0) continue;
    const double n = static_cast<double>(counts[l]);
    auto &f = out[l];
    f.centroid_row /= n;
    f.centroid_col /= n;
    for (auto &v : f.vector) v /= n;
    present.push_back(std::move(f));
  }
  return present;
}

namespace {

double euclidean(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

std::vector<SuperpixelFeature> select_informative(std::span<const SuperpixelFeature> features) {
  const std::size_t n = features.size();
  std::vector<SuperpixelFeature> all(features.begin(), features.end());
  if (n <= 2) return all;
  std::vector<double> spatial(n, 0.0);
  std::vector<double> feature(n, 0.0);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) {
      const double ds = std::hypot(features[p].centroid_row - features[q].centroid_row,
                                   features[p].centroid_col - features[q].centroid_col);
      const double df = euclidean(features[p].vector, features[q].vector);
      spatial[p] += ds;
      spatial[q] += ds;
      feature[p] += df;
      feature[q] += df;
    }
  }
  // Comparing sums is equivalent to comparing means over n - 1 partners.
  const double spatial_grand = std::accumulate(spatial.begin(), spatial.end(), 0.0) / static_cast<double>(n);
  const double feature_grand = std::accumulate(feature.begin(), feature.end(), 0.0) / static_cast<double>(n);
  std::vector<SuperpixelFeature> selected;
  for (std::size_t p = 0; p < n; ++p) {
    if (spatial[p] < spatial_grand && feature[p] < feature_grand) selected.push_back(features[p]);
  }
  if (selected.size() < 2) return all;
  return selected;
}

std::vector<std::vector<double>> extract_regions(const FeaturePack &pack, const RegionOptions &opts) {
  SuperpixelMap sp;
  if (pack.labels) {
    sp = *pack.labels;
  } else if (pack.raster) {
    const std::size_t npix = pack.raster->height * pack.raster->width;
    sp = slic_segment(*pack.raster, std::clamp<std::size_t>(opts.superpixels, 1, npix), opts.slic);
  } else {
    throw DimensionMismatchError("pack '" + pack.image_id + "' carries neither a raster nor superpixel labels");
  }
  const FeatureMaps maps = rescale_maps(pack.features, sp.height, sp.width);
  const auto pooled = pool_superpixels(maps, sp);
  const auto chosen = select_informative(pooled);
  std::vector<std::vector<double>> out;
  out.reserve(chosen.size());
  for (const auto &f : chosen) out.push_back(f.vector);
  return out;
}

}  // namespace ifcm

#pragma once
// SLIC-style superpixel segmentation: grid-seeded k-means in combined
// CIELAB + position space with a fixed iteration count, followed by
// connectivity enforcement. Deterministic for a given input.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "driva/image.hpp"

namespace driva {

struct Segment {
  std::vector<std::int32_t> pixels;  // linear indices, v * width + u
  double centroid_u = 0, centroid_v = 0;
  int area = 0;
};

struct SuperpixelMap {
  LabelImage labels;                        // dense ids 0..count()-1
  std::vector<Segment> segments;
  std::vector<std::vector<int>> adjacency;  // sorted, symmetric, irreflexive
  int count() const { return static_cast<int>(segments.size()); }
};

namespace detail {

// sRGB in [0,255] -> CIELAB (D65), double precision.
inline std::array<double, 3> rgb_to_lab(Rgb c) {
  auto lin = [](double s) {
    s /= 255.0;
    return s <= 0.04045 ? s / 12.92 : std::pow((s + 0.055) / 1.055, 2.4);
  };
  const double r = lin(c.r), g = lin(c.g), b = lin(c.b);
  const double x = (0.4124564 * r + 0.3575761 * g + 0.1804375 * b) / 0.95047;
  const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
  const double z = (0.0193339 * r + 0.1191920 * g + 0.9503041 * b) / 1.08883;
  auto f = [](double t) {
    return t > 0.008856 ? std::cbrt(t) : 7.787 * t + 16.0 / 116.0;
  };
  const double fx = f(x), fy = f(y), fz = f(z);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

}  // namespace detail

inline SuperpixelMap segment_superpixels(const RgbImage& image, int k,
                                         double compactness,
                                         int iterations = 10) {
  if (image.empty()) throw std::invalid_argument("segment_superpixels: empty image");
  if (k < 1) throw std::invalid_argument("segment_superpixels: k must be >= 1");
  const int w = image.width(), h = image.height();
  const std::int64_t n = static_cast<std::int64_t>(w) * h;
  if (k > n)
    throw std::invalid_argument("segment_superpixels: k exceeds pixel count");

  std::vector<double> lab_l(n), lab_a(n), lab_b(n);
  for (std::int64_t i = 0; i < n; ++i) {
    const auto lab = detail::rgb_to_lab(image[static_cast<std::size_t>(i)]);
    lab_l[i] = lab[0];
    lab_a[i] = lab[1];
    lab_b[i] = lab[2];
  }

  const double step = std::sqrt(static_cast<double>(n) / k);
  struct Cluster {
    double l, a, b, u, v;
  };
  const int nx = std::max(1, static_cast<int>(std::lround(w / step)));
  const int ny = std::max(1, static_cast<int>(std::lround(h / step)));
  std::vector<Cluster> clusters;
  clusters.reserve(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double cu = (i + 0.5) * w / nx;
      const double cv = (j + 0.5) * h / ny;
      const int pu = std::min(w - 1, static_cast<int>(cu));
      const int pv = std::min(h - 1, static_cast<int>(cv));
      const std::size_t pi = image.index(pu, pv);
      clusters.push_back({lab_l[pi], lab_a[pi], lab_b[pi], cu, cv});
    }

  std::vector<std::int32_t> label(n, -1);
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  const double spatial_weight = compactness * compactness / (step * step);

  for (int iter = 0; iter < iterations; ++iter) {
    std::fill(best.begin(), best.end(),
              std::numeric_limits<double>::infinity());
    for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
      const Cluster& c = clusters[ci];
      const int u0 = std::max(0, static_cast<int>(std::floor(c.u - step)));
      const int u1 = std::min(w - 1, static_cast<int>(std::ceil(c.u + step)));
      const int v0 = std::max(0, static_cast<int>(std::floor(c.v - step)));
      const int v1 = std::min(h - 1, static_cast<int>(std::ceil(c.v + step)));
      for (int v = v0; v <= v1; ++v) {
        std::size_t i = image.index(u0, v);
        for (int u = u0; u <= u1; ++u, ++i) {
          const double dl = lab_l[i] - c.l;
          const double da = lab_a[i] - c.a;
          const double db = lab_b[i] - c.b;
          const double du = u - c.u;
          const double dv = v - c.v;
          const double d = dl * dl + da * da + db * db +
                           (du * du + dv * dv) * spatial_weight;
          if (d < best[i]) {
            best[i] = d;
            label[i] = static_cast<std::int32_t>(ci);
          }
        }
      }
    }

    std::vector<double> sum_l(clusters.size(), 0), sum_a(clusters.size(), 0),
        sum_b(clusters.size(), 0), sum_u(clusters.size(), 0),
        sum_v(clusters.size(), 0);
    std::vector<std::int64_t> cnt(clusters.size(), 0);
    std::size_t i = 0;
    for (int v = 0; v < h; ++v)
      for (int u = 0; u < w; ++u, ++i) {
        const std::int32_t li = label[i];
        if (li < 0) continue;
        sum_l[li] += lab_l[i];
        sum_a[li] += lab_a[i];
        sum_b[li] += lab_b[i];
        sum_u[li] += u;
        sum_v[li] += v;
        ++cnt[li];
      }
    for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
      if (cnt[ci] == 0) continue;
      const double inv = 1.0 / cnt[ci];
      clusters[ci] = {sum_l[ci] * inv, sum_a[ci] * inv, sum_b[ci] * inv,
                      sum_u[ci] * inv, sum_v[ci] * inv};
    }
  }

  // Pixels can escape every search window once centers drift; snap them to
  // the spatially nearest cluster so the label map is total.
  for (std::int64_t i = 0; i < n; ++i) {
    if (label[i] >= 0) continue;
    const int u = static_cast<int>(i % w), v = static_cast<int>(i / w);
    double bestd = std::numeric_limits<double>::infinity();
    for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
      const double du = u - clusters[ci].u, dv = v - clusters[ci].v;
      const double d = du * du + dv * dv;
      if (d < bestd) {
        bestd = d;
        label[i] = static_cast<std::int32_t>(ci);
      }
    }
  }

  // Connectivity enforcement: flood 4-connected components of the raw label
  // map in raster order; components below the size floor merge into the
  // neighboring component discovered first. Produces dense final labels.
  SuperpixelMap map;
  map.labels = LabelImage(w, h, -1);
  auto& out = map.labels.data();
  const std::int64_t min_size =
      std::max<std::int64_t>(1, n / (static_cast<std::int64_t>(clusters.size()) * 4));
  std::vector<std::int32_t> stack;
  std::vector<std::int32_t> component;
  std::int32_t next_label = 0;
  const int du4[4] = {1, -1, 0, 0};
  const int dv4[4] = {0, 0, 1, -1};
  for (std::int64_t start = 0; start < n; ++start) {
    if (out[start] >= 0) continue;
    const std::int32_t raw = label[start];
    std::int32_t adjacent = -1;
    component.clear();
    stack.assign(1, static_cast<std::int32_t>(start));
    out[start] = -2;  // visiting marker
    while (!stack.empty()) {
      const std::int32_t i = stack.back();
      stack.pop_back();
      component.push_back(i);
      const int u = i % w, v = static_cast<int>(i / w);
      for (int d = 0; d < 4; ++d) {
        const int uu = u + du4[d], vv = v + dv4[d];
        if (uu < 0 || uu >= w || vv < 0 || vv >= h) continue;
        const std::int32_t j = static_cast<std::int32_t>(map.labels.index(uu, vv));
        if (out[j] >= 0) {
          adjacent = out[j];
        } else if (out[j] == -1 && label[j] == raw) {
          out[j] = -2;
          stack.push_back(j);
        }
      }
    }
    const std::int32_t assigned =
        (static_cast<std::int64_t>(component.size()) < min_size && adjacent >= 0)
            ? adjacent
            : next_label++;
    for (const std::int32_t i : component) out[i] = assigned;
  }

  map.segments.resize(next_label);
  for (std::int64_t i = 0; i < n; ++i) {
    Segment& s = map.segments[out[i]];
    s.pixels.push_back(static_cast<std::int32_t>(i));
    s.centroid_u += static_cast<double>(i % w);
    s.centroid_v += static_cast<double>(i / w);
    ++s.area;
  }
  for (Segment& s : map.segments) {
    s.centroid_u /= s.area;
    s.centroid_v /= s.area;
  }

  std::vector<std::vector<int>> adjacency(next_label);
  auto add_edge = [&adjacency](std::int32_t a, std::int32_t b) {
    if (a == b) return;
    adjacency[a].push_back(b);
    adjacency[b].push_back(a);
  };
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) {
      const std::int32_t a = map.labels.at(u, v);
      if (u + 1 < w) add_edge(a, map.labels.at(u + 1, v));
      if (v + 1 < h) add_edge(a, map.labels.at(u, v + 1));
    }
  for (auto& nb : adjacency) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  map.adjacency = std::move(adjacency);
  return map;
}

}  // namespace driva

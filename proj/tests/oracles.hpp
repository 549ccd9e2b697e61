#pragma once

// Brute-force reference computations used as independent oracles by the tests.
// Nothing here calls into the library's algorithms.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "comal/image.hpp"

namespace oracle {

using comal::BinaryMask;
using comal::GrayImage;
using comal::PixelCoord;

inline Eigen::ArrayXXd brute_distance(const BinaryMask& mask) {
  Eigen::ArrayXXd out(mask.rows(), mask.cols());
  for (int y = 0; y < mask.rows(); ++y)
    for (int x = 0; x < mask.cols(); ++x) {
      double best = std::numeric_limits<double>::infinity();
      for (int v = 0; v < mask.rows(); ++v)
        for (int u = 0; u < mask.cols(); ++u)
          if (mask(v, u)) best = std::min(best, std::hypot(double(u - x), double(v - y)));
      out(y, x) = best;
    }
  return out;
}

/// Components of {I <= t} (4-connected) by flood fill; label -1 outside the set.
inline std::vector<int> flood_labels(const GrayImage& img, int t, int* count = nullptr) {
  const int w = static_cast<int>(img.cols()), h = static_cast<int>(img.rows());
  std::vector<int> label(w * h, -1);
  int next = 0;
  std::vector<int> stack;
  for (int s = 0; s < w * h; ++s) {
    if (label[s] >= 0 || img.data()[s] > t) continue;
    label[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const int p = stack.back();
      stack.pop_back();
      const int x = p % w, y = p / w;
      const int nb[4][2] = {{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}};
      for (auto& q : nb) {
        if (q[0] < 0 || q[1] < 0 || q[0] >= w || q[1] >= h) continue;
        const int qi = q[1] * w + q[0];
        if (label[qi] >= 0 || img.data()[qi] > t) continue;
        label[qi] = next;
        stack.push_back(qi);
      }
    }
    ++next;
  }
  if (count) *count = next;
  return label;
}

/// Pixel set (sorted raster indices) of the component of {I <= t} containing seed.
inline std::vector<int> component_at(const GrayImage& img, int t, int seed) {
  const auto label = flood_labels(img, t);
  std::vector<int> out;
  if (label[seed] < 0) return out;
  for (int i = 0; i < static_cast<int>(label.size()); ++i)
    if (label[i] == label[seed]) out.push_back(i);
  return out;
}

/// q for the component containing `seed` alive at `level`, minimised over its
/// lifetime, from per-threshold flood fills.
inline double brute_stability(const GrayImage& img, int seed, int level, int delta) {
  const auto self = component_at(img, level, seed);
  const double area = static_cast<double>(self.size());
  // Lifetime end: last t whose component equals self.
  int end = level;
  while (end < 255 && component_at(img, end + 1, seed).size() == self.size()) ++end;
  // Birth: first t whose component equals self.
  int birth = level;
  while (birth > 0 && component_at(img, birth - 1, seed).size() == self.size()) --birth;
  std::vector<char> member(img.size(), 0);
  for (int p : self) member[p] = 1;
  double best = std::numeric_limits<double>::infinity();
  for (int l = birth; l <= end; ++l) {
    const int hi = std::min(l + delta, 255), lo = std::max(l - delta, 0);
    const double up = static_cast<double>(component_at(img, hi, seed).size());
    int count = 0;
    const auto label = flood_labels(img, lo, &count);
    std::vector<int> sizes(count, 0);
    std::vector<char> inside(count, 1);
    for (int i = 0; i < static_cast<int>(label.size()); ++i) {
      if (label[i] < 0) continue;
      ++sizes[label[i]];
      if (!member[i]) inside[label[i]] = 0;
    }
    int low = 0;
    for (int c = 0; c < count; ++c)
      if (inside[c]) low = std::max(low, sizes[c]);
    best = std::min(best, (up - low) / area);
  }
  return best;
}

/// Smaller eigenvalue of the centred scatter (1/N) of a point set, closed form.
inline double scatter_lambda_min(const std::vector<PixelCoord>& pts) {
  double mx = 0, my = 0;
  for (auto p : pts) {
    mx += p.x;
    my += p.y;
  }
  mx /= pts.size();
  my /= pts.size();
  double sxx = 0, syy = 0, sxy = 0;
  for (auto p : pts) {
    sxx += (p.x - mx) * (p.x - mx);
    syy += (p.y - my) * (p.y - my);
    sxy += (p.x - mx) * (p.y - my);
  }
  sxx /= pts.size();
  syy /= pts.size();
  sxy /= pts.size();
  const double tr = sxx + syy, det = sxx * syy - sxy * sxy;
  return tr / 2 - std::sqrt(std::max(0.0, tr * tr / 4 - det));
}

/// Chamfer score straight from the edge list: mean over template points of
/// the distance to the nearest edge; points off the w x h field score the
/// largest in-field distance.
inline double brute_chamfer(const std::vector<PixelCoord>& tmpl, const std::vector<PixelCoord>& edges, int w, int h,
                            PixelCoord offset) {
  auto nearest = [&](int x, int y) {
    long best = std::numeric_limits<long>::max();
    for (auto e : edges) best = std::min(best, long(e.x - x) * (e.x - x) + long(e.y - y) * (e.y - y));
    return std::sqrt(static_cast<double>(best));
  };
  double penalty = -1.0;
  double sum = 0.0;
  for (auto p : tmpl) {
    const int x = p.x + offset.x, y = p.y + offset.y;
    if (x >= 0 && y >= 0 && x < w && y < h) {
      sum += nearest(x, y);
    } else {
      if (penalty < 0)
        for (int v = 0; v < h; ++v)
          for (int u = 0; u < w; ++u) penalty = std::max(penalty, nearest(u, v));
      sum += penalty;
    }
  }
  return sum / static_cast<double>(tmpl.size());
}

inline GrayImage random_image(std::mt19937_64& rng, int w, int h, int levels = 256) {
  GrayImage img(h, w);
  for (int i = 0; i < img.size(); ++i) img.data()[i] = static_cast<std::uint8_t>((rng() % levels) * (256 / levels));
  return img;
}

}  // namespace oracle

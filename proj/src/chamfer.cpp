#include "comal/chamfer.hpp"

#include <algorithm>
#include <cmath>

namespace comal {
namespace {

double score_with_penalty(std::span<const PixelCoord> tmpl, const DistanceField& field, PixelCoord offset,
                          double penalty) {
  const int w = static_cast<int>(field.cols()), h = static_cast<int>(field.rows());
  double sum = 0.0;
  for (auto p : tmpl) {
    const int x = p.x + offset.x, y = p.y + offset.y;
    sum += (x >= 0 && y >= 0 && x < w && y < h) ? field(y, x) : penalty;
  }
  return sum / static_cast<double>(tmpl.size());
}

// Window-minimum lookup at level k (window side s) for window origin (x, y).
double window_min(const EdgePyramid& pyr, int k, int x, int y) {
  const DistanceField& f = pyr.levels[k];
  const int s = 1 << k;
  const int c = x + s - 1, r = y + s - 1;
  if (c < 0 || r < 0 || c >= f.cols() || r >= f.rows()) return pyr.max_distance;
  return f(r, c);
}

}  // namespace

int pyramid_levels_for(int width, int height) {
  const int m = std::min(width, height);
  if (m < 16) return 1;
  return static_cast<int>(std::floor(std::log2(m / 8.0))) + 1;
}

EdgePyramid build_edge_pyramid(std::span<const PixelCoord> edges, int width, int height, int num_levels) {
  if (edges.empty()) throw Error(Errc::EmptyEdges, "edge pyramid needs at least one edge point");
  if (num_levels < 1) throw Error(Errc::BadParams, "pyramid needs at least one level");
  const int scale = 1 << (num_levels - 1);
  if (num_levels > 1 && ((width + scale - 1) / scale < 8 || (height + scale - 1) / scale < 8)) {
    throw Error(Errc::TooManyLevels, "coarsest offset grid would be smaller than 8x8");
  }
  BinaryMask mask = BinaryMask::Zero(height, width);
  for (auto p : edges) {
    if (p.x < 0 || p.y < 0 || p.x >= width || p.y >= height) {
      throw Error(Errc::OutOfBounds, "edge point outside the pyramid extent");
    }
    mask(p.y, p.x) = true;
  }
  EdgePyramid pyr;
  pyr.levels.reserve(num_levels);
  pyr.levels.push_back(distance_transform(mask));
  pyr.max_distance = pyr.levels[0].maxCoeff();
  for (int k = 1; k < num_levels; ++k) {
    const int s = 1 << k, h = s / 2;
    DistanceField m(height + s - 1, width + s - 1);
    for (int y = -s + 1; y < height; ++y)
      for (int x = -s + 1; x < width; ++x) {
        m(y + s - 1, x + s - 1) = std::min(std::min(window_min(pyr, k - 1, x, y), window_min(pyr, k - 1, x + h, y)),
                                           std::min(window_min(pyr, k - 1, x, y + h),
                                                    window_min(pyr, k - 1, x + h, y + h)));
      }
    pyr.levels.push_back(std::move(m));
  }
  return pyr;
}

double chamfer_score(std::span<const PixelCoord> tmpl, const DistanceField& field, PixelCoord offset) {
  if (tmpl.empty()) throw Error(Errc::EmptyTemplate, "chamfer template has no points");
  return score_with_penalty(tmpl, field, offset, field.maxCoeff());
}

double block_lower_bound(std::span<const PixelCoord> tmpl, const EdgePyramid& pyramid, int k, PixelCoord o) {
  if (tmpl.empty()) throw Error(Errc::EmptyTemplate, "chamfer template has no points");
  if (k == 0) return score_with_penalty(tmpl, pyramid.levels[0], o, pyramid.max_distance);
  double sum = 0.0;
  for (auto p : tmpl) sum += window_min(pyramid, k, p.x + o.x, p.y + o.y);
  return sum / static_cast<double>(tmpl.size());
}

std::vector<ChamferMatch> hierarchical_match(std::span<const PixelCoord> tmpl, const EdgePyramid& pyramid,
                                             const Rect& offsets, double accept_threshold) {
  if (tmpl.empty()) throw Error(Errc::EmptyTemplate, "chamfer template has no points");
  std::vector<ChamferMatch> out;
  if (offsets.empty()) return out;

  const int top = pyramid.num_levels() - 1;
  std::vector<PixelCoord> live;
  for (int y = offsets.y0; y < offsets.y_end(); y += 1 << top)
    for (int x = offsets.x0; x < offsets.x_end(); x += 1 << top) live.push_back({x, y});

  std::vector<PixelCoord> next;
  for (int k = top; k >= 1; --k) {
    const int h = 1 << (k - 1);
    next.clear();
    for (auto o : live) {
      if (block_lower_bound(tmpl, pyramid, k, o) > accept_threshold) continue;
      for (int j = 0; j < 2; ++j)
        for (int i = 0; i < 2; ++i) {
          const PixelCoord c{o.x + i * h, o.y + j * h};
          if (offsets.contains(c)) next.push_back(c);
        }
    }
    live.swap(next);
  }

  for (auto o : live) {
    const double score = score_with_penalty(tmpl, pyramid.levels[0], o, pyramid.max_distance);
    if (score <= accept_threshold) out.push_back({o, score});
  }
  std::sort(out.begin(), out.end(), [](const ChamferMatch& a, const ChamferMatch& b) {
    if (a.score != b.score) return a.score < b.score;
    if (a.offset.y != b.offset.y) return a.offset.y < b.offset.y;
    return a.offset.x < b.offset.x;
  });
  return out;
}

}  // namespace comal

#include "comal/corners.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>

namespace comal {
namespace {

struct Arc {
  int first = 0;
  int count = 0;
};

Arc arc_window(int n, int idx, double scale) {
  const int k = arc_radius(scale);
  if (2 * k + 1 >= n) return {0, n};
  return {((idx - k) % n + n) % n, 2 * k + 1};
}

// Integer moment sums keep the scatter exact up to the final division.
double lambda_min(const std::vector<PixelCoord>& pts, Arc arc) {
  const int n = static_cast<int>(pts.size());
  const PixelCoord ref = pts[arc.first];
  long long sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (int i = 0; i < arc.count; ++i) {
    const PixelCoord p = pts[(arc.first + i) % n] - ref;
    sx += p.x;
    sy += p.y;
    sxx += static_cast<long long>(p.x) * p.x;
    syy += static_cast<long long>(p.y) * p.y;
    sxy += static_cast<long long>(p.x) * p.y;
  }
  const long long m = arc.count;
  const double norm = static_cast<double>(m * m);
  Eigen::Matrix2d c;
  c(0, 0) = static_cast<double>(m * sxx - sx * sx) / norm;
  c(1, 1) = static_cast<double>(m * syy - sy * sy) / norm;
  c(0, 1) = c(1, 0) = static_cast<double>(m * sxy - sx * sy) / norm;
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(c, Eigen::EigenvaluesOnly);
  return std::max(0.0, es.eigenvalues()(0));
}

bool on_border(PixelCoord p, const Rect& r) {
  return p.x == r.x0 || p.y == r.y0 || p.x == r.x_end() - 1 || p.y == r.y_end() - 1;
}

}  // namespace

int arc_radius(double scale) { return std::max(0, static_cast<int>(std::floor(scale))); }

double cornerness(const Contour& contour, int idx, double scale) {
  const int n = static_cast<int>(contour.size());
  if (idx < 0 || idx >= n) throw Error(Errc::OutOfBounds, "contour index out of range");
  const Arc arc = arc_window(n, idx, scale);
  if (arc.count < 3) throw Error(Errc::ArcTooShort, "fewer than 3 contour points in the arc window");
  return lambda_min(contour.points, arc);
}

std::vector<double> cornerness_profile(const Contour& contour, double scale) {
  std::vector<double> out(contour.size());
  for (int i = 0; i < static_cast<int>(out.size()); ++i) out[i] = cornerness(contour, i, scale);
  return out;
}

std::vector<int> corner_indices(const Contour& contour, std::span<const double> profile, double scale,
                                double threshold, const Rect& bounds) {
  const int n = static_cast<int>(contour.size());
  const int k = std::min(arc_radius(scale), (n - 1) / 2);
  std::vector<int> out;
  for (int i = 0; i < n; ++i) {
    if (!(profile[i] > threshold) || on_border(contour.points[i], bounds)) continue;
    bool is_max = true;
    for (int d = -k; d <= k && is_max; ++d) {
      if (d == 0) continue;
      const int j = ((i + d) % n + n) % n;
      if (j == i) continue;
      is_max = j < i ? profile[i] > profile[j] : profile[i] >= profile[j];
    }
    if (is_max) out.push_back(i);
  }
  return out;
}

std::vector<LevelLineSegment> level_line_segments(std::span<const ExtremalRegion> regions, int min_contour_points) {
  std::vector<LevelLineSegment> out;
  for (const auto& r : regions) {
    Contour c = trace_boundary(r);
    if (static_cast<int>(c.size()) < std::max(3, min_contour_points)) continue;
    out.push_back({std::move(c), r.level, r.stability, r});
  }
  return out;
}

SupportSplit split_support_region(const ExtremalRegion& region, const Contour& contour, const Rect& patch,
                                  int min_side_pixels) {
  SupportSplit s;
  s.side_a = BinaryMask::Zero(patch.h, patch.w);
  s.side_b = BinaryMask::Zero(patch.h, patch.w);
  BinaryMask line = BinaryMask::Zero(patch.h, patch.w);
  for (auto p : contour.points)
    if (patch.contains(p)) line(p.y - patch.y0, p.x - patch.x0) = true;
  // Pixels beyond the raster the region was extracted from belong to neither side.
  const Rect raster{region.origin.x, region.origin.y, region.tree->width(), region.tree->height()};
  int na = 0, nb = 0;
  for (int y = 0; y < patch.h; ++y)
    for (int x = 0; x < patch.w; ++x) {
      if (line(y, x) || !raster.contains(patch.x0 + x, patch.y0 + y)) continue;
      if (region.contains({patch.x0 + x, patch.y0 + y})) {
        s.side_a(y, x) = true;
        ++na;
      } else {
        s.side_b(y, x) = true;
        ++nb;
      }
    }
  s.degenerate = na < min_side_pixels || nb < min_side_pixels;
  return s;
}

SupportPatch make_support_patch(const GrayImage& frame, PixelCoord center, const ExtremalRegion& region,
                                const Contour& contour, int patch_size, int min_side_pixels) {
  auto win = crop(frame, centered_rect(center, patch_size / 2));
  auto split = split_support_region(region, contour, win.rect, min_side_pixels);
  SupportPatch p;
  p.pixels = std::move(win.image);
  p.rect = win.rect;
  p.center = center;
  p.side_a = std::move(split.side_a);
  p.side_b = std::move(split.side_b);
  p.degenerate = split.degenerate;
  return p;
}

std::vector<CornerPoint> corners_from_regions(const GrayImage& frame, std::span<const ExtremalRegion> regions,
                                              const CornerParams& params, const Rect& bounds) {
  std::vector<CornerPoint> out;
  std::map<PixelCoord, std::size_t> at;
  for (auto& seg : level_line_segments(regions, params.min_contour_points)) {
    auto shared = std::make_shared<const LevelLineSegment>(std::move(seg));
    const Contour& c = shared->contour;
    const auto profile = cornerness_profile(c, params.scale);
    for (int i : corner_indices(c, profile, params.scale, params.cornerness_threshold, bounds)) {
      const PixelCoord pos = c.points[i];
      auto [it, fresh] = at.emplace(pos, out.size());
      if (!fresh && out[it->second].cornerness >= profile[i]) continue;
      const Arc arc = arc_window(static_cast<int>(c.size()), i, params.scale);
      CornerPoint cp{pos, params.scale, profile[i], shared, i, arc.first, arc.count,
                     make_support_patch(frame, pos, shared->region, c, params.patch_size, params.min_side_pixels)};
      if (fresh) {
        out.push_back(std::move(cp));
      } else {
        out[it->second] = std::move(cp);
      }
    }
  }
  return out;
}

std::vector<CornerPoint> detect_corners(const GrayImage& img, const CornerParams& params) {
  const auto regions = detect_msers(img, params.mser);
  return corners_from_regions(img, regions, params, image_rect(img));
}

}  // namespace comal

#pragma once

// Corners on maximally stable level lines: boundaries of stable extremal
// regions are scanned for points where the local point distribution turns,
// and each corner carries the two-sided split of its support patch.

#include <memory>
#include <span>
#include <vector>

#include "comal/mser.hpp"
#include "comal/part_ssd.hpp"

namespace comal {

struct CornerParams {
  double scale = 8.4;  // arc window radius, contour points
  double cornerness_threshold = 1.5;
  int min_contour_points = 17;
  int patch_size = 41;
  int min_side_pixels = 40;
  MserParams mser;
};

/// Boundary of one stable extremal region.
struct LevelLineSegment {
  Contour contour;
  int level = 0;
  double stability = 0.0;
  ExtremalRegion region;
};

struct CornerPoint {
  PixelCoord position;
  double scale = 8.4;
  double cornerness = 0.0;
  std::shared_ptr<const LevelLineSegment> segment;
  int index = 0;       // into segment->contour
  int arc_first = 0;   // first contour index of the scale window (may wrap)
  int arc_count = 0;
  SupportPatch patch;
};

/// Number of contour points on each side of the centre inside the window.
int arc_radius(double scale);

/// Smaller eigenvalue of the centred scatter matrix of the contour points
/// within arc_radius(scale) of idx (whole contour if shorter).
/// Throws Errc::ArcTooShort below 3 points.
double cornerness(const Contour& contour, int idx, double scale);

/// cornerness at every contour index.
std::vector<double> cornerness_profile(const Contour& contour, double scale);

/// Contour indices that are strict local maxima of the profile over the arc
/// window (equal values resolved toward the lowest index) and exceed the
/// threshold. Points on the border of `bounds` are skipped: there the region
/// boundary is the raster edge, not a level line.
std::vector<int> corner_indices(const Contour& contour, std::span<const double> profile, double scale,
                                double threshold, const Rect& bounds);

/// Traced boundaries of the regions with at least min_contour_points points.
std::vector<LevelLineSegment> level_line_segments(std::span<const ExtremalRegion> regions, int min_contour_points);

struct SupportSplit {
  BinaryMask side_a;  // inside the region, contour excluded
  BinaryMask side_b;  // outside the region, contour excluded
  bool degenerate = false;
};

/// Splits `patch` (frame coordinates) by the region; degenerate when either
/// side has fewer than min_side_pixels pixels. Pixels outside the raster the
/// region was extracted from (a tile) are left out of both sides.
SupportSplit split_support_region(const ExtremalRegion& region, const Contour& contour, const Rect& patch,
                                  int min_side_pixels);

/// Clamped patch_size square around `center` with its side split.
SupportPatch make_support_patch(const GrayImage& frame, PixelCoord center, const ExtremalRegion& region,
                                const Contour& contour, int patch_size, int min_side_pixels);

/// Corners of the given regions; `bounds` is the raster the regions were
/// extracted from (frame coordinates). A position found on several level
/// lines is reported once, with its highest cornerness.
std::vector<CornerPoint> corners_from_regions(const GrayImage& frame, std::span<const ExtremalRegion> regions,
                                              const CornerParams& params, const Rect& bounds);

std::vector<CornerPoint> detect_corners(const GrayImage& img, const CornerParams& params = {});

}  // namespace comal

#pragma once

// Hierarchical chamfer matching of a template point set against an edge set,
// translation only.
//
// Level k of the pyramid covers offsets on a grid of step s = 2^k. Instead of
// the distance field of a downsampled edge map, level k stores the minimum of
// the full-resolution field over every s x s window. The mean of those
// minima over the template is a lower bound on the score of every offset in
// the s x s block, so a block is discarded only when no offset inside it can
// reach the threshold: the search returns exactly what an exhaustive
// full-resolution scan would, with no slack term.

#include <span>
#include <vector>

#include "comal/image.hpp"

namespace comal {

struct EdgePyramid {
  /// levels[0]: distance field, width x height. levels[k], k >= 1: window
  /// minima; entry (y + s - 1, x + s - 1) is the minimum over
  /// [x, x + s) x [y, y + s) clipped to the field, or max_distance when the
  /// window misses the field entirely.
  std::vector<DistanceField> levels;
  double max_distance = 0.0;  // out-of-field penalty

  int num_levels() const { return static_cast<int>(levels.size()); }
  int width() const { return static_cast<int>(levels.front().cols()); }
  int height() const { return static_cast<int>(levels.front().rows()); }
};

/// floor(log2(min(w, h) / 8)) + 1, at least 1.
int pyramid_levels_for(int width, int height);

/// Throws Errc::EmptyEdges, Errc::OutOfBounds for points outside the field,
/// Errc::TooManyLevels when the coarsest offset grid would be below 8x8.
EdgePyramid build_edge_pyramid(std::span<const PixelCoord> edges, int width, int height, int num_levels);

struct ChamferMatch {
  PixelCoord offset;  // translation applied to the template
  double score = 0.0; // mean distance to the nearest edge, pixels
};

/// Mean of field(p + offset) over template points; points falling outside the
/// field contribute the field's maximum. Throws Errc::EmptyTemplate.
double chamfer_score(std::span<const PixelCoord> tmpl, const DistanceField& field, PixelCoord offset);

/// Lower bound on chamfer_score over the offsets [o, o + 2^k) x [o, o + 2^k),
/// from pyramid level k (k = 0 is the score itself).
double block_lower_bound(std::span<const PixelCoord> tmpl, const EdgePyramid& pyramid, int k, PixelCoord o);

/// Coarse-to-fine search over offsets in `offsets`. Returns all offsets with
/// score <= accept_threshold, ascending by score then (dy, dx).
std::vector<ChamferMatch> hierarchical_match(std::span<const PixelCoord> tmpl, const EdgePyramid& pyramid,
                                             const Rect& offsets, double accept_threshold);

}  // namespace comal

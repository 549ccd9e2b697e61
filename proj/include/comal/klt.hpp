#pragma once

// Translation-only inverse-compositional Lucas-Kanade point tracker, the
// baseline the level-line tracker is compared against. Template values,
// gradients and the 2x2 Hessian come from the previous frame once per point;
// each iteration only resamples the next frame.

#include <Eigen/Core>

#include <optional>
#include <span>
#include <vector>

#include "comal/image.hpp"
#include "comal/tracker.hpp"

namespace comal {

using Point2 = Eigen::Vector2d;  // (x, y)
using FloatImage = Image<double>;

struct KltConfig {
  int window = 41;
  int max_iters = 30;
  double eps = 0.01;        // stop once the update is shorter than this, pixels
  double min_eigen = 1.0;   // smallest Hessian eigenvalue accepted, gray levels^2
  int pyramid_levels = 1;
};

/// Throws Errc::BadConfig.
void validate(const KltConfig& cfg);

FloatImage to_float(const GrayImage& img);

/// Bilinear sample at (x, y); needs 0 <= x <= cols-1 and 0 <= y <= rows-1.
double bilinear(const FloatImage& img, double x, double y);

/// Central differences; the one-pixel border is left at zero and never sampled.
struct ImageGradient {
  FloatImage gx;
  FloatImage gy;
};
ImageGradient central_gradient(const FloatImage& img);

struct KltTemplate {
  Point2 center;
  int half = 0;
  Eigen::ArrayXXd values;  // (v + half, u + half) = prev(center + (u, v))
  Eigen::ArrayXXd gx;
  Eigen::ArrayXXd gy;
  Eigen::Matrix2d hessian;
};

/// Samples the window around p. Throws Errc::OutOfBounds unless the window
/// stays one pixel inside prev.
KltTemplate make_template(const FloatImage& prev, const ImageGradient& grad, const Point2& p, int window);

struct KltResult {
  Point2 position = Point2::Zero();
  bool converged = false;
  int iterations = 0;
  double residual = kNoScore;          // mean squared error at the final position
  double initial_residual = kNoScore;  // at the starting position
  std::optional<Errc> error;           // set by the batch driver instead of throwing
};

/// Throws Errc::SingularHessian for untextured windows, Errc::OutOfBounds
/// when the window leaves either frame.
KltResult klt_track_point(const FloatImage& prev, const FloatImage& next, const Point2& p, const KltConfig& cfg);
KltResult klt_track_point(const GrayImage& prev, const GrayImage& next, const Point2& p, const KltConfig& cfg);

/// Independent per-point tracking, order preserved. Errors are recorded per
/// point and never abort the batch.
std::vector<KltResult> klt_track_frame(const GrayImage& prev, const GrayImage& next, std::span<const Point2> points,
                                       const KltConfig& cfg, int jobs = 1);

/// Tracks `starts` (ids 0, 1, ...) through the sequence. A point is Lost on
/// its first error or non-converged step and keeps its last position.
/// ssd_score holds the KLT residual; chamfer_score and combination stay empty.
TrackLog klt_sequence(const FrameSource& frames, std::span<const Point2> starts, const KltConfig& cfg,
                      int jobs = 1);

}  // namespace comal

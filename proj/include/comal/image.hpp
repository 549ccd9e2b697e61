#pragma once

// Raster substrate shared by every module: dense row-major Eigen arrays
// indexed (row, col) = (y, x), plus the few raster algorithms the matchers
// need (exact Euclidean distance transform, 2x box downsampling, clamped
// window extraction).

#include <Eigen/Core>

#include <algorithm>
#include <compare>
#include <cstdint>
#include <limits>
#include <type_traits>
#include <vector>

#include "comal/error.hpp"

namespace comal {

template <typename Scalar>
using Image = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using GrayImage = Image<std::uint8_t>;
using BinaryMask = Image<bool>;

/// Per-pixel Euclidean distance (pixel units) to the nearest set pixel of a mask.
template <typename Scalar = double>
using DistanceFieldT = Image<Scalar>;
using DistanceField = DistanceFieldT<double>;

struct PixelCoord {
  int x = 0;
  int y = 0;

  friend auto operator<=>(const PixelCoord&, const PixelCoord&) = default;
  PixelCoord operator+(const PixelCoord& o) const { return {x + o.x, y + o.y}; }
  PixelCoord operator-(const PixelCoord& o) const { return {x - o.x, y - o.y}; }
};

struct Rect {
  int x0 = 0;
  int y0 = 0;
  int w = 0;
  int h = 0;

  int x_end() const { return x0 + w; }
  int y_end() const { return y0 + h; }
  bool empty() const { return w <= 0 || h <= 0; }
  bool contains(int x, int y) const { return x >= x0 && x < x0 + w && y >= y0 && y < y0 + h; }
  bool contains(PixelCoord p) const { return contains(p.x, p.y); }
  bool contains(const Rect& r) const {
    return r.x0 >= x0 && r.y0 >= y0 && r.x_end() <= x_end() && r.y_end() <= y_end();
  }

  friend bool operator==(const Rect&, const Rect&) = default;
};

/// Square window of side 2*radius+1 centred on c.
inline Rect centered_rect(PixelCoord c, int radius) {
  return {c.x - radius, c.y - radius, 2 * radius + 1, 2 * radius + 1};
}

inline Rect intersect(const Rect& a, const Rect& b) {
  const int x0 = std::max(a.x0, b.x0);
  const int y0 = std::max(a.y0, b.y0);
  const int x1 = std::min(a.x_end(), b.x_end());
  const int y1 = std::min(a.y_end(), b.y_end());
  return {x0, y0, std::max(0, x1 - x0), std::max(0, y1 - y0)};
}

/// Intersection of r with the [0,width) x [0,height) image domain; may be empty.
inline Rect clamp_rect(const Rect& r, int width, int height) {
  return intersect(r, Rect{0, 0, width, height});
}

template <typename Derived>
Rect image_rect(const Eigen::DenseBase<Derived>& img) {
  return {0, 0, static_cast<int>(img.cols()), static_cast<int>(img.rows())};
}

namespace detail {

// One-dimensional squared distance transform of a sampled function
// (lower envelope of parabolas rooted at f).
void sq_distance_1d(const double* f, int n, double* d, int* v, double* z);

inline constexpr double kFar = 1e20;

}  // namespace detail

/// Squared Euclidean distance to the nearest set pixel, by two separable
/// lower-envelope passes. Values are exact integers stored as doubles.
Image<double> squared_distance_transform(const BinaryMask& mask);

/// Exact Euclidean distance transform. Zero exactly at set pixels.
/// Throws Errc::EmptyMask when no pixel is set.
template <typename Scalar = double>
DistanceFieldT<Scalar> distance_transform(const BinaryMask& mask) {
  return squared_distance_transform(mask).sqrt().template cast<Scalar>();
}

/// Halves both dimensions (rounding up). Each output pixel is the mean of the
/// available pixels of its 2x2 block; integer images take the floor of the mean.
template <typename Scalar>
Image<Scalar> downsample2(const Image<Scalar>& img) {
  if (img.rows() < 2 || img.cols() < 2) {
    throw Error(Errc::TooSmall, "downsample2 needs at least 2x2 pixels");
  }
  const Eigen::Index h = (img.rows() + 1) / 2;
  const Eigen::Index w = (img.cols() + 1) / 2;
  Image<Scalar> out(h, w);
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      const Eigen::Index ys = 2 * y, xs = 2 * x;
      const Eigen::Index bh = std::min<Eigen::Index>(2, img.rows() - ys);
      const Eigen::Index bw = std::min<Eigen::Index>(2, img.cols() - xs);
      if constexpr (std::is_integral_v<Scalar>) {
        std::int64_t sum = 0;
        for (Eigen::Index j = 0; j < bh; ++j)
          for (Eigen::Index i = 0; i < bw; ++i) sum += img(ys + j, xs + i);
        out(y, x) = static_cast<Scalar>(sum / (bh * bw));
      } else {
        out(y, x) = img.block(ys, xs, bh, bw).mean();
      }
    }
  }
  return out;
}

/// A copied image window together with the rectangle it was taken from.
template <typename Scalar>
struct Window {
  Image<Scalar> image;
  Rect rect;
};

/// Copies the part of r that lies inside img. Throws Errc::OutOfBounds when
/// the clamped intersection is empty.
template <typename Scalar>
Window<Scalar> crop(const Image<Scalar>& img, const Rect& r) {
  const Rect c = clamp_rect(r, static_cast<int>(img.cols()), static_cast<int>(img.rows()));
  if (c.empty()) throw Error(Errc::OutOfBounds, "crop rectangle does not intersect the image");
  return {img.block(c.y0, c.x0, c.h, c.w), c};
}

}  // namespace comal

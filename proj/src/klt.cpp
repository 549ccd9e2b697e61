#include "comal/klt.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

#include "comal/parallel.hpp"

namespace comal {
namespace {

struct Level {
  FloatImage image;
  ImageGradient grad;
};

std::vector<Level> build_levels(const FloatImage& img, int levels, bool with_gradient) {
  std::vector<Level> out;
  out.push_back({img, with_gradient ? central_gradient(img) : ImageGradient{}});
  for (int l = 1; l < levels; ++l) {
    FloatImage down = downsample2(out.back().image);
    ImageGradient g = with_gradient ? central_gradient(down) : ImageGradient{};
    out.push_back({std::move(down), std::move(g)});
  }
  return out;
}

bool window_inside(const FloatImage& img, const Point2& c, int half, int margin) {
  return c.x() - half >= margin && c.y() - half >= margin && c.x() + half <= img.cols() - 1 - margin &&
         c.y() + half <= img.rows() - 1 - margin;
}

// Pixel-centre coordinates at pyramid level l (2x2 block means).
Point2 to_level(const Point2& p, int l) {
  const double s = std::ldexp(1.0, -l);
  return (p.array() + 0.5).matrix() * s - Point2::Constant(0.5);
}

struct Solve {
  Point2 d = Point2::Zero();
  bool converged = false;
  int iterations = 0;
  double initial_residual = kNoScore;
};

double residual_at(const KltTemplate& t, const FloatImage& next, const Point2& d) {
  double sum = 0.0;
  const int n = 2 * t.half + 1;
  for (int v = 0; v < n; ++v)
    for (int u = 0; u < n; ++u) {
      const double e = bilinear(next, t.center.x() + d.x() + u - t.half, t.center.y() + d.y() + v - t.half) -
                       t.values(v, u);
      sum += e * e;
    }
  return sum / (double(n) * n);
}

Solve iterate(const KltTemplate& t, const FloatImage& next, Point2 d, const KltConfig& cfg) {
  const Eigen::Matrix2d hinv = t.hessian.inverse();
  const int n = 2 * t.half + 1;
  Solve s;
  for (int it = 1; it <= cfg.max_iters; ++it) {
    if (!window_inside(next, t.center + d, t.half, 0)) {
      throw Error(Errc::OutOfBounds, "tracking window left the next frame");
    }
    Eigen::Vector2d b = Eigen::Vector2d::Zero();
    double sq = 0.0;
    for (int v = 0; v < n; ++v)
      for (int u = 0; u < n; ++u) {
        const double e = bilinear(next, t.center.x() + d.x() + u - t.half, t.center.y() + d.y() + v - t.half) -
                         t.values(v, u);
        b.x() += t.gx(v, u) * e;
        b.y() += t.gy(v, u) * e;
        sq += e * e;
      }
    if (it == 1) s.initial_residual = sq / (double(n) * n);
    const Eigen::Vector2d delta = hinv * b;
    d -= delta;  // inverse composition of a translation
    s.iterations = it;
    if (delta.norm() < cfg.eps) {
      s.converged = true;
      break;
    }
  }
  s.d = d;
  return s;
}

KltResult track_on_levels(const std::vector<Level>& prev, const std::vector<Level>& next, const Point2& p,
                          const KltConfig& cfg) {
  const int half = cfg.window / 2;
  Point2 d = Point2::Zero();
  KltResult out;
  for (int l = static_cast<int>(prev.size()) - 1; l >= 0; --l) {
    const Point2 c = to_level(p, l);
    if (l > 0) {
      // Coarse levels only seed the finer ones; skip those the window misses
      // or where the texture is too weak at that resolution.
      if (!window_inside(prev[l].image, c, half, 1)) continue;
      const KltTemplate t = make_template(prev[l].image, prev[l].grad, c, cfg.window);
      if (Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(t.hessian).eigenvalues()(0) < cfg.min_eigen) continue;
      try {
        const Solve s = iterate(t, next[l].image, d, cfg);
        d = s.d;
      } catch (const Error&) {
      }
      d *= 2.0;
      continue;
    }
    const KltTemplate t = make_template(prev[0].image, prev[0].grad, c, cfg.window);
    if (Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(t.hessian).eigenvalues()(0) < cfg.min_eigen) {
      throw Error(Errc::SingularHessian, "window has too little texture to track");
    }
    const Solve s = iterate(t, next[0].image, d, cfg);
    out.position = p + s.d;
    out.converged = s.converged;
    out.iterations = s.iterations;
    out.initial_residual = s.initial_residual;
    if (!window_inside(next[0].image, t.center + s.d, half, 0)) {
      throw Error(Errc::OutOfBounds, "tracking window left the next frame");
    }
    out.residual = residual_at(t, next[0].image, s.d);
  }
  return out;
}

}  // namespace

void validate(const KltConfig& cfg) {
  auto bad = [](const std::string& what) { throw Error(Errc::BadConfig, what); };
  if (cfg.window < 3 || cfg.window % 2 == 0) bad("klt.window must be odd and >= 3");
  if (cfg.max_iters < 1) bad("klt.max_iters must be >= 1");
  if (!(cfg.eps > 0)) bad("klt.eps must be positive");
  if (!(cfg.min_eigen >= 0)) bad("klt.min_eigen must be >= 0");
  if (cfg.pyramid_levels < 1) bad("klt.pyramid_levels must be >= 1");
}

FloatImage to_float(const GrayImage& img) { return img.cast<double>(); }

double bilinear(const FloatImage& img, double x, double y) {
  const int cols = static_cast<int>(img.cols()), rows = static_cast<int>(img.rows());
  int x0 = static_cast<int>(std::floor(x)), y0 = static_cast<int>(std::floor(y));
  // Exactly on the last row/column: use the cell before it with weight 1.
  if (x0 == cols - 1 && cols > 1) --x0;
  if (y0 == rows - 1 && rows > 1) --y0;
  const double ax = x - x0, ay = y - y0;
  const int x1 = std::min(x0 + 1, cols - 1), y1 = std::min(y0 + 1, rows - 1);
  return (1 - ay) * ((1 - ax) * img(y0, x0) + ax * img(y0, x1)) + ay * ((1 - ax) * img(y1, x0) + ax * img(y1, x1));
}

ImageGradient central_gradient(const FloatImage& img) {
  const Eigen::Index h = img.rows(), w = img.cols();
  ImageGradient g{FloatImage::Zero(h, w), FloatImage::Zero(h, w)};
  if (w >= 3) g.gx.middleCols(1, w - 2) = 0.5 * (img.rightCols(w - 2) - img.leftCols(w - 2));
  if (h >= 3) g.gy.middleRows(1, h - 2) = 0.5 * (img.bottomRows(h - 2) - img.topRows(h - 2));
  return g;
}

KltTemplate make_template(const FloatImage& prev, const ImageGradient& grad, const Point2& p, int window) {
  const int half = window / 2;
  if (!window_inside(prev, p, half, 1)) {
    throw Error(Errc::OutOfBounds, "tracking window leaves the previous frame");
  }
  const int n = 2 * half + 1;
  KltTemplate t;
  t.center = p;
  t.half = half;
  t.values.resize(n, n);
  t.gx.resize(n, n);
  t.gy.resize(n, n);
  for (int v = 0; v < n; ++v)
    for (int u = 0; u < n; ++u) {
      const double x = p.x() + u - half, y = p.y() + v - half;
      t.values(v, u) = bilinear(prev, x, y);
      t.gx(v, u) = bilinear(grad.gx, x, y);
      t.gy(v, u) = bilinear(grad.gy, x, y);
    }
  t.hessian << (t.gx * t.gx).sum(), (t.gx * t.gy).sum(), (t.gx * t.gy).sum(), (t.gy * t.gy).sum();
  return t;
}

KltResult klt_track_point(const FloatImage& prev, const FloatImage& next, const Point2& p, const KltConfig& cfg) {
  validate(cfg);
  return track_on_levels(build_levels(prev, cfg.pyramid_levels, true), build_levels(next, cfg.pyramid_levels, false),
                         p, cfg);
}

KltResult klt_track_point(const GrayImage& prev, const GrayImage& next, const Point2& p, const KltConfig& cfg) {
  return klt_track_point(to_float(prev), to_float(next), p, cfg);
}

std::vector<KltResult> klt_track_frame(const GrayImage& prev, const GrayImage& next, std::span<const Point2> points,
                                       const KltConfig& cfg, int jobs) {
  validate(cfg);
  std::vector<KltResult> out(points.size());
  if (points.empty()) return out;
  const auto a = build_levels(to_float(prev), cfg.pyramid_levels, true);
  const auto b = build_levels(to_float(next), cfg.pyramid_levels, false);
  parallel_for(points.size(), jobs, [&](std::size_t i) {
    try {
      out[i] = track_on_levels(a, b, points[i], cfg);
    } catch (const Error& e) {
      out[i] = {};
      out[i].position = points[i];
      out[i].error = e.code();
    }
  });
  return out;
}

TrackLog klt_sequence(const FrameSource& frames, std::span<const Point2> starts, const KltConfig& cfg, int jobs) {
  validate(cfg);
  if (frames.count < 1) throw Error(Errc::EmptySequence, "no frames to track");
  TrackLog log;
  std::vector<Point2> pos(starts.begin(), starts.end());
  std::vector<bool> active(starts.size(), true);
  auto row_at = [&](std::size_t i, int frame) {
    TrackRow r;
    r.track_id = static_cast<int>(i);
    r.frame = frame;
    r.x = pos[i].x();
    r.y = pos[i].y();
    return r;
  };
  for (std::size_t i = 0; i < pos.size(); ++i) log.push_back(row_at(i, 0));

  GrayImage prev = frames.load(0);
  for (int k = 1; k < frames.count; ++k) {
    GrayImage next = frames.load(k);
    std::vector<std::size_t> ids;
    std::vector<Point2> pts;
    for (std::size_t i = 0; i < pos.size(); ++i)
      if (active[i]) {
        ids.push_back(i);
        pts.push_back(pos[i]);
      }
    const auto res = klt_track_frame(prev, next, pts, cfg, jobs);
    for (std::size_t j = 0; j < ids.size(); ++j) {
      const std::size_t i = ids[j];
      const KltResult& r = res[j];
      if (!r.error && r.converged) pos[i] = r.position;
      TrackRow row = row_at(i, k);
      row.ssd_score = r.residual;
      if (r.error || !r.converged) {
        active[i] = false;
        row.status = TrackStatus::Lost;
      }
      log.push_back(row);
    }
    prev = std::move(next);
  }
  return log;
}

}  // namespace comal

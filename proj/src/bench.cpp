#include "comal/bench.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <numeric>

#include "comal/parallel.hpp"

namespace comal {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::vector<CornerPoint> strongest(std::vector<CornerPoint> corners, int limit) {
  if (limit <= 0 || static_cast<std::size_t>(limit) >= corners.size()) return corners;
  std::stable_sort(corners.begin(), corners.end(),
                   [](const CornerPoint& a, const CornerPoint& b) { return a.cornerness > b.cornerness; });
  corners.resize(limit);
  return corners;
}

CornerParams detection_params(const TrackerConfig& cfg) {
  CornerParams p = cfg.detect;
  p.scale = cfg.scale;
  p.patch_size = cfg.patch_size;
  return p;
}

}  // namespace

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

BenchReport run_bench(const FrameSource& frames, const TrackerConfig& cfg, int jobs) {
  if (frames.count < 2) throw Error(Errc::EmptySequence, "benchmark needs at least two frames");
  validate(cfg);
  const CornerParams params = detection_params(cfg);

  const GrayImage first = frames.load(0);
  TrackSet set = start_tracks(first, 0, cfg);
  std::vector<CornerPoint> previous = strongest(detect_corners(first, params), cfg.max_tracks);

  BenchReport report;
  for (int k = 1; k < frames.count; ++k) {
    const GrayImage frame = frames.load(k);
    BenchFrame b;
    b.frame = k;
    b.tracks = static_cast<int>(std::count_if(set.tracks.begin(), set.tracks.end(),
                                              [](const Track& t) { return t.status == TrackStatus::Active; }));
    auto t0 = Clock::now();
    step(set, frame, k, cfg, jobs);
    b.track_ms = ms_since(t0);

    t0 = Clock::now();
    std::vector<CornerPoint> detected = detect_corners(frame, params);
    std::vector<double> best(previous.size(), std::numeric_limits<double>::infinity());
    parallel_for(previous.size(), jobs, [&](std::size_t i) {
      for (const auto& d : detected) {
        try {
          best[i] = std::min(best[i], part_ssd_match(previous[i].patch, d.patch, cfg.min_overlap).score);
        } catch (const Error&) {
        }
      }
    });
    b.redetect_ms = ms_since(t0);
    b.detections = static_cast<int>(detected.size());
    b.pairs = static_cast<long>(previous.size()) * static_cast<long>(detected.size());
    previous = strongest(std::move(detected), cfg.max_tracks);
    report.frames.push_back(b);
  }

  std::vector<double> tr, rd;
  for (const auto& b : report.frames) {
    tr.push_back(b.track_ms);
    rd.push_back(b.redetect_ms);
  }
  report.median_track_ms = median(tr);
  report.median_redetect_ms = median(rd);
  report.ratio = report.median_redetect_ms > 0 ? report.median_track_ms / report.median_redetect_ms : 0.0;
  return report;
}

}  // namespace comal

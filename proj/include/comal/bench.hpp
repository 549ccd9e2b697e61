#pragma once

// Per-frame wall-clock comparison of tracking by search against
// redetect-and-match: detect corners on every frame, then part-SSD match the
// previous frame's corners against every new detection.

#include <vector>

#include "comal/tracker.hpp"

namespace comal {

struct BenchFrame {
  int frame = 0;
  double track_ms = 0.0;     // step() for every live track
  double redetect_ms = 0.0;  // detect_corners + exhaustive part SSD
  int tracks = 0;            // tracks stepped
  int detections = 0;
  long pairs = 0;            // part-SSD comparisons made by the baseline
};

struct BenchReport {
  std::vector<BenchFrame> frames;
  double median_track_ms = 0.0;
  double median_redetect_ms = 0.0;
  double ratio = 0.0;  // median_track_ms / median_redetect_ms
};

/// Both pipelines follow the same corner budget: cfg.max_tracks strongest
/// corners (all when 0). Needs at least two frames (Errc::EmptySequence).
BenchReport run_bench(const FrameSource& frames, const TrackerConfig& cfg, int jobs = 1);

double median(std::vector<double> v);

}  // namespace comal

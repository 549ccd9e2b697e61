#pragma once

// Evaluation against bounding-box annotations. A point keeps its position
// relative to its object's box, so the expected location of a track in any
// frame follows from where it was born. A prediction is correct when it lands
// within a pixel tolerance of that location.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "comal/klt.hpp"
#include "comal/synth.hpp"
#include "comal/tracker.hpp"

namespace comal {

/// box_u.origin + (p - box_t.origin) * (box_u.size / box_t.size), per axis.
/// Throws Errc::PointOutsideBox when p is more than 1 px outside box_t, and
/// Errc::BadParams for boxes without positive size.
Point2 map_point(const Point2& p, const BoxF& box_t, const BoxF& box_u);

struct GtCorrespondence {
  int track_id = 0;
  int frame = 0;
  int object_id = 0;
  std::optional<Point2> expected;  // absent: the object has no box in this frame
};

/// One entry per non-birth row of every track owned by an object. A track is
/// owned by the smallest box containing its birth position (ties: lowest id);
/// tracks born outside every box get no entries.
std::vector<GtCorrespondence> ground_truth(const TrackLog& log, std::span<const BBoxAnnotation> annotations);

enum class Stratum { Boundary, Interior, Overall };

const char* stratum_name(Stratum s);

struct PRResult {
  Stratum stratum = Stratum::Overall;
  int correct = 0;
  int total = 0;
  double correct_per_frame = 0.0;
  std::optional<double> precision;  // absent when total == 0
};

struct ScoreOptions {
  double tolerance = 15.0;
  double band = 5.0;                                // boundary band width, pixels
  std::span<const BinaryMask> masks;                // per frame; empty: no strata
};

struct ScoreReport {
  std::vector<PRResult> strata;  // Overall, then Boundary and Interior when masks are given
  int missing_gt = 0;            // scored rows without a correspondence, counted incorrect
  int frames = 0;                // frames that could hold matches
};

/// Scores every Active row past its track's birth. Lost rows and rows of
/// frames whose box is absent are skipped. Rows without any correspondence are
/// obtained matches that cannot be verified and count as incorrect.
/// correct_per_frame divides by the number of distinct frames in the log
/// after the first.
ScoreReport score_matches(const TrackLog& predictions, std::span<const GtCorrespondence> gt,
                          const ScoreOptions& options = {});

struct SweepSetting {
  double threshold = 0.0;
  TrackLog log;
};

struct SweepRow {
  double threshold = 0.0;
  PRResult overall;
};

/// Ground truth is derived per setting from its own log. Throws
/// Errc::BadParams for fewer than two settings.
std::vector<SweepRow> sweep_operating_points(std::span<const SweepSetting> settings,
                                             std::span<const BBoxAnnotation> annotations,
                                             const ScoreOptions& options = {});

/// Foreground pixels with a 4-neighbour outside the foreground or the frame.
BinaryMask mask_boundary(const BinaryMask& mask);

}  // namespace comal

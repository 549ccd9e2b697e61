#pragma once

// Corner tracking by search instead of re-detection. Each frame, MSER
// boundaries are extracted once per overlapping tile; every track then
// chamfer-matches its level-line arc against the boundaries inside its
// search window and verifies the best few placements by part SSD.

#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "comal/chamfer.hpp"
#include "comal/corners.hpp"
#include "comal/part_ssd.hpp"

namespace comal {

struct TrackerConfig {
  int search_radius = 40;
  int patch_size = 41;
  double scale = 8.4;
  double template_arc_factor = 2.0;  // arc half-length = factor * scale contour points
  double chamfer_threshold = 2.0;
  double ssd_threshold = 300.0;
  int min_overlap = kDefaultMinOverlap;
  int top_k = 5;
  int max_misses = 1;
  int redetect_interval = 0;  // frames; 0 = never
  int min_spawn_dist = 10;
  int max_tracks = 0;         // 0 = unbounded; otherwise strongest corners first
  int tile_size = 160;
  int tile_stride = 80;
  CornerParams detect;        // frame-0 / re-detection corners
  MserParams track_mser{10, 0.5, 20, 0};
};

/// Throws Errc::BadConfig when the values are inconsistent.
void validate(const TrackerConfig& cfg);

enum class TrackStatus { Active, Lost };

inline constexpr double kNoScore = std::numeric_limits<double>::quiet_NaN();

struct TrackPoint {
  int frame = 0;
  PixelCoord position;
  TrackStatus status = TrackStatus::Active;
  double chamfer_score = kNoScore;
  double ssd_score = kNoScore;
  std::optional<Combination> combination;
};

struct Track {
  int id = 0;
  PixelCoord position;
  double cornerness = 0.0;
  std::vector<PixelCoord> arc;  // level-line template, frame coordinates
  SupportPatch patch;
  TrackStatus status = TrackStatus::Active;
  int misses = 0;
  std::vector<TrackPoint> history;
};

struct TileContour {
  ExtremalRegion region;
  Contour contour;
  Rect bbox;  // of the contour points
};

struct MserTile {
  Rect rect;
  bool ready = false;
  std::vector<TileContour> contours;
};

/// Per-frame MSER boundaries on an overlapping tile grid. Tiles are filled on
/// demand; the cache is read-only once a frame's tracks start matching.
struct MserWindowCache {
  std::vector<MserTile> tiles;  // row-major
  int cols = 0;
  int rows = 0;
};

/// Tile origins step by `stride`; the last tile on each axis is pinned to the
/// frame edge so the grid covers the frame.
std::vector<Rect> tile_grid(int width, int height, int size, int stride);

MserTile extract_tile(const GrayImage& frame, const Rect& rect, const MserParams& params);

/// All tiles extracted.
MserWindowCache precompute_mser_windows(const GrayImage& frame, const TrackerConfig& cfg, int jobs = 1);

/// Grid only; fill selected tiles with fill_tiles.
MserWindowCache empty_mser_windows(const GrayImage& frame, const TrackerConfig& cfg);
void fill_tiles(MserWindowCache& cache, const GrayImage& frame, const std::vector<int>& which,
                const MserParams& params, int jobs);

/// Tile containing `search` whose centre is closest to its centre; if none
/// contains it, the one with the largest overlap. Ties go to the lowest index.
int select_tile(const MserWindowCache& cache, const Rect& search);

Rect search_rect(PixelCoord position, int radius, int width, int height);

struct Candidate {
  int contour = 0;        // index into the tile's contours
  PixelCoord position;    // frame coordinates of the matched corner
  double chamfer_score = 0.0;
};

/// Chamfer shortlist of the track's arc against each boundary in its search
/// window, pooled, ascending by (score, squared displacement, contour, y, x),
/// at most top_k.
std::vector<Candidate> shortlist(const Track& track, const MserTile& tile, const Rect& search,
                                 const TrackerConfig& cfg);

struct StageTimings {
  double detect_ms = 0.0;
  double mser_ms = 0.0;
  double chamfer_ms = 0.0;  // summed over workers
  double ssd_ms = 0.0;      // summed over workers

  StageTimings& operator+=(const StageTimings& o);
};

struct TrackSet {
  std::vector<Track> tracks;
  int next_id = 0;
  int last_frame = -1;
};

struct FrameResult {
  int frame = 0;
  int updated = 0;
  int lost = 0;
  int spawned = 0;
  StageTimings timings;
};

/// One shortlisted placement of a track, as considered by verification.
struct CandidateRecord {
  int frame = 0;
  int track_id = 0;
  int rank = 0;  // position in the shortlist
  Candidate candidate;
  double ssd_score = kNoScore;  // part SSD against the track's patch; empty when no side pairing overlaps
  std::optional<Combination> combination;
  bool selected = false;
};

/// Detects corners on the first frame and opens one track per corner.
TrackSet start_tracks(const GrayImage& frame, int frame_idx, const TrackerConfig& cfg, FrameResult* result = nullptr);

/// Advances every Active track to `frame`. Throws Errc::FrameOrder unless
/// frame_idx is past the last processed frame.
/// When `candidates` is given, every shortlisted placement is appended to it
/// in track order.
FrameResult step(TrackSet& set, const GrayImage& frame, int frame_idx, const TrackerConfig& cfg, int jobs = 1,
                 std::vector<CandidateRecord>* candidates = nullptr);

struct TrackRow {
  int track_id = 0;
  int frame = 0;
  double x = 0.0;
  double y = 0.0;
  TrackStatus status = TrackStatus::Active;
  double chamfer_score = kNoScore;
  double ssd_score = kNoScore;
  std::optional<Combination> combination;
};

/// Rows ordered by (frame, track_id).
using TrackLog = std::vector<TrackRow>;

TrackLog to_log(const TrackSet& set);

struct FrameSource {
  int count = 0;
  std::function<GrayImage(int)> load;
};

struct SequenceResult {
  TrackLog log;
  std::vector<FrameResult> frames;
};

/// Throws Errc::EmptySequence for zero frames.
SequenceResult run_sequence(const FrameSource& frames, const TrackerConfig& cfg, int jobs = 1,
                            std::vector<CandidateRecord>* candidates = nullptr);

}  // namespace comal

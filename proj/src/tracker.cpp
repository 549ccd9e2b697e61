#include "comal/tracker.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "comal/parallel.hpp"

namespace comal {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::vector<int> axis_origins(int len, int size, int stride) {
  if (len <= size) return {0};
  std::vector<int> out;
  for (int o = 0; o + size < len; o += stride) out.push_back(o);
  if (out.back() != len - size) out.push_back(len - size);
  return out;
}

bool on_border(PixelCoord p, const Rect& r) {
  return p.x == r.x0 || p.y == r.y0 || p.x == r.x_end() - 1 || p.y == r.y_end() - 1;
}

// Contour points within `half` indices of idx (whole contour if shorter),
// in contour order starting at idx - half, without points on the raster
// border (those trace the raster edge, not a level line).
std::vector<PixelCoord> arc_around(const Contour& c, int idx, int half, const Rect& raster) {
  const int n = static_cast<int>(c.size());
  int first = 0, count = n;
  if (2 * half + 1 < n) {
    first = ((idx - half) % n + n) % n;
    count = 2 * half + 1;
  }
  std::vector<PixelCoord> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const PixelCoord p = c.points[(first + i) % n];
    if (!on_border(p, raster)) out.push_back(p);
  }
  return out;
}

int nearest_index(const Contour& c, PixelCoord p) {
  int best = 0;
  long best_d = std::numeric_limits<long>::max();
  for (int i = 0; i < static_cast<int>(c.size()); ++i) {
    const PixelCoord d = c.points[i] - p;
    const long dd = long(d.x) * d.x + long(d.y) * d.y;
    if (dd < best_d) {
      best_d = dd;
      best = i;
    }
  }
  return best;
}

int arc_half(const TrackerConfig& cfg) { return static_cast<int>(std::floor(cfg.template_arc_factor * cfg.scale)); }

CornerParams detection_params(const TrackerConfig& cfg) {
  CornerParams p = cfg.detect;
  p.scale = cfg.scale;
  p.patch_size = cfg.patch_size;
  return p;
}

// Corners in detection order, capped to the `limit` strongest (0 = all).
std::vector<std::size_t> strongest(const std::vector<CornerPoint>& corners, std::size_t limit) {
  std::vector<std::size_t> order(corners.size());
  std::iota(order.begin(), order.end(), 0);
  if (limit == 0 || limit >= order.size()) return order;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return corners[a].cornerness > corners[b].cornerness; });
  order.resize(limit);
  std::sort(order.begin(), order.end());
  return order;
}

Track open_track(int id, int frame_idx, const CornerPoint& c, const TrackerConfig& cfg, const Rect& frame_rect) {
  Track t;
  t.id = id;
  t.position = c.position;
  t.cornerness = c.cornerness;
  t.arc = arc_around(c.segment->contour, c.index, arc_half(cfg), frame_rect);
  t.patch = c.patch;
  t.history.push_back({frame_idx, c.position, TrackStatus::Active, kNoScore, kNoScore, std::nullopt});
  return t;
}

struct Outcome {
  bool matched = false;
  PixelCoord position;
  double chamfer_score = kNoScore;
  double ssd_score = kNoScore;
  std::optional<Combination> combination;
  std::vector<PixelCoord> arc;
  SupportPatch patch;
  double chamfer_ms = 0.0;
  double ssd_ms = 0.0;
  std::vector<CandidateRecord> records;
};

Outcome advance(const Track& track, const GrayImage& frame, const MserTile& tile, const Rect& search,
                const TrackerConfig& cfg, bool record) {
  Outcome out;
  auto t0 = Clock::now();
  const auto cands = shortlist(track, tile, search, cfg);
  out.chamfer_ms = ms_since(t0);
  if (cands.empty()) return out;
  out.chamfer_score = cands.front().chamfer_score;

  t0 = Clock::now();
  std::vector<SupportPatch> patches;
  patches.reserve(cands.size());
  for (const auto& c : cands) {
    const auto& tc = tile.contours[c.contour];
    patches.push_back(make_support_patch(frame, c.position, tc.region, tc.contour, cfg.patch_size,
                                         cfg.detect.min_side_pixels));
  }
  const auto best = verify_candidates(track.patch, patches, std::numeric_limits<double>::infinity(), cfg.min_overlap);
  out.ssd_ms = ms_since(t0);
  if (record) {
    for (std::size_t i = 0; i < cands.size(); ++i) {
      CandidateRecord r;
      r.track_id = track.id;
      r.rank = static_cast<int>(i);
      r.candidate = cands[i];
      try {
        const auto m = part_ssd_match(track.patch, patches[i], cfg.min_overlap);
        r.ssd_score = m.score;
        r.combination = m.combination;
      } catch (const Error&) {
      }
      r.selected = best && best->index == i && best->match.score <= cfg.ssd_threshold;
      out.records.push_back(r);
    }
  }
  if (!best) return out;
  const Candidate& c = cands[best->index];
  out.chamfer_score = c.chamfer_score;
  out.ssd_score = best->match.score;
  out.combination = best->match.combination;
  if (best->match.score > cfg.ssd_threshold) return out;

  const auto& tc = tile.contours[c.contour];
  out.matched = true;
  out.position = c.position;
  out.arc = arc_around(tc.contour, nearest_index(tc.contour, c.position), arc_half(cfg), tile.rect);
  out.patch = std::move(patches[best->index]);
  return out;
}

}  // namespace

void validate(const TrackerConfig& cfg) {
  auto bad = [](const std::string& what) { throw Error(Errc::BadConfig, what); };
  if (cfg.patch_size < 3 || cfg.patch_size % 2 == 0) bad("tracker.patch_size must be odd and >= 3");
  if (cfg.search_radius < cfg.patch_size / 2) bad("tracker.search_radius must be at least half the patch size");
  if (!(cfg.scale > 0)) bad("tracker.scale must be positive");
  if (!(cfg.template_arc_factor > 0)) bad("tracker.template_arc_factor must be positive");
  if (!(cfg.chamfer_threshold >= 0)) bad("tracker.chamfer_threshold must be >= 0");
  if (!(cfg.ssd_threshold >= 0)) bad("tracker.ssd_threshold must be >= 0");
  if (cfg.min_overlap < 1) bad("tracker.min_overlap must be >= 1");
  if (cfg.top_k < 1) bad("tracker.top_k must be >= 1");
  if (cfg.max_misses < 1) bad("tracker.max_misses must be >= 1");
  if (cfg.redetect_interval < 0) bad("tracker.redetect_interval must be >= 0");
  if (cfg.min_spawn_dist < 0) bad("tracker.min_spawn_dist must be >= 0");
  if (cfg.max_tracks < 0) bad("tracker.max_tracks must be >= 0");
  const int window = 2 * cfg.search_radius + 1;
  if (cfg.tile_size < window) bad("tracker.tile_size must hold a whole search window");
  if (cfg.tile_stride < 1 || cfg.tile_stride > cfg.tile_size - window + 1)
    bad("tracker.tile_stride must leave tile overlap of at least one search window");
  if (cfg.detect.min_side_pixels < 0) bad("comal.min_side_pixels must be >= 0");
  if (!(cfg.detect.cornerness_threshold >= 0)) bad("comal.cornerness_threshold must be >= 0");
  for (const MserParams* m : {&cfg.detect.mser, &cfg.track_mser}) {
    if (m->delta < 1) bad("mser delta must be >= 1");
    if (m->min_area < 1 || (m->max_area > 0 && m->max_area < m->min_area)) bad("mser area bounds are inconsistent");
  }
}

StageTimings& StageTimings::operator+=(const StageTimings& o) {
  detect_ms += o.detect_ms;
  mser_ms += o.mser_ms;
  chamfer_ms += o.chamfer_ms;
  ssd_ms += o.ssd_ms;
  return *this;
}

std::vector<Rect> tile_grid(int width, int height, int size, int stride) {
  std::vector<Rect> out;
  const int tw = std::min(size, width), th = std::min(size, height);
  for (int y : axis_origins(height, size, stride))
    for (int x : axis_origins(width, size, stride)) out.push_back({x, y, tw, th});
  return out;
}

MserTile extract_tile(const GrayImage& frame, const Rect& rect, const MserParams& params) {
  MserTile tile;
  tile.rect = rect;
  tile.ready = true;
  const GrayImage img = frame.block(rect.y0, rect.x0, rect.h, rect.w);
  for (auto& r : detect_msers(img, params, {rect.x0, rect.y0})) {
    Contour c = trace_boundary(r);
    if (c.size() < 3) continue;
    const Rect bbox = r.bbox;
    tile.contours.push_back({std::move(r), std::move(c), bbox});
  }
  return tile;
}

MserWindowCache empty_mser_windows(const GrayImage& frame, const TrackerConfig& cfg) {
  MserWindowCache cache;
  const int w = static_cast<int>(frame.cols()), h = static_cast<int>(frame.rows());
  for (const Rect& r : tile_grid(w, h, cfg.tile_size, cfg.tile_stride)) cache.tiles.push_back({r, false, {}});
  cache.cols = static_cast<int>(axis_origins(w, cfg.tile_size, cfg.tile_stride).size());
  cache.rows = static_cast<int>(axis_origins(h, cfg.tile_size, cfg.tile_stride).size());
  return cache;
}

void fill_tiles(MserWindowCache& cache, const GrayImage& frame, const std::vector<int>& which,
                const MserParams& params, int jobs) {
  parallel_for(which.size(), jobs, [&](std::size_t i) {
    MserTile& t = cache.tiles[which[i]];
    if (!t.ready) t = extract_tile(frame, t.rect, params);
  });
}

MserWindowCache precompute_mser_windows(const GrayImage& frame, const TrackerConfig& cfg, int jobs) {
  auto cache = empty_mser_windows(frame, cfg);
  std::vector<int> all(cache.tiles.size());
  std::iota(all.begin(), all.end(), 0);
  fill_tiles(cache, frame, all, cfg.track_mser, jobs);
  return cache;
}

int select_tile(const MserWindowCache& cache, const Rect& search) {
  int best = -1;
  long best_d = std::numeric_limits<long>::max();
  for (int i = 0; i < static_cast<int>(cache.tiles.size()); ++i) {
    const Rect& t = cache.tiles[i].rect;
    if (!t.contains(search)) continue;
    const long dx = long(2 * t.x0 + t.w) - (2 * search.x0 + search.w);
    const long dy = long(2 * t.y0 + t.h) - (2 * search.y0 + search.h);
    if (dx * dx + dy * dy < best_d) {
      best_d = dx * dx + dy * dy;
      best = i;
    }
  }
  if (best >= 0) return best;
  int best_area = -1;
  for (int i = 0; i < static_cast<int>(cache.tiles.size()); ++i) {
    const Rect o = intersect(cache.tiles[i].rect, search);
    const int area = o.empty() ? 0 : o.w * o.h;
    if (area > best_area) {
      best_area = area;
      best = i;
    }
  }
  return best;
}

Rect search_rect(PixelCoord position, int radius, int width, int height) {
  return clamp_rect(centered_rect(position, radius), width, height);
}

std::vector<Candidate> shortlist(const Track& track, const MserTile& tile, const Rect& search,
                                 const TrackerConfig& cfg) {
  std::vector<Candidate> pool;
  if (track.arc.empty()) return pool;
  std::vector<PixelCoord> tmpl;
  tmpl.reserve(track.arc.size());
  for (auto p : track.arc) tmpl.push_back(p - track.position);
  const Rect s = intersect(search, tile.rect);
  if (s.empty()) return pool;
  const Rect offsets{0, 0, s.w, s.h};
  const PixelCoord origin{s.x0, s.y0};

  // Edge points of every boundary inside the window.
  std::vector<std::vector<PixelCoord>> edges(tile.contours.size());
  std::vector<PixelCoord> all;
  for (std::size_t ci = 0; ci < tile.contours.size(); ++ci) {
    if (intersect(tile.contours[ci].bbox, s).empty()) continue;
    for (auto p : tile.contours[ci].contour.points)
      if (s.contains(p) && !on_border(p, tile.rect)) edges[ci].push_back(p - origin);
    all.insert(all.end(), edges[ci].begin(), edges[ci].end());
  }
  if (all.empty()) return pool;

  // The distance to the union of boundaries never exceeds the distance to any
  // one of them, so offsets failing against the union fail against each
  // boundary and only the survivors need per-boundary scores.
  const auto merged = build_edge_pyramid(all, s.w, s.h, pyramid_levels_for(s.w, s.h));
  const auto reachable = hierarchical_match(tmpl, merged, offsets, cfg.chamfer_threshold);
  if (reachable.empty()) return pool;

  // Equal scores are common on rectilinear scenes; the smaller motion wins.
  auto motion = [&](PixelCoord p) {
    const PixelCoord d = p - track.position;
    return long(d.x) * d.x + long(d.y) * d.y;
  };
  const double n = static_cast<double>(tmpl.size());
  std::vector<ChamferMatch> matches;
  for (std::size_t ci = 0; ci < tile.contours.size(); ++ci) {
    const auto& e = edges[ci];
    if (e.empty()) continue;
    int x0 = s.w, y0 = s.h, x1 = -1, y1 = -1;
    for (auto p : e) {
      x0 = std::min(x0, p.x);
      y0 = std::min(y0, p.y);
      x1 = std::max(x1, p.x);
      y1 = std::max(y1, p.y);
    }
    // Cheap bound first: distance to the boundary's bounding box.
    std::vector<PixelCoord> hopeful;
    for (const auto& r : reachable) {
      double bound = 0.0;
      for (auto p : tmpl) {
        const int x = p.x + r.offset.x, y = p.y + r.offset.y;
        if (x < 0 || y < 0 || x >= s.w || y >= s.h) {
          bound += merged.max_distance;
          continue;
        }
        const int dx = x < x0 ? x0 - x : (x > x1 ? x - x1 : 0);
        const int dy = y < y0 ? y0 - y : (y > y1 ? y - y1 : 0);
        bound += std::sqrt(double(dx * dx + dy * dy));
      }
      if (bound / n <= cfg.chamfer_threshold) hopeful.push_back(r.offset);
    }
    if (hopeful.empty()) continue;
    const auto own = build_edge_pyramid(e, s.w, s.h, 1);
    matches.clear();
    for (auto o : hopeful) {
      const double score = block_lower_bound(tmpl, own, 0, o);
      if (score <= cfg.chamfer_threshold) matches.push_back({o, score});
    }
    std::sort(matches.begin(), matches.end(), [&](const ChamferMatch& a, const ChamferMatch& b) {
      if (a.score != b.score) return a.score < b.score;
      const long da = motion(a.offset + origin), db = motion(b.offset + origin);
      if (da != db) return da < db;
      if (a.offset.y != b.offset.y) return a.offset.y < b.offset.y;
      return a.offset.x < b.offset.x;
    });
    const std::size_t keep = std::min<std::size_t>(matches.size(), cfg.top_k);
    for (std::size_t m = 0; m < keep; ++m)
      pool.push_back({static_cast<int>(ci), matches[m].offset + origin, matches[m].score});
  }
  std::sort(pool.begin(), pool.end(), [&](const Candidate& a, const Candidate& b) {
    if (a.chamfer_score != b.chamfer_score) return a.chamfer_score < b.chamfer_score;
    const long da = motion(a.position), db = motion(b.position);
    if (da != db) return da < db;
    if (a.contour != b.contour) return a.contour < b.contour;
    if (a.position.y != b.position.y) return a.position.y < b.position.y;
    return a.position.x < b.position.x;
  });
  if (static_cast<int>(pool.size()) > cfg.top_k) pool.resize(cfg.top_k);
  return pool;
}

TrackSet start_tracks(const GrayImage& frame, int frame_idx, const TrackerConfig& cfg, FrameResult* result) {
  validate(cfg);
  const auto t0 = Clock::now();
  const auto corners = detect_corners(frame, detection_params(cfg));
  TrackSet set;
  for (std::size_t i : strongest(corners, static_cast<std::size_t>(cfg.max_tracks)))
    set.tracks.push_back(open_track(set.next_id++, frame_idx, corners[i], cfg, image_rect(frame)));
  set.last_frame = frame_idx;
  if (result) {
    *result = {};
    result->frame = frame_idx;
    result->spawned = static_cast<int>(set.tracks.size());
    result->timings.detect_ms = ms_since(t0);
  }
  return set;
}

FrameResult step(TrackSet& set, const GrayImage& frame, int frame_idx, const TrackerConfig& cfg, int jobs,
                 std::vector<CandidateRecord>* candidates) {
  if (frame_idx <= set.last_frame) {
    throw Error(Errc::FrameOrder, "frame " + std::to_string(frame_idx) + " does not follow frame " +
                                      std::to_string(set.last_frame));
  }
  FrameResult result;
  result.frame = frame_idx;
  const int w = static_cast<int>(frame.cols()), h = static_cast<int>(frame.rows());

  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < set.tracks.size(); ++i)
    if (set.tracks[i].status == TrackStatus::Active) active.push_back(i);

  auto t0 = Clock::now();
  auto cache = empty_mser_windows(frame, cfg);
  std::vector<Rect> searches(active.size());
  std::vector<int> tile_of(active.size());
  for (std::size_t k = 0; k < active.size(); ++k) {
    searches[k] = search_rect(set.tracks[active[k]].position, cfg.search_radius, w, h);
    tile_of[k] = select_tile(cache, searches[k]);
  }
  std::vector<int> needed(tile_of);
  std::sort(needed.begin(), needed.end());
  needed.erase(std::unique(needed.begin(), needed.end()), needed.end());
  fill_tiles(cache, frame, needed, cfg.track_mser, jobs);
  result.timings.mser_ms = ms_since(t0);

  std::vector<Outcome> outcomes(active.size());
  parallel_for(active.size(), jobs, [&](std::size_t k) {
    outcomes[k] = advance(set.tracks[active[k]], frame, cache.tiles[tile_of[k]], searches[k], cfg,
                          candidates != nullptr);
  });

  for (std::size_t k = 0; k < active.size(); ++k) {
    Track& t = set.tracks[active[k]];
    Outcome& o = outcomes[k];
    result.timings.chamfer_ms += o.chamfer_ms;
    result.timings.ssd_ms += o.ssd_ms;
    if (candidates) {
      for (auto& r : o.records) {
        r.frame = frame_idx;
        candidates->push_back(std::move(r));
      }
    }
    if (o.matched) {
      t.position = o.position;
      t.arc = std::move(o.arc);
      t.patch = std::move(o.patch);
      t.misses = 0;
      t.history.push_back({frame_idx, t.position, TrackStatus::Active, o.chamfer_score, o.ssd_score, o.combination});
      ++result.updated;
      continue;
    }
    ++t.misses;
    if (t.misses >= cfg.max_misses) {
      t.status = TrackStatus::Lost;
      ++result.lost;
    }
    t.history.push_back({frame_idx, t.position, t.status, o.chamfer_score, o.ssd_score, o.combination});
  }

  if (cfg.redetect_interval > 0 && frame_idx % cfg.redetect_interval == 0) {
    t0 = Clock::now();
    const auto corners = detect_corners(frame, detection_params(cfg));
    std::vector<PixelCoord> taken;
    for (const auto& t : set.tracks)
      if (t.status == TrackStatus::Active) taken.push_back(t.position);
    const long min_d2 = long(cfg.min_spawn_dist) * cfg.min_spawn_dist;
    std::vector<std::size_t> fresh;
    for (std::size_t i = 0; i < corners.size(); ++i) {
      const bool far = std::all_of(taken.begin(), taken.end(), [&](PixelCoord p) {
        const PixelCoord d = p - corners[i].position;
        return long(d.x) * d.x + long(d.y) * d.y > min_d2;
      });
      if (far) fresh.push_back(i);
    }
    std::size_t room = fresh.size();
    if (cfg.max_tracks > 0) room = taken.size() >= std::size_t(cfg.max_tracks) ? 0 : cfg.max_tracks - taken.size();
    std::vector<CornerPoint> pool;
    for (std::size_t i : fresh) pool.push_back(corners[i]);
    if (room > 0) {
      for (std::size_t i : strongest(pool, room == fresh.size() ? 0 : room)) {
        set.tracks.push_back(open_track(set.next_id++, frame_idx, pool[i], cfg, image_rect(frame)));
        ++result.spawned;
      }
    }
    result.timings.detect_ms = ms_since(t0);
  }
  set.last_frame = frame_idx;
  return result;
}

TrackLog to_log(const TrackSet& set) {
  TrackLog log;
  for (const auto& t : set.tracks)
    for (const auto& p : t.history)
      log.push_back({t.id, p.frame, double(p.position.x), double(p.position.y), p.status, p.chamfer_score,
                     p.ssd_score, p.combination});
  std::stable_sort(log.begin(), log.end(), [](const TrackRow& a, const TrackRow& b) {
    return a.frame != b.frame ? a.frame < b.frame : a.track_id < b.track_id;
  });
  return log;
}

SequenceResult run_sequence(const FrameSource& frames, const TrackerConfig& cfg, int jobs,
                            std::vector<CandidateRecord>* candidates) {
  if (frames.count < 1) throw Error(Errc::EmptySequence, "no frames to track");
  SequenceResult out;
  FrameResult first;
  TrackSet set = start_tracks(frames.load(0), 0, cfg, &first);
  out.frames.push_back(first);
  for (int k = 1; k < frames.count; ++k) out.frames.push_back(step(set, frames.load(k), k, cfg, jobs, candidates));
  out.log = to_log(set);
  return out;
}

}  // namespace comal

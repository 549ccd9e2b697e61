#include "comal/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace comal {
namespace {

bool inside_with_tolerance(const Point2& p, const BoxF& b, double tol) {
  return p.x() >= b.left - tol && p.y() >= b.top - tol && p.x() <= b.left + b.width + tol &&
         p.y() <= b.top + b.height + tol;
}

using Key = std::pair<int, int>;  // (track, frame)

PRResult finish(Stratum s, int correct, int total, int frames) {
  PRResult r;
  r.stratum = s;
  r.correct = correct;
  r.total = total;
  r.correct_per_frame = frames > 0 ? double(correct) / frames : 0.0;
  if (total > 0) r.precision = double(correct) / total;
  return r;
}

}  // namespace

Point2 map_point(const Point2& p, const BoxF& box_t, const BoxF& box_u) {
  if (!(box_t.width > 0 && box_t.height > 0 && box_u.width > 0 && box_u.height > 0)) {
    throw Error(Errc::BadParams, "bounding boxes need positive width and height");
  }
  if (!inside_with_tolerance(p, box_t, 1.0)) throw Error(Errc::PointOutsideBox, "point lies outside its box");
  return {box_u.left + (p.x() - box_t.left) * (box_u.width / box_t.width),
          box_u.top + (p.y() - box_t.top) * (box_u.height / box_t.height)};
}

std::vector<GtCorrespondence> ground_truth(const TrackLog& log, std::span<const BBoxAnnotation> annotations) {
  std::map<int, std::map<int, BoxF>> boxes;  // frame -> object -> box
  for (const auto& a : annotations) boxes[a.frame][a.object_id] = a.box;

  std::map<int, std::vector<const TrackRow*>> tracks;
  for (const auto& r : log) tracks[r.track_id].push_back(&r);

  std::vector<GtCorrespondence> out;
  for (auto& [id, rows] : tracks) {
    std::stable_sort(rows.begin(), rows.end(), [](const TrackRow* a, const TrackRow* b) { return a->frame < b->frame; });
    const TrackRow& birth = *rows.front();
    const Point2 p{birth.x, birth.y};
    const auto frame_boxes = boxes.find(birth.frame);
    if (frame_boxes == boxes.end()) continue;
    int owner = -1;
    double owner_area = 0.0;
    for (const auto& [obj, box] : frame_boxes->second) {
      if (!inside_with_tolerance(p, box, 1.0)) continue;
      const double area = box.width * box.height;
      if (owner < 0 || area < owner_area) {
        owner = obj;
        owner_area = area;
      }
    }
    if (owner < 0) continue;
    const BoxF& box_t = frame_boxes->second.at(owner);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      GtCorrespondence g;
      g.track_id = id;
      g.frame = rows[i]->frame;
      g.object_id = owner;
      const auto fb = boxes.find(g.frame);
      if (fb != boxes.end()) {
        const auto b = fb->second.find(owner);
        if (b != fb->second.end()) g.expected = map_point(p, box_t, b->second);
      }
      out.push_back(g);
    }
  }
  return out;
}

const char* stratum_name(Stratum s) {
  switch (s) {
    case Stratum::Boundary: return "boundary";
    case Stratum::Interior: return "interior";
    case Stratum::Overall: return "overall";
  }
  return "?";
}

BinaryMask mask_boundary(const BinaryMask& mask) {
  const int h = static_cast<int>(mask.rows()), w = static_cast<int>(mask.cols());
  BinaryMask out = BinaryMask::Zero(h, w);
  auto bg = [&](int x, int y) { return x < 0 || y < 0 || x >= w || y >= h || !mask(y, x); };
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      out(y, x) = mask(y, x) && (bg(x - 1, y) || bg(x + 1, y) || bg(x, y - 1) || bg(x, y + 1));
  return out;
}

ScoreReport score_matches(const TrackLog& predictions, std::span<const GtCorrespondence> gt,
                          const ScoreOptions& options) {
  std::map<Key, const GtCorrespondence*> by_key;
  for (const auto& g : gt) by_key[{g.track_id, g.frame}] = &g;

  std::map<int, int> birth;
  std::set<int> frames;
  for (const auto& r : predictions) {
    auto [it, fresh] = birth.emplace(r.track_id, r.frame);
    if (!fresh) it->second = std::min(it->second, r.frame);
    frames.insert(r.frame);
  }

  const bool stratified = !options.masks.empty();
  std::map<int, DistanceField> band_fields;  // frame -> distance to the mask boundary
  auto near_boundary = [&](int frame, const Point2& q) {
    if (frame < 0 || frame >= static_cast<int>(options.masks.size())) {
      throw Error(Errc::BadParams, "no foreground mask for frame " + std::to_string(frame));
    }
    auto it = band_fields.find(frame);
    if (it == band_fields.end()) {
      const BinaryMask edge = mask_boundary(options.masks[frame]);
      DistanceField d = edge.any() ? distance_transform(edge)
                                   : DistanceField::Constant(edge.rows(), edge.cols(), detail::kFar);
      it = band_fields.emplace(frame, std::move(d)).first;
    }
    const DistanceField& d = it->second;
    const int x = std::clamp<int>(static_cast<int>(std::lround(q.x())), 0, static_cast<int>(d.cols()) - 1);
    const int y = std::clamp<int>(static_cast<int>(std::lround(q.y())), 0, static_cast<int>(d.rows()) - 1);
    return d(y, x) <= options.band;
  };

  int correct[3] = {0, 0, 0}, total[3] = {0, 0, 0};
  ScoreReport report;
  for (const auto& r : predictions) {
    if (r.status != TrackStatus::Active || r.frame == birth[r.track_id]) continue;
    const auto it = by_key.find({r.track_id, r.frame});
    if (it == by_key.end()) {
      ++report.missing_gt;
      ++total[int(Stratum::Overall)];
      continue;
    }
    if (!it->second->expected) continue;
    const Point2& e = *it->second->expected;
    const bool ok = std::hypot(r.x - e.x(), r.y - e.y()) <= options.tolerance;
    correct[int(Stratum::Overall)] += ok;
    ++total[int(Stratum::Overall)];
    if (stratified) {
      const int s = int(near_boundary(r.frame, e) ? Stratum::Boundary : Stratum::Interior);
      correct[s] += ok;
      ++total[s];
    }
  }
  report.frames = frames.empty() ? 0 : static_cast<int>(frames.size()) - 1;
  report.strata.push_back(finish(Stratum::Overall, correct[2], total[2], report.frames));
  if (stratified) {
    report.strata.push_back(finish(Stratum::Boundary, correct[0], total[0], report.frames));
    report.strata.push_back(finish(Stratum::Interior, correct[1], total[1], report.frames));
  }
  return report;
}

std::vector<SweepRow> sweep_operating_points(std::span<const SweepSetting> settings,
                                             std::span<const BBoxAnnotation> annotations,
                                             const ScoreOptions& options) {
  if (settings.size() < 2) throw Error(Errc::BadParams, "an operating-point sweep needs at least two settings");
  std::vector<SweepRow> out;
  for (const auto& s : settings) {
    const auto gt = ground_truth(s.log, annotations);
    out.push_back({s.threshold, score_matches(s.log, gt, options).strata.front()});
  }
  return out;
}

}  // namespace comal

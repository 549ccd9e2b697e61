// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Library checks run in process against brute-force oracles; the determinism
// and benchmark criteria drive the comal executable.

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>

#include "comal/chamfer.hpp"
#include "comal/eval.hpp"
#include "comal/klt.hpp"
#include "comal/mser.hpp"
#include "comal/part_ssd.hpp"
#include "comal/synth.hpp"
#include "comal/tracker.hpp"
#include "oracles.hpp"

using namespace comal;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// ---------------------------------------------------------------- 1

int alive_node(const ComponentTree& tree, int x, int y, int t) {
  int n = tree.leaf_of(x, y);
  while (tree.node(n).parent >= 0 && tree.node(tree.node(n).parent).level <= t) n = tree.node(n).parent;
  return n;
}

Outcome mser_oracle() {
  std::mt19937_64 rng(1);
  long mismatches = 0, components = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int levels = trial % 4 == 0 ? 256 : (trial % 4 == 1 ? 16 : 4);
    const GrayImage img = oracle::random_image(rng, 24, 24, levels);
    const ComponentTree tree = build_component_tree(img, Polarity::Dark);
    for (int t = 0; t < 256; ++t) {
      int count = 0;
      const auto label = oracle::flood_labels(img, t, &count);
      std::vector<int> node_of(count, -1), size(count, 0);
      for (int i = 0; i < 24 * 24; ++i) {
        if (label[i] < 0) continue;
        const int n = alive_node(tree, i % 24, i / 24, t);
        if (node_of[label[i]] < 0) node_of[label[i]] = n;
        mismatches += node_of[label[i]] != n;
        ++size[label[i]];
      }
      std::set<int> distinct;
      for (int c = 0; c < count; ++c) {
        distinct.insert(node_of[c]);
        mismatches += tree.node(node_of[c]).area != size[c];
        // Membership both ways: no pixel outside the flood component is in the node.
        for (int i = 0; i < 24 * 24; ++i) mismatches += tree.contains(node_of[c], i % 24, i / 24) != (label[i] == c);
      }
      mismatches += static_cast<long>(distinct.size()) != count;
      components += count;
    }
  }
  return {mismatches == 0, std::to_string(components) + " components checked, " + std::to_string(mismatches) +
                               " mismatches"};
}

// ---------------------------------------------------------------- 2

std::vector<PixelCoord> random_edges(std::mt19937_64& rng, int w, int h) {
  std::vector<PixelCoord> pts;
  const int strokes = 2 + static_cast<int>(rng() % 4);
  for (int s = 0; s < strokes; ++s) {
    PixelCoord p{static_cast<int>(rng() % w), static_cast<int>(rng() % h)};
    const int len = 8 + static_cast<int>(rng() % 30);
    const int dir = static_cast<int>(rng() % 4);
    for (int i = 0; i < len; ++i) {
      pts.push_back(p);
      if (rng() % 3 == 0) {
        p.x += static_cast<int>(rng() % 3) - 1;
      } else {
        p.x += dir == 0 ? 1 : (dir == 1 ? -1 : 0);
        p.y += dir == 2 ? 1 : (dir == 3 ? -1 : 0);
      }
      p.x = std::clamp(p.x, 0, w - 1);
      p.y = std::clamp(p.y, 0, h - 1);
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

Outcome chamfer_oracle() {
  std::mt19937_64 rng(2);
  const int w = 64, h = 64;
  int bad = 0, matches = 0, minima = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto edges = random_edges(rng, w, h);
    const std::size_t start = rng() % edges.size();
    const std::size_t n = 10 + rng() % 30;
    std::vector<PixelCoord> tmpl;
    const PixelCoord hidden{static_cast<int>(rng() % 20), static_cast<int>(rng() % 20)};
    for (std::size_t i = 0; i < std::min(edges.size(), n); ++i) {
      PixelCoord p = edges[(start + i) % edges.size()];
      if (rng() % 4 == 0) p = p + PixelCoord{static_cast<int>(rng() % 3) - 1, static_cast<int>(rng() % 3) - 1};
      tmpl.push_back(p - hidden);
    }
    const double threshold = 0.5 + static_cast<double>(rng() % 40) / 10.0;
    const Rect offsets{-8, -8, 40, 40};

    // Nearest-edge table straight from the edge list; off-field points cost its maximum.
    std::vector<double> table(w * h);
    double worst = 0.0;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        long best = std::numeric_limits<long>::max();
        for (auto e : edges) best = std::min(best, long(e.x - x) * (e.x - x) + long(e.y - y) * (e.y - y));
        table[y * w + x] = std::sqrt(static_cast<double>(best));
        worst = std::max(worst, table[y * w + x]);
      }
    std::map<std::pair<int, int>, double> brute;
    double global = std::numeric_limits<double>::infinity();
    for (int dy = offsets.y0; dy < offsets.y_end(); ++dy)
      for (int dx = offsets.x0; dx < offsets.x_end(); ++dx) {
        double sum = 0.0;
        for (auto p : tmpl) {
          const int x = p.x + dx, y = p.y + dy;
          sum += x >= 0 && y >= 0 && x < w && y < h ? table[y * w + x] : worst;
        }
        const double s = sum / static_cast<double>(tmpl.size());
        brute[{dx, dy}] = s;
        global = std::min(global, s);
      }

    const auto pyr = build_edge_pyramid(edges, w, h, pyramid_levels_for(w, h));
    const auto got = hierarchical_match(tmpl, pyr, offsets, threshold);
    for (const auto& m : got) {
      ++matches;
      const auto it = brute.find({m.offset.x, m.offset.y});
      if (it == brute.end() || it->second != m.score || m.score > threshold) ++bad;
    }
    // Completeness: every offset within the threshold comes back.
    long expected = 0;
    for (const auto& [o, s] : brute) expected += s <= threshold;
    if (expected != static_cast<long>(got.size())) ++bad;
    if (global <= threshold) {
      ++minima;
      if (got.empty() || got.front().score != global) ++bad;
    }
  }
  return {bad == 0, std::to_string(matches) + " matches, " + std::to_string(minima) + " minima within threshold, " +
                        std::to_string(bad) + " failures"};
}

// ---------------------------------------------------------------- 3

SupportPatch split_patch(const GrayImage& pixels, PixelCoord c, int a, int b) {
  SupportPatch p;
  p.pixels = pixels;
  p.rect = {c.x - 20, c.y - 20, 41, 41};
  p.center = c;
  p.side_a = BinaryMask::Zero(41, 41);
  p.side_b = BinaryMask::Zero(41, 41);
  for (int y = 0; y < 41; ++y)
    for (int x = 0; x < 41; ++x) {
      const int s = a * (x - 20) + b * (y - 20);
      if (s < 0) p.side_a(y, x) = true;
      if (s > 0) p.side_b(y, x) = true;
    }
  return p;
}

Outcome background_invariance() {
  std::mt19937_64 rng(3);
  int bad = 0;
  double min_full = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 50; ++trial) {
    int a = static_cast<int>(rng() % 5) - 2, b = static_cast<int>(rng() % 5) - 2;
    if (a == 0 && b == 0) b = 1;
    const auto p = split_patch(oracle::random_image(rng, 41, 41), {80, 60}, a, b);
    auto q = p;
    q.center = {80 + static_cast<int>(rng() % 11) - 5, 60 + static_cast<int>(rng() % 11) - 5};
    q.rect = {q.center.x - 20, q.center.y - 20, 41, 41};
    for (int i = 0; i < q.pixels.size(); ++i)
      if (q.side_b.data()[i]) q.pixels.data()[i] = static_cast<std::uint8_t>(rng() % 256);
    // Pixels on the line stay; it belongs to neither side.
    const auto r = part_ssd_match(p, q);
    const auto full = full_patch_ssd(p, q);
    if (r.score != 0.0 || r.combination != Combination::AA || !full || !(full->score > 0.0)) ++bad;
    if (full) min_full = std::min(min_full, full->score);
  }
  return {bad == 0,
          std::to_string(50 - bad) + "/50 pairs at score 0 via AA, smallest full SSD " + fmt("%.1f", min_full)};
}

// ---------------------------------------------------------------- 4

struct Survival {
  int corners = 0;
  int tracker_kept = 0;
  int tracker_correct = 0;
  int tracker_scored = 0;
  int klt_kept = 0;
};

// Distance from each pixel to the nearest foreground pixel that touches the
// background, by brute force over the boundary list.
std::vector<double> band_distance(const BinaryMask& m) {
  const int w = static_cast<int>(m.cols()), h = static_cast<int>(m.rows());
  std::vector<PixelCoord> edge;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (m(y, x) && (x == 0 || y == 0 || x == w - 1 || y == h - 1 || !m(y, x - 1) || !m(y, x + 1) ||
                      !m(y - 1, x) || !m(y + 1, x)))
        edge.push_back({x, y});
  std::vector<double> d(w * h, std::numeric_limits<double>::infinity());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (auto e : edge) d[y * w + x] = std::min(d[y * w + x], std::hypot(double(e.x - x), double(e.y - y)));
  return d;
}

Survival boundary_survival(std::uint64_t seed) {
  SynthSpec spec;  // 320x240, 30 frames, 60x60 object at 2 px/frame, background redrawn every frame
  spec.seed = seed;
  const auto seq = synth_sequence(spec);
  const FrameSource src{spec.frames, [&](int k) { return seq.frames[k]; }};
  const TrackerConfig cfg;
  const double tol = 15.0;
  const int last = spec.frames - 1;
  // Doubles throughout: Eigen treats a two-int constructor of a 2-vector specially.
  auto expected = [&](Point2 p0, int k) {
    return Point2(p0.x() + double(spec.velocity.x) * k, p0.y() + double(spec.velocity.y) * k);
  };

  const TrackSet seeds = start_tracks(seq.frames[0], 0, cfg);
  const auto dist = band_distance(seq.masks[0]);
  std::vector<Point2> starts;
  for (const auto& t : seeds.tracks) {
    const PixelCoord p = t.position;
    if (seq.masks[0](p.y, p.x) && dist[p.y * spec.width + p.x] <= 5.0) starts.push_back({double(p.x), double(p.y)});
  }

  Survival s;
  s.corners = static_cast<int>(starts.size());
  const auto tracked = run_sequence(src, cfg);
  std::map<int, Point2> birth;
  for (const auto& r : tracked.log)
    if (r.frame == 0)
      for (const auto& p : starts)
        if (p.x() == r.x && p.y() == r.y) birth[r.track_id] = p;
  for (const auto& r : tracked.log) {
    const auto it = birth.find(r.track_id);
    if (it == birth.end() || r.frame == 0 || r.status != TrackStatus::Active) continue;
    const bool ok = (Point2(r.x, r.y) - expected(it->second, r.frame)).norm() <= tol;
    ++s.tracker_scored;
    s.tracker_correct += ok;
    s.tracker_kept += ok && r.frame == last;
  }

  const TrackLog klt = klt_sequence(src, starts, KltConfig{});
  for (const auto& r : klt)
    if (r.frame == last && r.status == TrackStatus::Active)
      s.klt_kept += (Point2(r.x, r.y) - expected(starts[r.track_id], r.frame)).norm() <= tol;
  return s;
}

Outcome survival_experiment() {
  Survival total;
  std::string per_seed;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Survival s = boundary_survival(seed);
    total.corners += s.corners;
    total.tracker_kept += s.tracker_kept;
    total.tracker_correct += s.tracker_correct;
    total.tracker_scored += s.tracker_scored;
    total.klt_kept += s.klt_kept;
    std::printf("    seed %d: %d boundary corners, tracker kept %d, KLT kept %d\n", int(seed), s.corners,
                s.tracker_kept, s.klt_kept);
  }
  const double kept = double(total.tracker_kept) / total.corners;
  const double precision = total.tracker_scored ? double(total.tracker_correct) / total.tracker_scored : 0.0;
  const double klt = double(total.klt_kept) / total.corners;
  return {total.corners > 0 && kept >= 0.8 && precision >= 0.9 && klt <= 0.5,
          std::to_string(total.corners) + " corners over 5 seeds: tracker retains " + fmt("%.3f", kept) +
              " at precision " + fmt("%.3f", precision) + ", KLT retains " + fmt("%.3f", klt)};
}

// ---------------------------------------------------------------- 5

GrayImage textured_scene(int w, int h, std::uint64_t seed) {
  SynthSpec spec;
  spec.width = w;
  spec.height = h;
  spec.frames = 1;
  spec.seed = seed;
  spec.background = BackgroundMode::Static;
  spec.start = {w / 2 - 30, h / 2 - 30};
  return synth_sequence(spec).frames.front();
}

Outcome static_and_shift() {
  const TrackerConfig cfg;
  int tracks = 0, still = 0, interior = 0, exact = 0;
  bool shift_ok = true;
  for (std::uint64_t seed : {3, 4, 5}) {
    const GrayImage f = textured_scene(320, 240, seed);
    TrackSet set = start_tracks(f, 0, cfg);
    step(set, f, 1, cfg);
    for (const auto& t : set.tracks) {
      ++tracks;
      still += t.status == TrackStatus::Active && t.history.back().position == t.history.front().position;
    }

    const GrayImage big = textured_scene(400, 320, seed);
    const GrayImage f0 = big.block(20, 20, 240, 320);
    const GrayImage f1 = big.block(18, 17, 240, 320);  // content moves by (3, 2)
    TrackSet moved = start_tracks(f0, 0, cfg);
    step(moved, f1, 1, cfg);
    int in = 0, ex = 0;
    for (const auto& t : moved.tracks) {
      const PixelCoord p = t.history[0].position;
      if (!image_rect(f0).contains(centered_rect(p, cfg.search_radius))) continue;
      ++in;
      ex += t.status == TrackStatus::Active && t.history[1].position - p == PixelCoord{3, 2};
    }
    shift_ok = shift_ok && in > 0 && ex >= 0.95 * in;
    interior += in;
    exact += ex;
  }
  return {tracks > 0 && still == tracks && shift_ok,
          std::to_string(still) + "/" + std::to_string(tracks) + " static tracks unmoved, " + std::to_string(exact) +
              "/" + std::to_string(interior) + " interior tracks at exactly (3, 2)"};
}

// ---------------------------------------------------------------- 6

double smooth(double x, double y) {
  return 128 + 60 * std::sin(x / 7.0) * std::cos(y / 9.0) + 30 * std::sin((x + 2 * y) / 11.0);
}

double lerp_at(const FloatImage& img, double x, double y) {
  const double fx = std::floor(x), fy = std::floor(y);
  const int x0 = int(fx), y0 = int(fy);
  const double ax = x - fx, ay = y - fy;
  auto at = [&](int xx, int yy) { return img(std::min<int>(yy, img.rows() - 1), std::min<int>(xx, img.cols() - 1)); };
  return (1 - ax) * (1 - ay) * at(x0, y0) + ax * (1 - ay) * at(x0 + 1, y0) + (1 - ax) * ay * at(x0, y0 + 1) +
         ax * ay * at(x0 + 1, y0 + 1);
}

Outcome klt_correctness() {
  FloatImage prev(100, 120), next(100, 120);
  for (int y = 0; y < 100; ++y)
    for (int x = 0; x < 120; ++x) prev(y, x) = smooth(x, y);
  next = prev;
  for (int y = 0; y < 100; ++y)
    for (int x = 1; x < 120; ++x)
      if (y >= 1) next(y, x) = lerp_at(prev, x - 0.5, y - 0.25);
  double worst_shift = 0.0;
  bool converged = true;
  for (Point2 p : {Point2{60, 50}, Point2{45.5, 40.25}, Point2{70, 55}}) {
    const auto r = klt_track_point(prev, next, p, KltConfig{});
    converged = converged && r.converged;
    worst_shift = std::max(worst_shift, (r.position - p - Point2(0.5, 0.25)).norm());
  }

  const auto grad = central_gradient(prev);
  double worst_grad = 0.0;
  for (Point2 p : {Point2{40, 40}, Point2{37.3, 41.8}, Point2{61.7, 52.4}}) {
    const KltTemplate t = make_template(prev, grad, p, 21);
    for (int v = 0; v < 21; ++v)
      for (int u = 0; u < 21; ++u) {
        const double x = p.x() + u - 10, y = p.y() + v - 10;
        const double fx = 0.5 * (lerp_at(prev, x + 1, y) - lerp_at(prev, x - 1, y));
        const double fy = 0.5 * (lerp_at(prev, x, y + 1) - lerp_at(prev, x, y - 1));
        worst_grad = std::max({worst_grad, std::abs(t.gx(v, u) - fx), std::abs(t.gy(v, u) - fy)});
      }
  }

  bool singular = false;
  const FloatImage flat = FloatImage::Constant(80, 80, 100);
  try {
    klt_track_point(flat, flat, {40.0, 40.0}, KltConfig{});
  } catch (const Error& e) {
    singular = e.code() == Errc::SingularHessian;
  }
  return {converged && worst_shift <= 0.1 && worst_grad <= 1e-6 && singular,
          "shift error " + fmt("%.4f", worst_shift) + " px, gradient error " + fmt("%.2e", worst_grad) +
              (singular ? ", flat patch raises SingularHessian" : ", flat patch did not raise SingularHessian")};
}

// ---------------------------------------------------------------- 7, 8

struct Workdir {
  fs::path path;
  Workdir() {
    path = fs::temp_directory_path() / ("comal_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~Workdir() { fs::remove_all(path); }
};

int run(const std::string& args) {
  const std::string cmd = std::string("\"") + COMAL_EXE + "\" " + args + " >/dev/null 2>&1";
  return std::system(cmd.c_str());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome bench_ratio(const Workdir& wd) {
  const fs::path cfg = wd.path / "bench.cfg";
  std::ofstream(cfg) << "synth.width = 640\nsynth.height = 480\nsynth.frames = 6\nsynth.background = static\n"
                        "synth.start_x = 200\nsynth.start_y = 200\ntracker.max_tracks = 200\n";
  const fs::path dir = wd.path / "bench_seq", report = wd.path / "bench.json";
  if (run("--config " + cfg.string() + " --out " + dir.string() + " synth") != 0) return {false, "synth failed"};
  if (run("--config " + cfg.string() + " --out " + report.string() + " bench " + dir.string() + "/frames.txt") != 0)
    return {false, "bench failed"};
  const auto j = nlohmann::json::parse(slurp(report));
  const double ratio = j.at("ratio").get<double>();
  const int tracks = j.at("frames").at(0).at("tracks").get<int>();
  return {tracks == 200 && ratio <= 0.5,
          std::to_string(tracks) + " tracks, median track " + fmt("%.1f", j.at("median_track_ms").get<double>()) +
              " ms vs detect+match " + fmt("%.1f", j.at("median_redetect_ms").get<double>()) + " ms, ratio " +
              fmt("%.3f", ratio)};
}

Outcome determinism(const Workdir& wd) {
  const fs::path dir = wd.path / "det_seq";
  if (run("--seed 7 --out " + dir.string() + " synth") != 0) return {false, "synth failed"};
  std::vector<std::string> outputs;
  for (const char* jobs : {"1", "1", "1", "4"}) {
    const fs::path out = wd.path / ("track_" + std::to_string(outputs.size()) + ".csv");
    if (run(std::string("--jobs ") + jobs + " --out " + out.string() + " track " + dir.string() + "/frames.txt") != 0)
      return {false, "track failed"};
    outputs.push_back(slurp(out));
  }
  const bool same = std::all_of(outputs.begin(), outputs.end(), [&](const std::string& s) { return s == outputs[0]; });
  const long rows = std::count(outputs[0].begin(), outputs[0].end(), '\n') - 1;
  return {same && rows > 0, std::to_string(rows) + " rows, " +
                                (same ? "identical over 3 reruns and --jobs 4" : "outputs differ")};
}

// ---------------------------------------------------------------- 9

TrackRow row(int id, int frame, double x, double y, TrackStatus s = TrackStatus::Active) {
  TrackRow r;
  r.track_id = id;
  r.frame = frame;
  r.x = x;
  r.y = y;
  r.status = s;
  return r;
}

Outcome eval_protocol() {
  // Object 1 moves 2 px right per frame over frames 0..3; frame 4 has no box.
  std::vector<BBoxAnnotation> boxes;
  for (int k = 0; k < 4; ++k) boxes.push_back({k, 1, {10.0 + 2 * k, 10.0, 50.0, 50.0}});
  // Scored rows: exact, 15 px, 15 px, 16 px off -> 3 of 4.
  const TrackLog log{
      row(0, 0, 20, 20),     row(1, 0, 40, 30), row(2, 0, 30, 50),
      row(0, 1, 22, 20),     row(1, 1, 57, 30), row(2, 1, 30, 50, TrackStatus::Lost),
      row(0, 2, 33, 32),     row(1, 2, 57, 30, TrackStatus::Lost),
      row(0, 3, 26, 36),     row(0, 4, 28, 20),
  };
  const auto rep = score_matches(log, ground_truth(log, boxes));
  const PRResult& r = rep.strata.at(0);
  const bool fixture = r.correct == 3 && r.total == 4 && r.precision && *r.precision == 0.75;

  // Strata on a real sequence: boundary + interior must add up to overall.
  SynthSpec spec;
  spec.frames = 8;
  spec.seed = 2;
  const auto seq = synth_sequence(spec);
  const FrameSource src{spec.frames, [&](int k) { return seq.frames[k]; }};
  const auto tracked = run_sequence(src, TrackerConfig{});
  ScoreOptions opt;
  opt.masks = seq.masks;
  const auto strata = score_matches(tracked.log, ground_truth(tracked.log, seq.annotations), opt);
  std::map<Stratum, PRResult> by;
  for (const auto& s : strata.strata) by[s.stratum] = s;
  const bool sums = by.size() == 3 && by[Stratum::Overall].correct > 0 &&
                    by[Stratum::Boundary].correct + by[Stratum::Interior].correct == by[Stratum::Overall].correct;
  return {fixture && sums, "fixture " + std::to_string(r.correct) + "/" + std::to_string(r.total) +
                               ", strata " + std::to_string(by[Stratum::Boundary].correct) + " + " +
                               std::to_string(by[Stratum::Interior].correct) + " = " +
                               std::to_string(by[Stratum::Overall].correct) + " correct"};
}

}  // namespace

int main() {
  const Workdir wd;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"MSER tree equals per-threshold flood fill (limit 10 s)", mser_oracle},
      {"hierarchical chamfer equals the exhaustive scan (limit 30 s)", chamfer_oracle},
      {"part SSD ignores a replaced side", background_invariance},
      {"boundary corners survive a changing background (limit 60 s)", survival_experiment},
      {"static frames and a (3, 2) shift", static_and_shift},
      {"KLT sub-pixel, gradients, singular Hessian", klt_correctness},
      {"tracking costs at most half of detect+match", [&] { return bench_ratio(wd); }},
      {"track output is deterministic", [&] { return determinism(wd); }},
      {"evaluation fixture and strata", eval_protocol},
  };
  const double limits[] = {10, 30, 0, 60, 0, 0, 0, 0, 0};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (limits[i] > 0 && secs >= limits[i]) {
      o.pass = false;
      o.detail += ", over the time limit";
    }
    failed += !o.pass;
    std::printf("criterion %zu %s: %s: %s (%.1f s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}

#include "doctest.h"

#include <algorithm>
#include <map>
#include <random>

#include "comal/chamfer.hpp"
#include "oracles.hpp"

using namespace comal;

namespace {

DistanceField field_of(const std::vector<PixelCoord>& edges, int w, int h) {
  BinaryMask m = BinaryMask::Zero(h, w);
  for (auto p : edges) m(p.y, p.x) = true;
  return distance_transform(m);
}

// A closed rectilinear outline with a notch, anchored at (x, y).
std::vector<PixelCoord> notched_box(int x, int y, int size) {
  std::vector<PixelCoord> pts;
  for (int i = 0; i < size; ++i) {
    pts.push_back({x + i, y});
    pts.push_back({x + i, y + size - 1});
    pts.push_back({x, y + i});
    if (i < size / 3 || i > 2 * size / 3) pts.push_back({x + size - 1, y + i});
  }
  for (int i = 0; i < size / 3; ++i) {
    pts.push_back({x + size - 1 - i, y + size / 3});
    pts.push_back({x + size - 1 - i, y + 2 * size / 3});
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

std::vector<PixelCoord> shifted(std::vector<PixelCoord> pts, PixelCoord d) {
  for (auto& p : pts) p = p + d;
  return pts;
}

// Random polyline edge set inside w x h.
std::vector<PixelCoord> random_edges(std::mt19937_64& rng, int w, int h) {
  std::vector<PixelCoord> pts;
  const int strokes = 2 + static_cast<int>(rng() % 4);
  for (int s = 0; s < strokes; ++s) {
    PixelCoord p{static_cast<int>(rng() % w), static_cast<int>(rng() % h)};
    const int len = 8 + static_cast<int>(rng() % 30);
    for (int i = 0; i < len; ++i) {
      pts.push_back(p);
      const int dir = static_cast<int>(rng() % 8);
      const int dx[8] = {1, 1, 0, -1, -1, -1, 0, 1}, dy[8] = {0, 1, 1, 1, 0, -1, -1, -1};
      p = {std::clamp(p.x + dx[dir], 0, w - 1), std::clamp(p.y + dy[dir], 0, h - 1)};
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

}  // namespace

TEST_CASE("pyramid level count") {
  CHECK(pyramid_levels_for(80, 80) == 4);
  CHECK(pyramid_levels_for(81, 81) == 4);
  CHECK(pyramid_levels_for(64, 64) == 4);
  CHECK(pyramid_levels_for(63, 200) == 3);
  CHECK(pyramid_levels_for(15, 15) == 1);
  CHECK(pyramid_levels_for(16, 16) == 2);
}

TEST_CASE("edge pyramid: shapes and errors") {
  const std::vector<PixelCoord> edges{{3, 4}, {40, 70}};
  const auto pyr = build_edge_pyramid(edges, 81, 81, 4);
  REQUIRE(pyr.num_levels() == 4);
  CHECK(pyr.levels[0].rows() == 81);
  CHECK(pyr.levels[1].rows() == 82);
  CHECK(pyr.levels[3].cols() == 88);
  CHECK(pyr.levels[0](4, 3) == 0.0);
  BinaryMask m = BinaryMask::Zero(81, 81);
  for (auto p : edges) m(p.y, p.x) = true;
  CHECK(pyr.max_distance == doctest::Approx(oracle::brute_distance(m).maxCoeff()));
  CHECK_THROWS_AS(build_edge_pyramid({}, 81, 81, 4), Error);
  CHECK_THROWS_AS(build_edge_pyramid(edges, 81, 81, 5), Error);
  const std::vector<PixelCoord> outside{{81, 0}};
  CHECK_THROWS_AS(build_edge_pyramid(outside, 81, 81, 1), Error);
  try {
    build_edge_pyramid(edges, 30, 81, 4);
    FAIL("expected TooManyLevels");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::TooManyLevels);
  }
}

TEST_CASE("edge pyramid: coarse levels hold window minima of the distance field") {
  std::mt19937_64 rng(44);
  const int w = 37, h = 29;
  const auto edges = random_edges(rng, w, h);
  const auto pyr = build_edge_pyramid(edges, w, h, 3);
  BinaryMask m = BinaryMask::Zero(h, w);
  for (auto p : edges) m(p.y, p.x) = true;
  const auto ref = oracle::brute_distance(m);
  for (int k = 1; k < 3; ++k) {
    const int s = 1 << k;
    for (int y = -s + 1; y < h; ++y)
      for (int x = -s + 1; x < w; ++x) {
        double best = ref.maxCoeff();
        for (int v = std::max(0, y); v < std::min(h, y + s); ++v)
          for (int u = std::max(0, x); u < std::min(w, x + s); ++u) best = std::min(best, ref(v, u));
        CHECK(pyr.levels[k](y + s - 1, x + s - 1) == doctest::Approx(best).epsilon(1e-12));
      }
  }
}

TEST_CASE("block lower bound never exceeds a score inside the block") {
  std::mt19937_64 rng(45);
  for (int trial = 0; trial < 10; ++trial) {
    const auto edges = random_edges(rng, 40, 40);
    std::vector<PixelCoord> tmpl(edges.begin(), edges.begin() + std::min<std::size_t>(edges.size(), 15));
    const auto pyr = build_edge_pyramid(edges, 40, 40, 3);
    for (int k = 1; k < 3; ++k) {
      const int s = 1 << k;
      for (int oy = -12; oy < 12; oy += s)
        for (int ox = -12; ox < 12; ox += s) {
          const double lb = block_lower_bound(tmpl, pyr, k, {ox, oy});
          for (int dy = 0; dy < s; ++dy)
            for (int dx = 0; dx < s; ++dx)
              CHECK(lb <= chamfer_score(tmpl, pyr.levels[0], {ox + dx, oy + dy}));
        }
    }
  }
}

TEST_CASE("chamfer_score: examples") {
  const auto box = notched_box(10, 12, 20);
  const auto field = field_of(box, 48, 48);
  CHECK(chamfer_score(box, field, {0, 0}) == 0.0);

  const std::vector<PixelCoord> lone{{5, 5}};
  const std::vector<PixelCoord> probe{{4, 5}};
  CHECK(chamfer_score(probe, field_of(lone, 11, 11), {0, 0}) == 1.0);

  std::vector<PixelCoord> diag;
  for (int i = 0; i < 10; ++i) diag.push_back({5 + i, 5 + i});
  const auto target = shifted(diag, {2, 1});
  const auto tf = field_of(target, 24, 24);
  CHECK(chamfer_score(diag, tf, {1, 1}) == doctest::Approx(oracle::brute_chamfer(diag, target, 24, 24, {1, 1})));
  CHECK(chamfer_score(diag, tf, {1, 1}) > 0.0);

  CHECK_THROWS_AS(chamfer_score({}, tf, {0, 0}), Error);
}

TEST_CASE("chamfer_score: points outside the field cost the field maximum") {
  const std::vector<PixelCoord> lone{{0, 0}};
  const auto field = field_of(lone, 4, 3);
  const std::vector<PixelCoord> t{{0, 0}, {10, 10}};
  CHECK(chamfer_score(t, field, {0, 0}) == doctest::Approx(std::hypot(3.0, 2.0) / 2));
}

TEST_CASE("chamfer_score of a contour against its own field is zero") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const auto e = random_edges(rng, 40, 30);
    CHECK(chamfer_score(e, field_of(e, 40, 30), {0, 0}) == 0.0);
  }
}

TEST_CASE("chamfer_score is invariant to a common translation") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto e = shifted(random_edges(rng, 30, 30), {2, 2});
    std::vector<PixelCoord> t(e.begin(), e.begin() + std::min<std::size_t>(e.size(), 12));
    for (auto& p : t) p = p + PixelCoord{static_cast<int>(rng() % 3) - 1, static_cast<int>(rng() % 3) - 1};
    const PixelCoord d{5, 7};
    const double a = chamfer_score(t, field_of(e, 40, 40), {1, 0});
    const double b = chamfer_score(shifted(t, d), field_of(shifted(e, d), 40, 40), {1, 0});
    CHECK(a == doctest::Approx(b));
  }
}

TEST_CASE("hierarchical_match: single shape found at its true offset") {
  const auto box = notched_box(0, 0, 20);
  const auto edges = shifted(box, {27, 31});
  const auto pyr = build_edge_pyramid(edges, 81, 81, pyramid_levels_for(81, 81));
  const auto matches = hierarchical_match(box, pyr, {0, 0, 61, 61}, 2.0);
  REQUIRE(!matches.empty());
  CHECK(matches.front().offset == PixelCoord{27, 31});
  CHECK(matches.front().score == 0.0);
}

TEST_CASE("hierarchical_match: twin shapes both survive") {
  const auto box = notched_box(0, 0, 16);
  auto edges = shifted(box, {5, 8});
  const auto second = shifted(box, {50, 44});
  edges.insert(edges.end(), second.begin(), second.end());
  const auto pyr = build_edge_pyramid(edges, 80, 80, 4);
  const auto matches = hierarchical_match(box, pyr, {0, 0, 65, 65}, 1.0);
  std::vector<PixelCoord> zero;
  for (const auto& m : matches)
    if (m.score == 0.0) zero.push_back(m.offset);
  CHECK(zero == std::vector<PixelCoord>{{5, 8}, {50, 44}});
  // The brute-force scan agrees that nothing else scores zero.
  int brute_zero = 0;
  for (int dy = 0; dy < 65; ++dy)
    for (int dx = 0; dx < 65; ++dx) brute_zero += oracle::brute_chamfer(box, edges, 80, 80, {dx, dy}) == 0.0;
  CHECK(brute_zero == 2);
}

TEST_CASE("hierarchical_match: nothing within reach gives an empty list") {
  const auto box = notched_box(0, 0, 12);
  const std::vector<PixelCoord> edges{{70, 70}};
  const auto pyr = build_edge_pyramid(edges, 80, 80, 4);
  CHECK(hierarchical_match(box, pyr, {0, 0, 20, 20}, 2.0).empty());
  CHECK_THROWS_AS(hierarchical_match({}, pyr, {0, 0, 20, 20}, 2.0), Error);
}

TEST_CASE("hierarchical_match equals the exhaustive scan on random pairs") {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 25; ++trial) {
    const int w = 64, h = 64;
    const auto edges = random_edges(rng, w, h);
    // Template: a noisy chunk of the edge set moved back by a hidden offset.
    const std::size_t start = rng() % edges.size();
    std::vector<PixelCoord> tmpl;
    for (std::size_t i = 0; i < std::min<std::size_t>(edges.size(), 20); ++i) {
      PixelCoord p = edges[(start + i) % edges.size()];
      if (rng() % 4 == 0) p = p + PixelCoord{static_cast<int>(rng() % 3) - 1, static_cast<int>(rng() % 3) - 1};
      tmpl.push_back(p - PixelCoord{8, 8});
    }
    const double threshold = 0.5 + static_cast<double>(rng() % 30) / 10.0;
    const Rect offsets{-4, -4, 30, 30};
    const auto pyr = build_edge_pyramid(edges, w, h, pyramid_levels_for(w, h));
    const auto got = hierarchical_match(tmpl, pyr, offsets, threshold);

    std::map<std::pair<int, int>, double> expected;
    for (int dy = offsets.y0; dy < offsets.y_end(); ++dy)
      for (int dx = offsets.x0; dx < offsets.x_end(); ++dx) {
        const double s = oracle::brute_chamfer(tmpl, edges, w, h, {dx, dy});
        if (s <= threshold + 1e-12) expected[{dx, dy}] = s;
      }
    CHECK(got.size() == expected.size());
    for (const auto& m : got) {
      const auto it = expected.find({m.offset.x, m.offset.y});
      REQUIRE(it != expected.end());
      CHECK(m.score == doctest::Approx(it->second).epsilon(1e-12));
      CHECK(m.score == chamfer_score(tmpl, pyr.levels[0], m.offset));
    }
    CHECK(std::is_sorted(got.begin(), got.end(),
                         [](const ChamferMatch& a, const ChamferMatch& b) { return a.score < b.score; }));
  }
}

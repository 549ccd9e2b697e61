#include "comal/synth.hpp"

#include <array>
#include <random>

namespace comal {
namespace {

constexpr std::array<std::uint8_t, 3> kObjectPalette{30, 60, 90};
constexpr std::array<std::uint8_t, 4> kBackgroundPalette{150, 180, 210, 240};

// Plain modulo draws: reproducible across standard libraries, unlike the
// std distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  int below(int n) { return static_cast<int>(gen_() % static_cast<std::uint64_t>(n)); }
  int range(int lo, int hi) { return lo + below(hi - lo + 1); }

 private:
  std::mt19937_64 gen_;
};

template <std::size_t N>
void paint_blobs(GrayImage& img, Rng& rng, const std::array<std::uint8_t, N>& palette, int count, int min_side,
                 int max_side) {
  const int w = static_cast<int>(img.cols()), h = static_cast<int>(img.rows());
  img.setConstant(palette[rng.below(N)]);
  for (int i = 0; i < count; ++i) {
    const int bw = rng.range(min_side, max_side), bh = rng.range(min_side, max_side);
    const int x0 = rng.range(-bw / 2, w - bw / 2), y0 = rng.range(-bh / 2, h - bh / 2);
    const Rect r = clamp_rect({x0, y0, bw, bh}, w, h);
    if (!r.empty()) img.block(r.y0, r.x0, r.h, r.w).setConstant(palette[rng.below(N)]);
  }
}

BinaryMask object_shape(Rng& rng, int s) {
  BinaryMask m = BinaryMask::Ones(s, s);
  for (int k = 0; k < 3; ++k) {
    const int side = rng.below(4);
    const int depth = rng.range(s / 6, s / 4);
    const int width = rng.range(s / 5, s / 3);
    const int along = rng.range(s / 6, s - s / 6 - width);
    switch (side) {
      case 0: m.block(0, along, depth, width).setZero(); break;
      case 1: m.block(s - depth, along, depth, width).setZero(); break;
      case 2: m.block(along, 0, width, depth).setZero(); break;
      default: m.block(along, s - depth, width, depth).setZero(); break;
    }
  }
  return m;
}

}  // namespace

PixelCoord object_origin(const SynthSpec& spec, int k) {
  PixelCoord p = spec.start;
  for (int i = 0; i < k; ++i) {
    if (spec.script.empty()) {
      p = p + spec.velocity;
    } else {
      p = p + spec.script[std::min<std::size_t>(i, spec.script.size() - 1)];
    }
  }
  return p;
}

SynthSequence synth_sequence(const SynthSpec& spec) {
  const int s = spec.object_size;
  if (spec.width < 1 || spec.height < 1 || spec.frames < 1 || s < 12 || spec.object_blobs < 0 ||
      spec.background_blobs < 0) {
    throw Error(Errc::BadParams, "synthetic sequence needs positive sizes and an object of at least 12 px");
  }
  for (int k = 0; k < spec.frames; ++k) {
    const PixelCoord o = object_origin(spec, k);
    if (o.x < 0 || o.y < 0 || o.x + s > spec.width || o.y + s > spec.height) {
      throw Error(Errc::ObjectOutOfFrame, "object leaves the frame at frame " + std::to_string(k));
    }
  }

  Rng object_rng(spec.seed);
  const BinaryMask shape = object_shape(object_rng, s);
  GrayImage texture(s, s);
  paint_blobs(texture, object_rng, kObjectPalette, spec.object_blobs, s / 5, s / 2);

  const int blobs = spec.background_blobs > 0 ? spec.background_blobs : spec.width * spec.height / 1500;
  auto background = [&](int k) {
    Rng rng(spec.seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(k + 1));
    GrayImage bg(spec.height, spec.width);
    paint_blobs(bg, rng, kBackgroundPalette, blobs, 10, 60);
    return bg;
  };
  const GrayImage fixed = background(0);

  SynthSequence out;
  for (int k = 0; k < spec.frames; ++k) {
    GrayImage frame = spec.background == BackgroundMode::Static ? fixed : background(k);
    BinaryMask mask = BinaryMask::Zero(spec.height, spec.width);
    const PixelCoord o = object_origin(spec, k);
    for (int y = 0; y < s; ++y)
      for (int x = 0; x < s; ++x)
        if (shape(y, x)) {
          frame(o.y + y, o.x + x) = texture(y, x);
          mask(o.y + y, o.x + x) = true;
        }
    out.frames.push_back(std::move(frame));
    out.masks.push_back(std::move(mask));
    out.annotations.push_back({k, 1, {double(o.x), double(o.y), double(s), double(s)}});
  }
  return out;
}

}  // namespace comal

#pragma once

// Seeded synthetic sequences: one textured rectilinear object translating
// over a piecewise-constant background that is either fixed or redrawn every
// frame. Object texture uses dark gray levels and the background light ones,
// so object level lines stay stable while the background changes underneath.

#include <cstdint>
#include <vector>

#include "comal/image.hpp"

namespace comal {

enum class BackgroundMode { Static, Rerandomized };

struct BoxF {
  double left = 0.0;
  double top = 0.0;
  double width = 0.0;
  double height = 0.0;

  bool operator==(const BoxF&) const = default;
};

struct BBoxAnnotation {
  int frame = 0;
  int object_id = 0;
  BoxF box;
};

struct SynthSpec {
  int width = 320;
  int height = 240;
  int frames = 30;
  std::uint64_t seed = 1;
  BackgroundMode background = BackgroundMode::Rerandomized;
  int object_size = 60;
  PixelCoord start{40, 90};    // object top-left in frame 0
  PixelCoord velocity{2, 0};   // per-frame step when `script` is empty
  std::vector<PixelCoord> script;  // step k moves frame k to k+1; last step repeats
  int object_blobs = 6;
  int background_blobs = 0;    // 0 = proportional to frame area
};

struct SynthSequence {
  std::vector<GrayImage> frames;
  std::vector<BinaryMask> masks;  // object foreground per frame
  std::vector<BBoxAnnotation> annotations;
};

/// Object top-left at frame k.
PixelCoord object_origin(const SynthSpec& spec, int k);

/// Throws Errc::ObjectOutOfFrame if the object leaves the frame, Errc::BadParams
/// for nonsensical sizes.
SynthSequence synth_sequence(const SynthSpec& spec);

}  // namespace comal

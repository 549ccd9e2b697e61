#pragma once

// Texture verification by part SSD: the support patch of a corner is split by
// its level line into two sides, and two patches are compared side against
// side so a change confined to one side (typically background) does not spoil
// the match.

#include <optional>
#include <span>
#include <string_view>

#include "comal/image.hpp"

namespace comal {

enum class Side { A, B };

/// Side pairings, in tie-break order. Full marks the whole-patch fallback used
/// when either patch has a degenerate split.
enum class Combination { AA, AB, BA, BB, Full };

std::string_view combination_name(Combination c);

struct SupportPatch {
  GrayImage pixels;  // effective (possibly border-clamped) window
  Rect rect;         // frame coordinates of `pixels`
  PixelCoord center;
  BinaryMask side_a;  // same shape as pixels
  BinaryMask side_b;
  bool degenerate = false;

  const BinaryMask& side(Side s) const { return s == Side::A ? side_a : side_b; }
};

struct MaskedSsd {
  double score = 0.0;  // mean squared difference over the overlap
  int overlap = 0;
};

struct PartMatchResult {
  Combination combination = Combination::AA;
  double score = 0.0;
  int overlap = 0;
};

inline constexpr int kDefaultMinOverlap = 40;

/// Mean squared difference over pixels where both patches, aligned on their
/// centres, have the requested side set. Nullopt below min_overlap.
std::optional<MaskedSsd> try_masked_ssd(const SupportPatch& p, Side sp, const SupportPatch& q, Side sq,
                                        int min_overlap = kDefaultMinOverlap);

/// As try_masked_ssd; throws Errc::InsufficientOverlap instead of returning nullopt.
MaskedSsd masked_ssd(const SupportPatch& p, Side sp, const SupportPatch& q, Side sq,
                     int min_overlap = kDefaultMinOverlap);

/// Mean squared difference over the whole centre-aligned overlap, ignoring masks.
std::optional<MaskedSsd> full_patch_ssd(const SupportPatch& p, const SupportPatch& q,
                                        int min_overlap = kDefaultMinOverlap);

/// Best of the four side pairings AA, AB, BA, BB (ties resolved in that order).
/// Degenerate patches fall back to full_patch_ssd with Combination::Full.
/// Throws Errc::NoValidCombination when no pairing reaches min_overlap.
PartMatchResult part_ssd_match(const SupportPatch& p, const SupportPatch& q, int min_overlap = kDefaultMinOverlap);

struct Verified {
  std::size_t index = 0;  // into the candidate list
  PartMatchResult match;
};

/// Picks the candidate with the lowest part-SSD score (earliest on ties) and
/// accepts it when the score is <= ssd_threshold. Candidates without any
/// valid pairing are skipped.
std::optional<Verified> verify_candidates(const SupportPatch& corner, std::span<const SupportPatch> candidates,
                                          double ssd_threshold, int min_overlap = kDefaultMinOverlap);

}  // namespace comal

#include "comal/part_ssd.hpp"

#include <array>

namespace comal {
namespace {

// Iterates the centre-aligned overlap of two patches, calling
// fn(p_row, p_col, q_row, q_col) for each shared relative position.
template <typename Fn>
void for_each_aligned(const SupportPatch& p, const SupportPatch& q, Fn&& fn) {
  // Relative extents (offset from centre) of each patch.
  const int u0 = std::max(p.rect.x0 - p.center.x, q.rect.x0 - q.center.x);
  const int v0 = std::max(p.rect.y0 - p.center.y, q.rect.y0 - q.center.y);
  const int u1 = std::min(p.rect.x_end() - p.center.x, q.rect.x_end() - q.center.x);
  const int v1 = std::min(p.rect.y_end() - p.center.y, q.rect.y_end() - q.center.y);
  for (int v = v0; v < v1; ++v) {
    const int pr = p.center.y + v - p.rect.y0;
    const int qr = q.center.y + v - q.rect.y0;
    for (int u = u0; u < u1; ++u) fn(pr, p.center.x + u - p.rect.x0, qr, q.center.x + u - q.rect.x0);
  }
}

}  // namespace

std::string_view combination_name(Combination c) {
  switch (c) {
    case Combination::AA: return "AA";
    case Combination::AB: return "AB";
    case Combination::BA: return "BA";
    case Combination::BB: return "BB";
    case Combination::Full: return "FULL";
  }
  return "";
}

std::optional<MaskedSsd> try_masked_ssd(const SupportPatch& p, Side sp, const SupportPatch& q, Side sq,
                                        int min_overlap) {
  const BinaryMask& mp = p.side(sp);
  const BinaryMask& mq = q.side(sq);
  double sum = 0.0;
  int overlap = 0;
  for_each_aligned(p, q, [&](int pr, int pc, int qr, int qc) {
    if (!mp(pr, pc) || !mq(qr, qc)) return;
    const double d = double(p.pixels(pr, pc)) - double(q.pixels(qr, qc));
    sum += d * d;
    ++overlap;
  });
  if (overlap < min_overlap || overlap == 0) return std::nullopt;
  return MaskedSsd{sum / overlap, overlap};
}

MaskedSsd masked_ssd(const SupportPatch& p, Side sp, const SupportPatch& q, Side sq, int min_overlap) {
  if (auto r = try_masked_ssd(p, sp, q, sq, min_overlap)) return *r;
  throw Error(Errc::InsufficientOverlap, "side overlap below " + std::to_string(min_overlap) + " pixels");
}

std::optional<MaskedSsd> full_patch_ssd(const SupportPatch& p, const SupportPatch& q, int min_overlap) {
  double sum = 0.0;
  int overlap = 0;
  for_each_aligned(p, q, [&](int pr, int pc, int qr, int qc) {
    const double d = double(p.pixels(pr, pc)) - double(q.pixels(qr, qc));
    sum += d * d;
    ++overlap;
  });
  if (overlap < min_overlap || overlap == 0) return std::nullopt;
  return MaskedSsd{sum / overlap, overlap};
}

PartMatchResult part_ssd_match(const SupportPatch& p, const SupportPatch& q, int min_overlap) {
  if (p.degenerate || q.degenerate) {
    if (auto r = full_patch_ssd(p, q, min_overlap)) return {Combination::Full, r->score, r->overlap};
    throw Error(Errc::NoValidCombination, "patches do not overlap");
  }
  static constexpr std::array<std::pair<Side, Side>, 4> kPairs{
      {{Side::A, Side::A}, {Side::A, Side::B}, {Side::B, Side::A}, {Side::B, Side::B}}};
  std::optional<PartMatchResult> best;
  for (std::size_t i = 0; i < kPairs.size(); ++i) {
    const auto r = try_masked_ssd(p, kPairs[i].first, q, kPairs[i].second, min_overlap);
    if (!r) continue;
    if (!best || r->score < best->score) best = PartMatchResult{static_cast<Combination>(i), r->score, r->overlap};
  }
  if (!best) throw Error(Errc::NoValidCombination, "no side pairing reaches the minimum overlap");
  return *best;
}

std::optional<Verified> verify_candidates(const SupportPatch& corner, std::span<const SupportPatch> candidates,
                                          double ssd_threshold, int min_overlap) {
  std::optional<Verified> best;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    PartMatchResult r;
    try {
      r = part_ssd_match(corner, candidates[i], min_overlap);
    } catch (const Error&) {
      continue;
    }
    if (!best || r.score < best->match.score) best = Verified{i, r};
  }
  if (best && best->match.score <= ssd_threshold) return best;
  return std::nullopt;
}

}  // namespace comal

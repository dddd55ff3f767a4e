#pragma once

#include "octascreen/image.hpp"
#include "octascreen/screening.hpp"

namespace octascreen {

/// Best hypothesis of the second stage.
struct MatchResult {
  int cx = 0;
  int cy = 0;
  int m = 0;          // probe side in the reference
  double scale = 1;   // m / template side
  double angle = 0;   // degrees; the reference patch looks like rotate(template, angle)
  double score = -1;  // zero-mean NCC
};

/// Zero-mean NCC of `probe` against the equally sized window centred at
/// (cx, cy) (top-left = centre - patch_center_offset per axis). Returns 0 when
/// either side is constant. Throws on out-of-bounds windows.
double ncc_score(const GrayImage& image, const GrayImage& probe, int cx, int cy);

/// Exhaustive NCC over candidates x rotations {0, step, ..., 360 - step}.
/// Each candidate (cx, cy, m) is probed with the template rescaled to m x m and
/// rotated; samples rotated in from outside the template are excluded.
/// Ties resolve to the smallest (scale, angle, cy, cx).
MatchResult match_candidates(const GrayImage& image, const GrayImage& templ, const ScreeningResult& candidates,
                             double angle_step = 10.0);

/// Same hypotheses as match_candidates over keep_all(): the unscreened baseline.
MatchResult match_exhaustive(const GrayImage& image, const GrayImage& templ, const ScreeningConfig& cfg,
                             double angle_step = 10.0);

namespace serial {
MatchResult match_candidates(const GrayImage& image, const GrayImage& templ, const ScreeningResult& candidates,
                             double angle_step = 10.0);
}  // namespace serial

}  // namespace octascreen

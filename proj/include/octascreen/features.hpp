#pragma once

#include "octascreen/integral.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace octascreen {

/// Mean, standard deviation and L1-normalised gradients of one region.
struct ShapeFeatures {
  double mean = 0;
  double std = 0;
  double gx = 0;
  double gy = 0;
};

struct OctagonFeatures {
  double mean = 0;
  double std = 0;
  double grad_mag = 0;
};

struct Ring {
  int half_size = 0;
  OctagonFeatures features;
};

/// Octagonal-star features on nested central areas, outermost first.
struct RingFeatureVector {
  std::vector<Ring> rings;
};

/// Rings smaller than this are dropped on both template and patch sides.
inline constexpr int kMinRingHalfSize = 4;

/// Diamond radius paired with a square of half-size n: round(sqrt(2) n), half up.
inline int octagon_diamond_radius(int n) noexcept {
  return static_cast<int>(std::floor(std::sqrt(2.0) * n + 0.5));
}

/// Centre index of an m-pixel patch along one axis (top-left biased for even m).
constexpr int patch_center_offset(int m) noexcept { return (m - 1) / 2; }

/// Square half-sizes of the rings of an m x m patch. Ring r is the largest
/// octagonal star of ratio sqrt(2)^-r that fits inside the patch:
/// n_r = floor(h / sqrt(2)^(r+1)) with h = (m-1)/2, so its diamond radius
/// round(sqrt(2) n_r) <= h. Rings below kMinRingHalfSize are dropped.
std::vector<int> ring_half_sizes(int m, int ring_count);

/// Smallest patch side that yields at least one ring.
int min_patch_side();

ShapeFeatures square_features(const IntegralTables& t, int cx, int cy, int n);
ShapeFeatures diamond_features(const IntegralTables& t, int cx, int cy, int r);
OctagonFeatures octagon_features(const IntegralTables& t, int cx, int cy, int n);
RingFeatureVector ring_features(const IntegralTables& t, int cx, int cy, int m, int ring_count);

/// Whether every ring of an m x m patch centred at (cx, cy) fits in the tables' image.
bool patch_fits(const IntegralTables& t, int cx, int cy, int m) noexcept;

namespace detail {

inline double safe_std(std::int64_t sum, std::int64_t sum_sq, std::int64_t count) noexcept {
  // count * sum_sq - sum^2 is exact in 64 bits for any patch of an 8-bit image below 2^24 pixels.
  const std::int64_t scaled = count * sum_sq - sum * sum;
  if (scaled <= 0) return 0.0;
  return std::sqrt(static_cast<double>(scaled)) / static_cast<double>(count);
}

/// Sum of |i - cx| over the closed l1 ball of radius r: r(r+1)(2r+1)/3.
constexpr std::int64_t diamond_l1_norm(int r) noexcept {
  return static_cast<std::int64_t>(r) * (r + 1) * (2 * r + 1) / 3;
}

inline ShapeFeatures square_unchecked(const IntegralTables& t, int cx, int cy, int n) noexcept {
  const int x0 = cx - n + 1, y0 = cy - n + 1, x1 = cx + n, y1 = cy + n;
  const std::int64_t s1 = t.sat_plain.rect_sum(x0, y0, x1, y1);
  const std::int64_t sx = t.sat_x.rect_sum(x0, y0, x1, y1);
  const std::int64_t sy = t.sat_y.rect_sum(x0, y0, x1, y1);
  const std::int64_t s2 = t.sat_sq.rect_sum(x0, y0, x1, y1);
  const std::int64_t count = 4 * static_cast<std::int64_t>(n) * n;
  // Kernel (i - cx - 1/2) is antisymmetric over the even window; doubled to stay integral.
  // sx holds sum of (i+1) I, so sum of (i - cx) I = sx - (cx+1) s1.
  const double norm = 4.0 * n * n * n;  // 2 * sum |i - cx - 1/2| = 2 * 2n^3
  ShapeFeatures f;
  f.mean = static_cast<double>(s1) / static_cast<double>(count);
  f.std = safe_std(s1, s2, count);
  f.gx = static_cast<double>(2 * (sx - (cx + 1) * s1) - s1) / norm;
  f.gy = static_cast<double>(2 * (sy - (cy + 1) * s1) - s1) / norm;
  return f;
}

inline ShapeFeatures diamond_unchecked(const IntegralTables& t, int cx, int cy, int r) noexcept {
  const std::int64_t d1 = t.rsat_plain.diamond_sum(cx, cy, r);
  const std::int64_t dx = t.rsat_x.diamond_sum(cx, cy, r);
  const std::int64_t dy = t.rsat_y.diamond_sum(cx, cy, r);
  const std::int64_t d2 = t.rsat_sq.diamond_sum(cx, cy, r);
  const std::int64_t count = diamond_pixel_count(r);
  ShapeFeatures f;
  f.mean = static_cast<double>(d1) / static_cast<double>(count);
  f.std = safe_std(d1, d2, count);
  if (r > 0) {
    const double norm = static_cast<double>(diamond_l1_norm(r));
    f.gx = static_cast<double>(dx - (cx + 1) * d1) / norm;
    f.gy = static_cast<double>(dy - (cy + 1) * d1) / norm;
  }
  return f;
}

inline OctagonFeatures octagon_unchecked(const IntegralTables& t, int cx, int cy, int n) noexcept {
  const ShapeFeatures sq = square_unchecked(t, cx, cy, n);
  const ShapeFeatures dm = diamond_unchecked(t, cx, cy, octagon_diamond_radius(n));
  return {(sq.mean + dm.mean) / 2, (sq.std + dm.std) / 2, std::hypot((sq.gx + dm.gx) / 2, (sq.gy + dm.gy) / 2)};
}

}  // namespace detail

}  // namespace octascreen

#include "octascreen/features.hpp"

#include "octascreen/error.hpp"

#include <string>

namespace octascreen {

namespace {

[[noreturn]] void out_of_bounds(const char* shape, int cx, int cy, int size) {
  throw Error(ErrorKind::bounds, std::string(shape) + " at (" + std::to_string(cx) + "," + std::to_string(cy) +
                                     ") of size " + std::to_string(size) + " leaves the image");
}

bool octagon_fits(const IntegralTables& t, int cx, int cy, int n) noexcept {
  const int r = octagon_diamond_radius(n);
  return square_fits(t.width, t.height, cx, cy, n) && diamond_fits(t.width, t.height, cx, cy, r) &&
         r <= t.max_radius();
}

}  // namespace

std::vector<int> ring_half_sizes(int m, int ring_count) {
  if (ring_count < 1) throw Error(ErrorKind::invalid_argument, "ring_count must be >= 1");
  std::vector<int> sizes;
  const double h = patch_center_offset(m);
  double divisor = std::sqrt(2.0);
  for (int r = 0; r < ring_count; ++r, divisor *= std::sqrt(2.0)) {
    const int n = static_cast<int>(std::floor(h / divisor + 1e-9));
    if (n < kMinRingHalfSize) break;
    sizes.push_back(n);
  }
  return sizes;
}

int min_patch_side() {
  int m = 1;
  while (ring_half_sizes(m, 1).empty()) ++m;
  return m;
}

bool patch_fits(const IntegralTables& t, int cx, int cy, int m) noexcept {
  const int c = patch_center_offset(m);
  return cx - c >= 0 && cy - c >= 0 && cx - c + m <= t.width && cy - c + m <= t.height;
}

ShapeFeatures square_features(const IntegralTables& t, int cx, int cy, int n) {
  if (!square_fits(t.width, t.height, cx, cy, n)) out_of_bounds("square", cx, cy, n);
  return detail::square_unchecked(t, cx, cy, n);
}

ShapeFeatures diamond_features(const IntegralTables& t, int cx, int cy, int r) {
  if (r > t.max_radius() || !diamond_fits(t.width, t.height, cx, cy, r)) out_of_bounds("diamond", cx, cy, r);
  return detail::diamond_unchecked(t, cx, cy, r);
}

OctagonFeatures octagon_features(const IntegralTables& t, int cx, int cy, int n) {
  if (!octagon_fits(t, cx, cy, n)) out_of_bounds("octagonal star", cx, cy, n);
  return detail::octagon_unchecked(t, cx, cy, n);
}

RingFeatureVector ring_features(const IntegralTables& t, int cx, int cy, int m, int ring_count) {
  const auto sizes = ring_half_sizes(m, ring_count);
  if (sizes.empty()) {
    throw Error(ErrorKind::invalid_argument, "patch side " + std::to_string(m) + " is too small for any ring");
  }
  if (!octagon_fits(t, cx, cy, sizes.front())) out_of_bounds("outermost ring", cx, cy, sizes.front());
  RingFeatureVector v;
  v.rings.reserve(sizes.size());
  for (const int n : sizes) v.rings.push_back({n, detail::octagon_unchecked(t, cx, cy, n)});
  return v;
}

}  // namespace octascreen

#include "doctest.h"
#include "octascreen/error.hpp"
#include "octascreen/features.hpp"
#include "test_util.hpp"

using namespace octascreen;

namespace {

using testutil::Oracle;
using testutil::diamond_oracle;
using testutil::square_oracle;

void check_close(const ShapeFeatures& f, const Oracle& o) {
  CHECK(testutil::rel_close(f.mean, o.mean, 1e-9));
  CHECK(testutil::rel_close(f.std, o.std, 1e-9, 1e-6));
  CHECK(testutil::rel_close(f.gx, o.gx, 1e-9));
  CHECK(testutil::rel_close(f.gy, o.gy, 1e-9));
}

GrayImage mirror_x(const GrayImage& img) {
  GrayImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) out(x, y) = img(img.width() - 1 - x, y);
  return out;
}

}  // namespace

TEST_SUITE("features") {

TEST_CASE("square_features on constant and split regions") {
  const auto t = build_tables(GrayImage(20, 20, 200), 8);
  const auto f = square_features(t, 9, 9, 4);
  CHECK(f.mean == 200.0);
  CHECK(f.std == 0.0);
  CHECK(f.gx == 0.0);
  CHECK(f.gy == 0.0);

  GrayImage split(20, 20, 0);
  for (int y = 0; y < 20; ++y)
    for (int x = 10; x < 20; ++x) split(x, y) = 255;
  const auto s = square_features(build_tables(split, 8), 9, 9, 4);  // window columns 6..13
  CHECK(s.std == doctest::Approx(127.5).epsilon(1e-12));
  CHECK(s.mean == doctest::Approx(127.5).epsilon(1e-12));
  CHECK(s.gx > 0);
  CHECK(s.gy == 0.0);

  CHECK_THROWS_AS(square_features(t, 2, 9, 4), Error);
}

TEST_CASE("square_features match the per-pixel oracle") {
  const auto img = testutil::random_image(32, 32, 101);
  const auto t = build_tables(img, 8);
  for (int cy = 3; cy + 4 < 32; ++cy)
    for (int cx = 3; cx + 4 < 32; ++cx) check_close(square_features(t, cx, cy, 4), square_oracle(img, cx, cy, 4));
}

TEST_CASE("diamond_features") {
  const auto flat = build_tables(GrayImage(15, 15, 90), 6);
  const auto f = diamond_features(flat, 7, 7, 5);
  CHECK(f.mean == 90.0);
  CHECK(f.std == 0.0);
  CHECK(f.gx == 0.0);
  CHECK(f.gy == 0.0);

  GrayImage cross(5, 5, 0);
  cross(2, 2) = 255;
  CHECK(diamond_features(build_tables(cross, 2), 2, 2, 1).mean == doctest::Approx(51.0));

  const auto img = testutil::random_image(30, 30, 77);
  const auto t = build_tables(img, 8);
  for (int r = 2; r <= 8; ++r)
    for (int cy = r; cy + r < 30; ++cy)
      for (int cx = r; cx + r < 30; ++cx) check_close(diamond_features(t, cx, cy, r), diamond_oracle(img, cx, cy, r));

  CHECK_THROWS_AS(diamond_features(t, 1, 10, 2), Error);
  CHECK_THROWS_AS(diamond_features(t, 15, 15, 9), Error);  // beyond table radius
}

TEST_CASE("octagon_features") {
  const auto flat = build_tables(GrayImage(40, 40, 33), 16);
  const auto c = octagon_features(flat, 20, 20, 8);
  CHECK(c.mean == 33.0);
  CHECK(c.std == 0.0);
  CHECK(c.grad_mag == 0.0);

  GrayImage ramp(40, 40);
  for (int y = 0; y < 40; ++y)
    for (int x = 0; x < 40; ++x) ramp(x, y) = static_cast<std::uint8_t>(4 * x);
  const auto rt = build_tables(ramp, 16);
  const auto sq = square_features(rt, 20, 20, 8);
  const auto dm = diamond_features(rt, 20, 20, octagon_diamond_radius(8));
  CHECK(sq.gy == 0.0);
  CHECK(dm.gy == 0.0);
  const auto o = octagon_features(rt, 20, 20, 8);
  CHECK(o.grad_mag > 0);
  CHECK(o.grad_mag == doctest::Approx((sq.gx + dm.gx) / 2).epsilon(1e-12));

  const auto img = testutil::random_image(48, 48, 5);
  const auto t = build_tables(img, 16);
  for (int cy = 12; cy < 36; cy += 3)
    for (int cx = 12; cx < 36; cx += 2) {
      const auto so = square_oracle(img, cx, cy, 8);
      const auto d = diamond_oracle(img, cx, cy, octagon_diamond_radius(8));
      const auto f = octagon_features(t, cx, cy, 8);
      CHECK(testutil::rel_close(f.mean, (so.mean + d.mean) / 2, 1e-9));
      CHECK(testutil::rel_close(f.std, (so.std + d.std) / 2, 1e-9));
      CHECK(testutil::rel_close(f.grad_mag, std::hypot((so.gx + d.gx) / 2, (so.gy + d.gy) / 2), 1e-9));
    }
  CHECK(octagon_diamond_radius(8) == 11);
  CHECK(octagon_diamond_radius(10) == 14);
  CHECK(octagon_diamond_radius(5) == 7);
}

TEST_CASE("ring_half_sizes and ring_features") {
  CHECK(ring_half_sizes(32, 3) == std::vector<int>{10, 7, 5});
  CHECK(ring_half_sizes(45, 3) == std::vector<int>{15, 11, 7});
  CHECK(ring_half_sizes(16, 3) == std::vector<int>{4});
  CHECK(ring_half_sizes(12, 3).empty());
  CHECK(min_patch_side() == 13);
  for (int m = 13; m < 200; ++m) {
    const auto sizes = ring_half_sizes(m, 5);
    for (std::size_t i = 1; i < sizes.size(); ++i) CHECK(sizes[i] < sizes[i - 1]);
    for (int n : sizes) CHECK(octagon_diamond_radius(n) <= patch_center_offset(m));
  }

  const auto flat = build_tables(GrayImage(64, 64, 12), 16);
  for (const auto& ring : ring_features(flat, 32, 32, 32, 3).rings) {
    CHECK(ring.features.mean == 12.0);
    CHECK(ring.features.std == 0.0);
    CHECK(ring.features.grad_mag == 0.0);
  }

  const auto img = testutil::random_image(64, 64, 8);
  const auto t = build_tables(img, 16);
  const auto v = ring_features(t, 30, 33, 32, 3);
  REQUIRE(v.rings.size() == 3);
  const auto o = octagon_features(t, 30, 33, 10);
  CHECK(v.rings[0].half_size == 10);
  CHECK(v.rings[0].features.mean == o.mean);
  CHECK(v.rings[0].features.std == o.std);
  CHECK(v.rings[0].features.grad_mag == o.grad_mag);

  CHECK_THROWS_AS(ring_features(t, 5, 33, 32, 3), Error);
  CHECK_THROWS_AS(ring_features(t, 30, 33, 10, 3), Error);
}

TEST_CASE("affine shift moves means only") {
  auto img = testutil::random_image(40, 40, 55);
  for (auto& v : img.pixels()) v = static_cast<std::uint8_t>(v / 2);
  auto shifted = img;
  for (auto& v : shifted.pixels()) v = static_cast<std::uint8_t>(v + 60);
  const auto a = build_tables(img, 12);
  const auto b = build_tables(shifted, 12);
  for (int cy = 10; cy < 30; cy += 3)
    for (int cx = 10; cx < 30; cx += 3) {
      const auto fa = square_features(a, cx, cy, 6);
      const auto fb = square_features(b, cx, cy, 6);
      CHECK(fb.mean == doctest::Approx(fa.mean + 60).epsilon(1e-12));
      CHECK(testutil::rel_close(fb.std, fa.std, 1e-9));
      CHECK(testutil::rel_close(fb.gx, fa.gx, 1e-9));
      CHECK(testutil::rel_close(fb.gy, fa.gy, 1e-9));
      const auto da = diamond_features(a, cx, cy, 8);
      const auto db = diamond_features(b, cx, cy, 8);
      CHECK(db.mean == doctest::Approx(da.mean + 60).epsilon(1e-12));
      CHECK(testutil::rel_close(db.std, da.std, 1e-9));
      CHECK(testutil::rel_close(db.gx, da.gx, 1e-9));
    }
}

TEST_CASE("horizontal mirror negates gx") {
  const auto img = testutil::random_image(41, 37, 66);
  const auto m = mirror_x(img);
  const auto a = build_tables(img, 10);
  const auto b = build_tables(m, 10);
  const int w = img.width();
  for (int cy = 10; cy < 27; cy += 2)
    for (int cx = 10; cx < 30; cx += 2) {
      // Even square window [cx-n+1, cx+n] mirrors onto centre w-2-cx; diamond onto w-1-cx.
      const auto s = square_features(a, cx, cy, 5);
      const auto sm = square_features(b, w - 2 - cx, cy, 5);
      CHECK(sm.mean == doctest::Approx(s.mean).epsilon(1e-12));
      CHECK(testutil::rel_close(sm.std, s.std, 1e-9));
      CHECK(testutil::rel_close(sm.gx, -s.gx, 1e-9));
      CHECK(testutil::rel_close(sm.gy, s.gy, 1e-9));
      const auto d = diamond_features(a, cx, cy, 7);
      const auto dm = diamond_features(b, w - 1 - cx, cy, 7);
      CHECK(testutil::rel_close(dm.gx, -d.gx, 1e-9));
      CHECK(testutil::rel_close(dm.gy, d.gy, 1e-9));
    }
}

TEST_CASE("gradient magnitude survives a 90 degree rotation") {
  const int size = 40;
  const auto img = testutil::random_image(size, size, 12);
  const auto rot = rotate(img, 90.0, 0);  // out(x, y) = in(y, N-1-x)
  const auto a = build_tables(img, 12);
  const auto b = build_tables(rot, 12);
  for (int cy = 10; cy < 30; cy += 3)
    for (int cx = 10; cx < 30; cx += 3) {
      const auto s = square_features(a, cx, cy, 6);
      const auto sr = square_features(b, size - 2 - cy, cx, 6);
      CHECK(testutil::rel_close(std::hypot(sr.gx, sr.gy), std::hypot(s.gx, s.gy), 1e-6));
      const auto d = diamond_features(a, cx, cy, 8);
      const auto dr = diamond_features(b, size - 1 - cy, cx, 8);
      CHECK(testutil::rel_close(std::hypot(dr.gx, dr.gy), std::hypot(d.gx, d.gy), 1e-6));
    }
}

}  // TEST_SUITE

#include "octascreen/integral.hpp"

#include "octascreen/error.hpp"

#include <string>

namespace octascreen {

struct RsatAccess {
  static std::int64_t& tri(Rsat& t, int x, int y) noexcept { return t.tri_[t.index(x, y)]; }
  static std::int64_t& diag(Rsat& t, int x, int y) noexcept { return t.diag_[t.index(x, y)]; }
  static std::int64_t& anti(Rsat& t, int x, int y) noexcept { return t.anti_[t.index(x, y)]; }
};

namespace {

void check_budget(const GrayImage& img) {
  // Largest per-pixel weight is max(255 * max(W, H), 255^2); the whole-image sum must fit in int64.
  const long double pixels = static_cast<long double>(img.width()) * img.height();
  const long double side = img.width() > img.height() ? img.width() : img.height();
  const long double max_weight = side * 255.0L > 65025.0L ? side * 255.0L : 65025.0L;
  if (pixels > 2147483648.0L || pixels * max_weight >= 9.2e18L) {
    throw Error(ErrorKind::invalid_argument, "image too large for 64-bit integral tables");
  }
}

int x_lo(const Rsat& t) { return -t.pad_x(); }
int x_hi(const Rsat& t) { return t.width() - 1 + t.pad_x(); }
int y_lo(const Rsat& t) { return -t.pad_top(); }

std::int64_t pixel_weight(const GrayImage& img, WeightKind kind, int x, int y) noexcept {
  return img.contains(x, y) ? weighted_value(kind, x, y, img(x, y)) : 0;
}

}  // namespace

const char* to_string(WeightKind kind) noexcept {
  switch (kind) {
    case WeightKind::plain: return "plain";
    case WeightKind::x_weighted: return "x_weighted";
    case WeightKind::y_weighted: return "y_weighted";
    case WeightKind::squared: return "squared";
  }
  return "?";
}

Sat::Sat(int width, int height, WeightKind kind)
    : width_(width), height_(height), kind_(kind),
      cells_(static_cast<std::size_t>(width + 1) * (height + 1), 0) {}

Rsat::Rsat(int width, int height, WeightKind kind, int max_radius)
    : width_(width), height_(height), kind_(kind), max_radius_(max_radius), pad_x_(max_radius + 1),
      pad_top_(max_radius + 2), stride_(static_cast<std::size_t>(width + 2 * pad_x_)) {
  const std::size_t n = stride_ * static_cast<std::size_t>(height + pad_top_);
  tri_.assign(n, 0);
  diag_.assign(n, 0);
  anti_.assign(n, 0);
}

const Sat& IntegralTables::sat(WeightKind kind) const noexcept {
  switch (kind) {
    case WeightKind::plain: return sat_plain;
    case WeightKind::x_weighted: return sat_x;
    case WeightKind::y_weighted: return sat_y;
    case WeightKind::squared: return sat_sq;
  }
  return sat_plain;
}

const Rsat& IntegralTables::rsat(WeightKind kind) const noexcept {
  switch (kind) {
    case WeightKind::plain: return rsat_plain;
    case WeightKind::x_weighted: return rsat_x;
    case WeightKind::y_weighted: return rsat_y;
    case WeightKind::squared: return rsat_sq;
  }
  return rsat_plain;
}

Sat build_sat(const GrayImage& img, WeightKind kind) {
  check_budget(img);
  Sat sat(img.width(), img.height(), kind);
  const int w = img.width();
  const int h = img.height();
#pragma omp parallel
  {
#pragma omp for schedule(static)
    for (int y = 0; y < h; ++y) {
      std::int64_t run = 0;
      for (int x = 0; x < w; ++x) {
        run += weighted_value(kind, x, y, img(x, y));
        sat.cell(x, y) = run;
      }
    }
    for (int y = 1; y < h; ++y) {
#pragma omp for schedule(static)
      for (int x = 0; x < w; ++x) sat.cell(x, y) += sat.cell(x, y - 1);
    }
  }
  return sat;
}

Rsat build_rsat(const GrayImage& img, WeightKind kind, int max_radius) {
  if (max_radius < 1) throw Error(ErrorKind::invalid_argument, "max_radius must be >= 1");
  check_budget(img);
  Rsat t(img.width(), img.height(), kind, max_radius);
  const int xl = x_lo(t);
  const int xh = x_hi(t);
  const int yl = y_lo(t);
  // Rows above the image stay zero; from row 0 down, each row depends only on the previous one.
#pragma omp parallel
  for (int y = 0; y < img.height(); ++y) {
#pragma omp for schedule(static)
    for (int x = xl; x <= xh; ++x) {
      const std::int64_t w = pixel_weight(img, kind, x, y);
      const std::int64_t d = w + (x > xl && y - 1 >= yl ? t.diag(x - 1, y - 1) : 0);
      const std::int64_t a = w + (x < xh && y - 1 >= yl ? t.anti(x + 1, y - 1) : 0);
      RsatAccess::diag(t, x, y) = d;
      RsatAccess::anti(t, x, y) = a;
      RsatAccess::tri(t, x, y) = t.cell(x, y - 1) + d + a - w;
    }
  }
  return t;
}

IntegralTables build_tables(const GrayImage& img, int max_radius) {
  IntegralTables t;
  t.width = img.width();
  t.height = img.height();
  t.sat_plain = build_sat(img, WeightKind::plain);
  t.sat_x = build_sat(img, WeightKind::x_weighted);
  t.sat_y = build_sat(img, WeightKind::y_weighted);
  t.sat_sq = build_sat(img, WeightKind::squared);
  t.rsat_plain = build_rsat(img, WeightKind::plain, max_radius);
  t.rsat_x = build_rsat(img, WeightKind::x_weighted, max_radius);
  t.rsat_y = build_rsat(img, WeightKind::y_weighted, max_radius);
  t.rsat_sq = build_rsat(img, WeightKind::squared, max_radius);
  return t;
}

bool square_fits(int width, int height, int cx, int cy, int n) noexcept {
  return n >= 1 && cx - n + 1 >= 0 && cy - n + 1 >= 0 && cx + n <= width - 1 && cy + n <= height - 1;
}

bool diamond_fits(int width, int height, int cx, int cy, int r) noexcept {
  return r >= 0 && cx - r >= 0 && cy - r >= 0 && cx + r <= width - 1 && cy + r <= height - 1;
}

std::int64_t square_region_sum(const Sat& sat, int cx, int cy, int n) {
  if (!square_fits(sat.width(), sat.height(), cx, cy, n)) {
    throw Error(ErrorKind::bounds, "square window centred at (" + std::to_string(cx) + "," + std::to_string(cy) +
                                       ") with half-size " + std::to_string(n) + " leaves the image");
  }
  return sat.rect_sum(cx - n + 1, cy - n + 1, cx + n, cy + n);
}

std::int64_t diamond_region_sum(const Rsat& rsat, int cx, int cy, int r) {
  if (r > rsat.max_radius() || !diamond_fits(rsat.width(), rsat.height(), cx, cy, r)) {
    throw Error(ErrorKind::bounds, "diamond centred at (" + std::to_string(cx) + "," + std::to_string(cy) +
                                       ") with radius " + std::to_string(r) + " leaves the image");
  }
  return rsat.diamond_sum(cx, cy, r);
}

namespace serial {

Sat build_sat(const GrayImage& img, WeightKind kind) {
  check_budget(img);
  Sat sat(img.width(), img.height(), kind);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      sat.cell(x, y) =
          weighted_value(kind, x, y, img(x, y)) + sat.cell(x - 1, y) + sat.cell(x, y - 1) - sat.cell(x - 1, y - 1);
    }
  }
  return sat;
}

Rsat build_rsat(const GrayImage& img, WeightKind kind, int max_radius) {
  if (max_radius < 1) throw Error(ErrorKind::invalid_argument, "max_radius must be >= 1");
  check_budget(img);
  Rsat t(img.width(), img.height(), kind, max_radius);

  // Lienhart recurrence T(x,y) = T(x-1,y-1) + T(x+1,y-1) - T(x,y-2) + w(x,y) + w(x,y-1)
  // on a scratch table wide enough (height + 1 beyond the image) that its
  // outermost columns never reach an image pixel.
  const int margin = img.height() + 1 + t.pad_x();
  const int sw = img.width() + 2 * margin;
  const int sh = img.height() + 2;  // two zero rows on top
  std::vector<std::int64_t> tri(static_cast<std::size_t>(sw) * sh, 0);
  auto at = [&](int x, int y) -> std::int64_t& {
    return tri[static_cast<std::size_t>(y + 2) * sw + static_cast<std::size_t>(x + margin)];
  };
  for (int y = 0; y < img.height(); ++y) {
    for (int x = -margin; x < img.width() + margin; ++x) {
      const std::int64_t left = x - 1 >= -margin ? at(x - 1, y - 1) : 0;
      const std::int64_t right = x + 1 < img.width() + margin ? at(x + 1, y - 1) : 0;
      at(x, y) = left + right - at(x, y - 2) + pixel_weight(img, kind, x, y) + pixel_weight(img, kind, x, y - 1);
    }
  }

  for (int y = 0; y < img.height(); ++y) {
    for (int x = x_lo(t); x <= x_hi(t); ++x) {
      const std::int64_t w = pixel_weight(img, kind, x, y);
      RsatAccess::tri(t, x, y) = at(x, y);
      RsatAccess::diag(t, x, y) = w + (x > x_lo(t) && y > 0 ? t.diag(x - 1, y - 1) : 0);
      RsatAccess::anti(t, x, y) = w + (x < x_hi(t) && y > 0 ? t.anti(x + 1, y - 1) : 0);
    }
  }
  return t;
}

IntegralTables build_tables(const GrayImage& img, int max_radius) {
  IntegralTables t;
  t.width = img.width();
  t.height = img.height();
  t.sat_plain = serial::build_sat(img, WeightKind::plain);
  t.sat_x = serial::build_sat(img, WeightKind::x_weighted);
  t.sat_y = serial::build_sat(img, WeightKind::y_weighted);
  t.sat_sq = serial::build_sat(img, WeightKind::squared);
  t.rsat_plain = serial::build_rsat(img, WeightKind::plain, max_radius);
  t.rsat_x = serial::build_rsat(img, WeightKind::x_weighted, max_radius);
  t.rsat_y = serial::build_rsat(img, WeightKind::y_weighted, max_radius);
  t.rsat_sq = serial::build_rsat(img, WeightKind::squared, max_radius);
  return t;
}

}  // namespace serial

}  // namespace octascreen

#pragma once

#include "octascreen/image.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace octascreen {

/// Per-pixel weight accumulated by a table. Coordinate weights are 1-based
/// (x_weighted accumulates (x+1)*I(x,y)).
enum class WeightKind { plain, x_weighted, y_weighted, squared };

inline constexpr std::array<WeightKind, 4> kAllWeightKinds = {WeightKind::plain, WeightKind::x_weighted,
                                                              WeightKind::y_weighted, WeightKind::squared};

const char* to_string(WeightKind kind) noexcept;

inline std::int64_t weighted_value(WeightKind kind, int x, int y, std::uint8_t v) noexcept {
  switch (kind) {
    case WeightKind::plain: return v;
    case WeightKind::x_weighted: return static_cast<std::int64_t>(x + 1) * v;
    case WeightKind::y_weighted: return static_cast<std::int64_t>(y + 1) * v;
    case WeightKind::squared: return static_cast<std::int64_t>(v) * v;
  }
  return 0;
}

/// Summed area table. cell(x, y) = sum of w(i,j) over i <= x, j <= y, with a
/// virtual zero row and column at index -1.
class Sat {
 public:
  Sat() = default;
  Sat(int width, int height, WeightKind kind);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  WeightKind kind() const noexcept { return kind_; }

  std::int64_t cell(int x, int y) const noexcept { return cells_[index(x, y)]; }
  std::int64_t& cell(int x, int y) noexcept { return cells_[index(x, y)]; }

  /// Sum over the inclusive rectangle [x0, x1] x [y0, y1]; no bounds checks.
  std::int64_t rect_sum(int x0, int y0, int x1, int y1) const noexcept {
    return cell(x1, y1) - cell(x0 - 1, y1) - cell(x1, y0 - 1) + cell(x0 - 1, y0 - 1);
  }

  friend bool operator==(const Sat&, const Sat&) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y + 1) * (width_ + 1) + static_cast<std::size_t>(x + 1);
  }

  int width_ = 0;
  int height_ = 0;
  WeightKind kind_ = WeightKind::plain;
  std::vector<std::int64_t> cells_;
};

/// 45-degree tilted summed area table.
///
/// cell(x, y) sums w(i,j) over the image pixels of the triangle
/// { j <= y - |i - x| } whose right-angle apex is (x, y). Two diagonal line
/// prefix tables are kept alongside:
///   diag(x, y) = w(x, y) + diag(x-1, y-1)   (up-left ray)
///   anti(x, y) = w(x, y) + anti(x+1, y-1)   (up-right ray)
/// and cell(x, y) = cell(x, y-1) + diag(x, y) + anti(x, y) - w(x, y).
///
/// The closed l1 ball needs the line tables: triangle corners alone cannot
/// separate the two diagonal pixel lattices along the ball's upper edges.
/// Indices are valid for x in [-pad_x, width-1+pad_x], y in [-pad_top, height-1];
/// outside the image everything reads as zero.
class Rsat {
 public:
  Rsat() = default;
  Rsat(int width, int height, WeightKind kind, int max_radius);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  WeightKind kind() const noexcept { return kind_; }
  int max_radius() const noexcept { return max_radius_; }
  int pad_x() const noexcept { return pad_x_; }
  int pad_top() const noexcept { return pad_top_; }

  std::int64_t cell(int x, int y) const noexcept { return tri_[index(x, y)]; }
  std::int64_t diag(int x, int y) const noexcept { return diag_[index(x, y)]; }
  std::int64_t anti(int x, int y) const noexcept { return anti_[index(x, y)]; }

  /// Closed l1 ball {|i-cx| + |j-cy| <= r}; no bounds checks.
  std::int64_t diamond_sum(int cx, int cy, int r) const noexcept {
    return cell(cx, cy + r) - cell(cx - r - 1, cy - 1) - cell(cx + r + 1, cy - 1) + cell(cx, cy - r - 2) -
           anti(cx - r, cy - 1) + anti(cx + 1, cy - r - 2) - diag(cx + r, cy - 1) + diag(cx, cy - r - 1);
  }

  friend bool operator==(const Rsat&, const Rsat&) = default;

 private:
  friend struct RsatAccess;

  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y + pad_top_) * stride_ + static_cast<std::size_t>(x + pad_x_);
  }

  int width_ = 0;
  int height_ = 0;
  WeightKind kind_ = WeightKind::plain;
  int max_radius_ = 0;
  int pad_x_ = 0;
  int pad_top_ = 0;
  std::size_t stride_ = 0;
  std::vector<std::int64_t> tri_;
  std::vector<std::int64_t> diag_;
  std::vector<std::int64_t> anti_;
};

/// All eight tables of one image.
struct IntegralTables {
  int width = 0;
  int height = 0;
  Sat sat_plain, sat_x, sat_y, sat_sq;
  Rsat rsat_plain, rsat_x, rsat_y, rsat_sq;

  const Sat& sat(WeightKind kind) const noexcept;
  const Rsat& rsat(WeightKind kind) const noexcept;
  int max_radius() const noexcept { return rsat_plain.max_radius(); }
};

/// Two cumulative passes (rows, then columns), OpenMP-parallel.
Sat build_sat(const GrayImage& img, WeightKind kind);
/// Row-by-row diagonal passes, each row parallel over columns.
Rsat build_rsat(const GrayImage& img, WeightKind kind, int max_radius);
IntegralTables build_tables(const GrayImage& img, int max_radius);

/// Sum over the 2n x 2n window [cx-n+1, cx+n] x [cy-n+1, cy+n]. Throws on out-of-bounds.
std::int64_t square_region_sum(const Sat& sat, int cx, int cy, int n);
/// Sum over the closed l1 ball of radius r. Throws on out-of-bounds or r > max_radius.
std::int64_t diamond_region_sum(const Rsat& rsat, int cx, int cy, int r);

constexpr std::int64_t diamond_pixel_count(int r) noexcept {
  return 2 * static_cast<std::int64_t>(r) * r + 2 * static_cast<std::int64_t>(r) + 1;
}

bool square_fits(int width, int height, int cx, int cy, int n) noexcept;
bool diamond_fits(int width, int height, int cx, int cy, int r) noexcept;

/// Single-threaded reference builders using the textbook recurrences; kept
/// for cross-checking and benchmarking the parallel kernels.
namespace serial {
Sat build_sat(const GrayImage& img, WeightKind kind);
Rsat build_rsat(const GrayImage& img, WeightKind kind, int max_radius);
IntegralTables build_tables(const GrayImage& img, int max_radius);
}  // namespace serial

}  // namespace octascreen

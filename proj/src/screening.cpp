#include "octascreen/screening.hpp"

#include "octascreen/error.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <string>

namespace octascreen {

namespace {

constexpr std::int64_t kCellBias = std::int64_t{1} << 20;
constexpr std::int64_t kCellMax = kCellBias - 1;

int round_half_up(double v) { return static_cast<int>(std::floor(v + 0.5)); }

std::uint64_t biased(std::int64_t cell) noexcept {
  return static_cast<std::uint64_t>(std::clamp(cell, -kCellMax, kCellMax) + kCellBias);
}

void check_template(const GrayImage& templ) {
  if (templ.empty()) throw Error(ErrorKind::invalid_argument, "empty template");
  if (templ.width() != templ.height()) {
    throw Error(ErrorKind::invalid_argument, "template must be square, got " + std::to_string(templ.width()) + "x" +
                                                 std::to_string(templ.height()));
  }
}

struct LevelPlan {
  int m;
  std::vector<int> ring_sizes;
};

// Tests centre (cx, cy) ring by ring, outermost first, stopping at the first miss.
bool centre_survives(const IntegralTables& t, const FeatureSet& fs, const std::vector<int>& ring_sizes, int cx,
                     int cy) noexcept {
  for (std::size_t r = 0; r < ring_sizes.size(); ++r) {
    if (!fs.ring_contains(static_cast<int>(r), detail::octagon_unchecked(t, cx, cy, ring_sizes[r]))) return false;
  }
  return true;
}

struct GridAxis {
  int first;     // first grid coordinate (>= 0)
  int interior_lo, interior_hi;
};

GridAxis grid_axis(int extent, int m, int stride) {
  const int c = patch_center_offset(m);
  return {c % stride, c, extent - m + c};
}

// Scans one ladder size. Rows are independent; each writes only its own mask
// row and its own kept list, merged in row order afterwards.
template <bool Parallel>
void scan_level(const IntegralTables& t, const FeatureSet& fs, const LevelPlan& plan, int stride, ScaleLevel& level,
                std::vector<Candidate>& out) {
  const int w = t.width;
  const int h = t.height;
  const GridAxis ax = grid_axis(w, plan.m, stride);
  const GridAxis ay = grid_axis(h, plan.m, stride);
  const int rows = ay.first < h ? (h - 1 - ay.first) / stride + 1 : 0;

  level.m = plan.m;
  level.center_mask.assign(static_cast<std::size_t>(w) * h, 0);
  std::vector<std::vector<int>> kept_by_row(static_cast<std::size_t>(rows));
  std::int64_t tested = 0, kept = 0, border = 0;

  auto do_row = [&](int row, std::int64_t& tested_acc, std::int64_t& kept_acc, std::int64_t& border_acc) {
    const int cy = ay.first + row * stride;
    std::uint8_t* mask = level.center_mask.data() + static_cast<std::size_t>(cy) * w;
    const bool row_interior = cy >= ay.interior_lo && cy <= ay.interior_hi;
    auto& kept_row = kept_by_row[static_cast<std::size_t>(row)];
    for (int cx = ax.first; cx < w; cx += stride) {
      if (!row_interior || cx < ax.interior_lo || cx > ax.interior_hi) {
        mask[cx] = 1;
        ++border_acc;
        continue;
      }
      ++tested_acc;
      if (centre_survives(t, fs, plan.ring_sizes, cx, cy)) {
        mask[cx] = 1;
        kept_row.push_back(cx);
        ++kept_acc;
      }
    }
  };

  if constexpr (Parallel) {
#pragma omp parallel for schedule(dynamic, 4) reduction(+ : tested, kept, border)
    for (int row = 0; row < rows; ++row) do_row(row, tested, kept, border);
  } else {
    for (int row = 0; row < rows; ++row) do_row(row, tested, kept, border);
  }

  level.tested = tested;
  level.kept = kept;
  level.border_kept = border;
  for (int row = 0; row < rows; ++row) {
    const int cy = ay.first + row * stride;
    for (const int cx : kept_by_row[static_cast<std::size_t>(row)]) out.push_back({cx, cy, plan.m});
  }
}

template <bool Parallel>
ScreeningResult screen_impl(const GrayImage& image, const GrayImage& templ, const ScreeningConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  cfg.validate();
  check_template(templ);
  if (image.empty()) throw Error(ErrorKind::invalid_argument, "empty reference image");
  const double sigma = std_dev(templ);
  if (sigma < cfg.min_template_std) {
    throw Error(ErrorKind::flat_template, "template too flat: std-dev " + std::to_string(sigma) + " below " +
                                              std::to_string(cfg.min_template_std));
  }

  const int n = templ.width();
  std::vector<LevelPlan> plans;
  int max_radius = 1;
  for (const int m : scale_ladder(n, cfg)) {
    auto sizes = ring_half_sizes(m, cfg.ring_count);
    if (sizes.empty()) {
      throw Error(ErrorKind::invalid_argument, "ladder patch side " + std::to_string(m) + " is below the minimum " +
                                                   std::to_string(min_patch_side()) + "; raise alpha or use a larger template");
    }
    max_radius = std::max(max_radius, octagon_diamond_radius(sizes.front()));
    plans.push_back({m, std::move(sizes)});
  }
  if (std::none_of(plans.begin(), plans.end(),
                   [&](const LevelPlan& p) { return p.m <= image.width() && p.m <= image.height(); })) {
    throw Error(ErrorKind::invalid_argument, "reference image smaller than every ladder patch size");
  }

  const IntegralTables tables = Parallel ? build_tables(image, max_radius) : serial::build_tables(image, max_radius);

  ScreeningResult result;
  result.width = image.width();
  result.height = image.height();
  result.template_side = n;
  result.lambda = cfg.lambda;
  result.levels.resize(plans.size());
  for (std::size_t i = 0; i < plans.size(); ++i) {
    const FeatureSet fs = build_feature_set(templ, plans[i].m, cfg);
    scan_level<Parallel>(tables, fs, plans[i], cfg.stride, result.levels[i], result.candidates);
  }
  result.region_mask = footprint_mask(result.candidates, result.width, result.height, cfg.lambda);
  result.stats = prune_stats(result);
  result.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace

std::int64_t quantize(double f, double q) {
  if (!(q > 0)) throw Error(ErrorKind::invalid_argument, "quantization factor must be > 0");
  return static_cast<std::int64_t>(std::floor(f / q + 0.5));
}

void ScreeningConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::invalid_argument, msg); };
  if (!(alpha > 0)) fail("alpha must be > 0");
  if (!(beta >= alpha)) fail("beta must be >= alpha");
  if (!(lambda > 1)) fail("lambda must be > 1");
  if (ring_count < 1) fail("ring count must be >= 1");
  if (stride < 1) fail("stride must be >= 1");
  if (!(quantizer.q_mean > 0) || !(quantizer.q_std > 0) || !(quantizer.q_grad > 0)) {
    fail("quantization factors must be > 0");
  }
  if (!(min_template_std >= 0)) fail("min template std must be >= 0");
}

FeatureKey quantize_features(const RingFeatureVector& fv, const Quantizer& q) {
  FeatureKey key;
  key.cells.reserve(fv.rings.size() * 3);
  for (const auto& ring : fv.rings) {
    key.cells.push_back(quantize(ring.features.mean, q.q_mean));
    key.cells.push_back(quantize(ring.features.std, q.q_std));
    key.cells.push_back(quantize(ring.features.grad_mag, q.q_grad));
  }
  return key;
}

FeatureSet::FeatureSet(int ring_count, Quantizer q) : q_(q), rings_(static_cast<std::size_t>(ring_count)) {
  if (ring_count < 1) throw Error(ErrorKind::invalid_argument, "feature set needs at least one ring");
}

std::uint64_t FeatureSet::pack_cells(std::int64_t a, std::int64_t b, std::int64_t c) noexcept {
  return (biased(a) << 42) | (biased(b) << 21) | biased(c);
}

std::uint64_t FeatureSet::pack(const OctagonFeatures& f) const noexcept {
  return pack_cells(static_cast<std::int64_t>(std::floor(f.mean / q_.q_mean + 0.5)),
                    static_cast<std::int64_t>(std::floor(f.std / q_.q_std + 0.5)),
                    static_cast<std::int64_t>(std::floor(f.grad_mag / q_.q_grad + 0.5)));
}

void FeatureSet::insert_guard_banded(const RingFeatureVector& fv) {
  if (static_cast<int>(fv.rings.size()) != ring_count()) {
    throw Error(ErrorKind::invalid_argument, "feature vector ring count does not match the feature set");
  }
  auto band = [](double f, double q) {
    return std::array<std::int64_t, 3>{quantize(f - q / 2, q), quantize(f, q), quantize(f + q / 2, q)};
  };
  for (std::size_t r = 0; r < fv.rings.size(); ++r) {
    const auto& f = fv.rings[r].features;
    for (const auto a : band(f.mean, q_.q_mean))
      for (const auto b : band(f.std, q_.q_std))
        for (const auto c : band(f.grad_mag, q_.q_grad)) rings_[r].insert(pack_cells(a, b, c));
  }
  ++instances_;
}

bool FeatureSet::matches(const RingFeatureVector& fv) const {
  if (static_cast<int>(fv.rings.size()) != ring_count()) {
    throw Error(ErrorKind::invalid_argument, "feature vector ring count does not match the feature set");
  }
  for (std::size_t r = 0; r < fv.rings.size(); ++r) {
    if (!ring_contains(static_cast<int>(r), fv.rings[r].features)) return false;
  }
  return true;
}

void insert_guard_banded(FeatureSet& set, const RingFeatureVector& fv) { set.insert_guard_banded(fv); }

bool ring_match(const FeatureSet& set, const RingFeatureVector& fv) { return set.matches(fv); }

FeatureSet build_feature_set(const GrayImage& templ, int m, const ScreeningConfig& cfg) {
  cfg.validate();
  check_template(templ);
  const auto sizes = ring_half_sizes(m, cfg.ring_count);
  if (sizes.empty()) {
    throw Error(ErrorKind::invalid_argument, "patch side " + std::to_string(m) + " is too small for any ring");
  }
  const int radius = std::max(1, octagon_diamond_radius(sizes.front()));
  const int c = patch_center_offset(m);
  const int k_max = candidate_extent(m, cfg.lambda);

  FeatureSet fs(static_cast<int>(sizes.size()), cfg.quantizer);
  for (int k = m; k <= k_max; ++k) {
    const GrayImage scaled = resize_bilinear(templ, k, k);
    const GrayImage centre = crop_center(scaled, m, m);
    const IntegralTables t = serial::build_tables(centre, radius);
    fs.insert_guard_banded(ring_features(t, c, c, m, cfg.ring_count));
  }
  return fs;
}

std::vector<int> scale_ladder(int n, const ScreeningConfig& cfg) {
  cfg.validate();
  if (n < 1) throw Error(ErrorKind::invalid_argument, "template side must be >= 1");
  // Size m covers matches of side [m, m * lambda]; step down from beta*n until alpha*n is covered.
  std::vector<int> sizes;
  const double ratio = cfg.beta / cfg.alpha;
  double top = 1.0;  // lambda^(t-1)
  for (int t = 1; top < ratio * (1 - 1e-12); ++t, top *= cfg.lambda) {
    sizes.push_back(round_half_up(cfg.beta * n / (top * cfg.lambda)));
  }
  if (sizes.empty()) sizes.push_back(round_half_up(cfg.alpha * n));
  if (cfg.alpha <= 1.0 && 1.0 <= cfg.beta) sizes.push_back(n);
  std::sort(sizes.begin(), sizes.end(), std::greater<>());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  return sizes;
}

int candidate_extent(int m, double lambda) { return static_cast<int>(std::ceil(m * lambda - 1e-9)); }

std::vector<std::uint8_t> footprint_mask(const std::vector<Candidate>& candidates, int width, int height,
                                         double lambda) {
  // 2-D difference array, then prefix sums.
  std::vector<std::int32_t> diff(static_cast<std::size_t>(width + 1) * (height + 1), 0);
  auto at = [&](int x, int y) -> std::int32_t& { return diff[static_cast<std::size_t>(y) * (width + 1) + x]; };
  for (const auto& c : candidates) {
    const int side = candidate_extent(c.m, lambda);
    const int off = patch_center_offset(side);
    const int x0 = std::clamp(c.cx - off, 0, width);
    const int y0 = std::clamp(c.cy - off, 0, height);
    const int x1 = std::clamp(c.cx - off + side, 0, width);
    const int y1 = std::clamp(c.cy - off + side, 0, height);
    if (x0 >= x1 || y0 >= y1) continue;
    ++at(x0, y0);
    --at(x1, y0);
    --at(x0, y1);
    ++at(x1, y1);
  }
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(width) * height, 0);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (x > 0) at(x, y) += at(x - 1, y);
      if (y > 0) at(x, y) += at(x, y - 1);
      if (x > 0 && y > 0) at(x, y) -= at(x - 1, y - 1);
    }
  }
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) mask[static_cast<std::size_t>(y) * width + x] = at(x, y) > 0;
  return mask;
}

PruneStats prune_stats(const ScreeningResult& result) {
  PruneStats s;
  for (const auto& level : result.levels) {
    s.tested += level.tested;
    s.kept += level.kept;
    s.border_kept += level.border_kept;
  }
  s.patch_pruning = s.tested > 0 ? 1.0 - static_cast<double>(s.kept) / static_cast<double>(s.tested) : 0.0;
  const auto covered = std::count(result.region_mask.begin(), result.region_mask.end(), std::uint8_t{1});
  const double total = static_cast<double>(result.width) * result.height;
  s.region_fraction_kept = total > 0 ? static_cast<double>(covered) / total : 0.0;
  s.region_pruning = 1.0 - s.region_fraction_kept;
  s.seconds = result.stats.seconds;
  return s;
}

ScreeningResult keep_all(int width, int height, int template_side, const ScreeningConfig& cfg) {
  ScreeningResult result;
  result.width = width;
  result.height = height;
  result.template_side = template_side;
  result.lambda = cfg.lambda;
  for (const int m : scale_ladder(template_side, cfg)) {
    ScaleLevel level;
    level.m = m;
    level.center_mask.assign(static_cast<std::size_t>(width) * height, 0);
    const GridAxis ax = grid_axis(width, m, cfg.stride);
    const GridAxis ay = grid_axis(height, m, cfg.stride);
    for (int cy = ay.first; cy < height; cy += cfg.stride) {
      for (int cx = ax.first; cx < width; cx += cfg.stride) {
        level.center_mask[static_cast<std::size_t>(cy) * width + cx] = 1;
        if (cy < ay.interior_lo || cy > ay.interior_hi || cx < ax.interior_lo || cx > ax.interior_hi) {
          ++level.border_kept;
          continue;
        }
        ++level.tested;
        ++level.kept;
        result.candidates.push_back({cx, cy, m});
      }
    }
    result.levels.push_back(std::move(level));
  }
  result.region_mask = footprint_mask(result.candidates, width, height, cfg.lambda);
  result.stats = prune_stats(result);
  return result;
}

ScreeningResult screen(const GrayImage& image, const GrayImage& templ, const ScreeningConfig& cfg) {
  return screen_impl<true>(image, templ, cfg);
}

namespace serial {
ScreeningResult screen(const GrayImage& image, const GrayImage& templ, const ScreeningConfig& cfg) {
  return screen_impl<false>(image, templ, cfg);
}
}  // namespace serial

}  // namespace octascreen

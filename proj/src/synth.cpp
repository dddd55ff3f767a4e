#include "octascreen/synth.hpp"

#include "octascreen/error.hpp"
#include "octascreen/matcher.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

namespace octascreen {

namespace {

constexpr int kMaxAttempts = 100;

// Uniform double in [0, 1) from the top 53 bits; portable across standard libraries.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit(rng); }

int uniform_int(std::mt19937_64& rng, int lo, int hi) {  // inclusive
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

// Half extent of a side-S square rotated by angle, along either axis.
double rotated_half_extent(int side, double angle_deg) {
  const auto [c, s] = cos_sin_deg(angle_deg);
  return side / 2.0 * (std::abs(c) + std::abs(s));
}

// Smoothstep-interpolated lattice noise in [-1, 1] with the given cell size.
std::vector<double> value_noise(int width, int height, int cell, std::mt19937_64& rng) {
  const int gw = width / cell + 2;
  const int gh = height / cell + 2;
  std::vector<double> grid(static_cast<std::size_t>(gw) * gh);
  for (auto& g : grid) g = uniform(rng, -1.0, 1.0);
  auto g = [&](int a, int b) { return grid[static_cast<std::size_t>(b) * gw + a]; };
  std::vector<double> out(static_cast<std::size_t>(width) * height);
  for (int y = 0; y < height; ++y) {
    const double gy = static_cast<double>(y) / cell;
    const int iy = static_cast<int>(gy);
    const double fy = gy - iy;
    const double sy = fy * fy * (3 - 2 * fy);
    for (int x = 0; x < width; ++x) {
      const double gx = static_cast<double>(x) / cell;
      const int ix = static_cast<int>(gx);
      const double fx = gx - ix;
      const double sx = fx * fx * (3 - 2 * fx);
      const double top = g(ix, iy) + (g(ix + 1, iy) - g(ix, iy)) * sx;
      const double bot = g(ix, iy + 1) + (g(ix + 1, iy + 1) - g(ix, iy + 1)) * sx;
      out[static_cast<std::size_t>(y) * width + x] = top + (bot - top) * sy;
    }
  }
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept {
  // splitmix64 finaliser over a combined word
  std::uint64_t z = a * 0x9E3779B97F4A7C15ULL + b + 0x632BE59BD9B4E019ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

SynthCase extract_case(const GrayImage& image, int x0, int y0, int side, double angle, int out_side) {
  if (side < 1 || out_side < 1) throw Error(ErrorKind::invalid_argument, "case sides must be >= 1");
  SynthCase out;
  GroundTruth& t = out.truth;
  t.center_x = x0 + (side - 1) / 2.0;
  t.center_y = y0 + (side - 1) / 2.0;
  t.side = side;
  t.template_side = out_side;
  t.angle = angle;
  t.scale = static_cast<double>(side) / out_side;
  t.width = image.width();
  t.height = image.height();

  const double e = rotated_half_extent(side, angle);
  if (t.center_x - e < -0.5 || t.center_y - e < -0.5 || t.center_x + e > image.width() - 0.5 ||
      t.center_y + e > image.height() - 0.5) {
    throw Error(ErrorKind::bounds, "rotated source square leaves the image");
  }

  // The reference satisfies ref(c + q) = template(c_t + M q), M = [[cos, sin], [-sin, cos]]
  // (the mapping used by rotate()); sampling inverts it.
  const auto [c, s] = cos_sin_deg(angle);
  const double step = static_cast<double>(side) / out_side;
  out.templ = GrayImage(out_side, out_side);
  // Box-filtered when downscaling: ss x ss bilinear taps per template pixel.
  const int ss = std::max(1, static_cast<int>(std::ceil(step - 1e-9)));
  for (int v = 0; v < out_side; ++v) {
    for (int u = 0; u < out_side; ++u) {
      double acc = 0;
      for (int j = 0; j < ss; ++j) {
        const double dy = (v + (j + 0.5) / ss) * step - side / 2.0;
        for (int i = 0; i < ss; ++i) {
          const double dx = (u + (i + 0.5) / ss) * step - side / 2.0;
          acc += sample_bilinear(image, t.center_x + c * dx - s * dy, t.center_y + s * dx + c * dy);
        }
      }
      out.templ(u, v) = to_intensity(acc / (ss * ss));
    }
  }

  t.footprint.assign(image.size(), 0);
  const double half = side / 2.0 + 1e-9;
  for (int y = 0; y < image.height(); ++y)
    for (int x = 0; x < image.width(); ++x) {
      const double qx = x - t.center_x;
      const double qy = y - t.center_y;
      if (std::abs(c * qx + s * qy) <= half && std::abs(-s * qx + c * qy) <= half) {
        t.footprint[static_cast<std::size_t>(y) * image.width() + x] = 1;
        ++t.footprint_pixels;
      }
    }
  return out;
}

SynthCase make_case(const GrayImage& image, std::uint64_t seed, std::pair<double, double> scale_range,
                    double std_threshold, int out_side) {
  const auto [lo, hi] = scale_range;
  if (!(lo > 0) || !(hi >= lo)) throw Error(ErrorKind::invalid_argument, "scale range must satisfy 0 < lo <= hi");
  if (!(std_threshold >= 0)) throw Error(ErrorKind::invalid_argument, "std threshold must be >= 0");
  if (out_side < 1) throw Error(ErrorKind::invalid_argument, "template side must be >= 1");

  std::mt19937_64 rng(seed);
  for (int attempt = 1; attempt <= kMaxAttempts; ++attempt) {
    const double angle = uniform(rng, 0.0, 360.0);
    const double scale = uniform(rng, lo, hi);
    const int side = std::max(1, static_cast<int>(std::floor(out_side * scale + 0.5)));
    const double e = rotated_half_extent(side, angle);
    const double half = (side - 1) / 2.0;
    // Keep the rotated square at least half a pixel inside the border.
    const int x_lo = static_cast<int>(std::ceil(e - 0.5 - half));
    const int x_hi = static_cast<int>(std::floor(image.width() - 0.5 - e - half));
    const int y_lo = static_cast<int>(std::ceil(e - 0.5 - half));
    const int y_hi = static_cast<int>(std::floor(image.height() - 0.5 - e - half));
    if (x_lo > x_hi || y_lo > y_hi) continue;
    const int x0 = uniform_int(rng, x_lo, x_hi);
    const int y0 = uniform_int(rng, y_lo, y_hi);
    SynthCase sc = extract_case(image, x0, y0, side, angle, out_side);
    if (std_dev(sc.templ) >= std_threshold) {
      sc.attempts = attempt;
      return sc;
    }
  }
  throw Error(ErrorKind::retries_exhausted,
              "no template with std-dev >= " + std::to_string(std_threshold) + " after 100 attempts");
}

double overlap_preserved(const std::vector<std::uint8_t>& region_mask, const GroundTruth& truth) {
  if (region_mask.size() != truth.footprint.size()) {
    throw Error(ErrorKind::invalid_argument, "region mask and ground truth refer to different image sizes");
  }
  if (truth.footprint_pixels == 0) return 0.0;
  std::int64_t hit = 0;
  for (std::size_t i = 0; i < region_mask.size(); ++i) hit += (region_mask[i] != 0) & (truth.footprint[i] != 0);
  return static_cast<double>(hit) / static_cast<double>(truth.footprint_pixels);
}

double overlap_preserved(const ScreeningResult& result, const GroundTruth& truth) {
  return overlap_preserved(result.region_mask, truth);
}

GrayImage synthetic_scene(int width, int height, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t npix = static_cast<std::size_t>(width) * height;

  // Voronoi segments, each with its own base level and texture mix, over a
  // soft illumination field; then a scattering of flat-shaded shapes.
  struct Segment {
    double x, y, level;
    std::array<double, 4> weights;
  };
  constexpr std::array<int, 4> cells = {4, 8, 16, 32};
  const int segment_count = std::max(6, static_cast<int>(npix / 12000));
  std::vector<Segment> segments(static_cast<std::size_t>(segment_count));
  for (auto& seg : segments) {
    seg.x = uniform(rng, 0, width);
    seg.y = uniform(rng, 0, height);
    seg.level = uniform(rng, 40, 215);
    const double amp = unit(rng) < 0.35 ? uniform(rng, 0, 4) : uniform(rng, 8, 40);
    for (auto& w : seg.weights) w = amp * unit(rng);
  }
  std::array<std::vector<double>, 4> layers;
  for (std::size_t k = 0; k < cells.size(); ++k) layers[k] = value_noise(width, height, cells[k], rng);
  const std::vector<double> light = value_noise(width, height, 160, rng);

  std::vector<double> acc(npix);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const Segment* best = &segments.front();
      double best_d = 1e300;
      for (const auto& seg : segments) {
        const double d = (x - seg.x) * (x - seg.x) + (y - seg.y) * (y - seg.y);
        if (d < best_d) best_d = d, best = &seg;
      }
      const std::size_t i = static_cast<std::size_t>(y) * width + x;
      double v = best->level + 25.0 * light[i];
      for (std::size_t k = 0; k < cells.size(); ++k) v += best->weights[k] * layers[k][i];
      acc[i] = v;
    }

  const int shapes = std::max(8, static_cast<int>(npix / 8000));
  for (int s = 0; s < shapes; ++s) {
    const double cx = uniform(rng, 0, width);
    const double cy = uniform(rng, 0, height);
    const double ra = uniform(rng, 6, 50);
    const double rb = uniform(rng, 6, 50);
    const double th = uniform(rng, 0, std::numbers::pi);
    const double level = uniform(rng, -60, 60);
    const bool ellipse = (rng() & 1) != 0;
    const double c = std::cos(th), sn = std::sin(th);
    const double reach = std::max(ra, rb) * 1.5;
    const int x0 = std::max(0, static_cast<int>(cx - reach)), x1 = std::min(width - 1, static_cast<int>(cx + reach));
    const int y0 = std::max(0, static_cast<int>(cy - reach)), y1 = std::min(height - 1, static_cast<int>(cy + reach));
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) {
        const double u = (c * (x - cx) + sn * (y - cy)) / ra;
        const double v = (-sn * (x - cx) + c * (y - cy)) / rb;
        const bool inside = ellipse ? u * u + v * v <= 1.0 : std::abs(u) <= 1.0 && std::abs(v) <= 1.0;
        if (inside) acc[static_cast<std::size_t>(y) * width + x] += level;
      }
  }

  GrayImage img(width, height);
  for (std::size_t i = 0; i < npix; ++i) img.pixels()[i] = to_intensity(acc[i] + uniform(rng, -1, 1));
  return img;
}

BenchAggregates aggregate(const std::vector<CaseRecord>& cases) {
  BenchAggregates a;
  a.cases = static_cast<std::int64_t>(cases.size());
  if (cases.empty()) return a;
  double match_sum = 0;
  std::int64_t matched = 0, ok = 0;
  for (const auto& c : cases) {
    a.mean_overlap += c.overlap;
    a.mean_patch_pruning += c.patch_pruning;
    a.mean_region_pruning += c.region_pruning;
    a.mean_screen_seconds += c.screen_seconds;
    ok += c.success;
    if (c.match_seconds) {
      match_sum += *c.match_seconds;
      ++matched;
    }
  }
  const double n = static_cast<double>(cases.size());
  a.mean_overlap /= n;
  a.mean_patch_pruning /= n;
  a.mean_region_pruning /= n;
  a.mean_screen_seconds /= n;
  a.success_ratio = static_cast<double>(ok) / n;
  if (matched > 0) a.mean_match_seconds = match_sum / static_cast<double>(matched);
  return a;
}

BenchReport run_benchmark(const std::filesystem::path& dataset_dir, const BenchOptions& opts) {
  opts.screening.validate();
  if (opts.cases_per_image < 0) throw Error(ErrorKind::invalid_argument, "cases per image must be >= 0");
  std::error_code ec;
  if (!std::filesystem::is_directory(dataset_dir, ec)) {
    throw Error(ErrorKind::io, "dataset directory not found: " + dataset_dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dataset_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".pgm") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  BenchReport report;
  for (std::size_t img_index = 0; img_index < files.size(); ++img_index) {
    const std::string id = files[img_index].filename().string();
    GrayImage image;
    try {
      image = load_pgm(files[img_index]);
    } catch (const Error& e) {
      report.errors.push_back(id + ": " + e.what());
      continue;
    }
    for (int k = 0; k < opts.cases_per_image; ++k) {
      const std::uint64_t case_seed = mix_seed(mix_seed(opts.seed, img_index), static_cast<std::uint64_t>(k));
      try {
        const SynthCase sc = make_case(image, case_seed, {opts.screening.alpha, opts.screening.beta},
                                       opts.std_threshold, opts.template_side);
        const ScreeningResult res = screen(image, sc.templ, opts.screening);

        CaseRecord rec;
        rec.image_id = id;
        rec.case_index = k;
        rec.template_side = opts.template_side;
        rec.source_side = sc.truth.side;
        rec.angle = sc.truth.angle;
        rec.scale = sc.truth.scale;
        rec.overlap = overlap_preserved(res, sc.truth);
        rec.success = rec.overlap >= kSuccessOverlap;
        rec.center_kept = res.region_mask[static_cast<std::size_t>(sc.truth.patch_cy()) * image.width() +
                                          sc.truth.patch_cx()] != 0;
        rec.candidates = static_cast<std::int64_t>(res.candidates.size());
        rec.patch_pruning = res.stats.patch_pruning;
        rec.region_pruning = res.stats.region_pruning;
        rec.screen_seconds = res.stats.seconds;
        if (opts.run_match && !res.candidates.empty()) {
          const auto t0 = std::chrono::steady_clock::now();
          const MatchResult best = match_candidates(image, sc.templ, res, opts.angle_step);
          rec.match_seconds = seconds_since(t0);
          const double off = patch_center_offset(best.m);
          const double mx = best.cx - off + (best.m - 1) / 2.0;
          const double my = best.cy - off + (best.m - 1) / 2.0;
          rec.match_error_px = std::hypot(mx - sc.truth.center_x, my - sc.truth.center_y);
          rec.match_score = best.score;
        }
        report.cases.push_back(std::move(rec));
      } catch (const Error& e) {
        report.errors.push_back(id + " case " + std::to_string(k) + ": " + e.what());
      }
    }
  }
  report.aggregates = aggregate(report.cases);
  return report;
}

}  // namespace octascreen

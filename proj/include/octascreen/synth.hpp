#pragma once

#include "octascreen/image.hpp"
#include "octascreen/screening.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace octascreen {

/// Where and how a synthetic template was cut from its reference image.
struct GroundTruth {
  double center_x = 0;  // geometric centre of the source square
  double center_y = 0;
  int side = 0;           // source square side in the reference
  int template_side = 0;  // side of the emitted template
  double angle = 0;       // degrees; the reference region looks like rotate(template, angle)
  double scale = 1;       // side / template_side
  int width = 0;          // reference dimensions
  int height = 0;
  std::vector<std::uint8_t> footprint;  // width*height, pixel centres inside the rotated square
  std::int64_t footprint_pixels = 0;

  int patch_cx() const noexcept { return static_cast<int>(std::floor(center_x)); }
  int patch_cy() const noexcept { return static_cast<int>(std::floor(center_y)); }
};

struct SynthCase {
  GrayImage templ;
  GroundTruth truth;
  int attempts = 1;
};

/// Cuts the square of side `side` whose top-left (before rotation) is (x0, y0),
/// rotated by `angle` about its centre, and resamples it to out_side x out_side.
SynthCase extract_case(const GrayImage& image, int x0, int y0, int side, double angle, int out_side);

/// Seeded random location, rotation in [0, 360) and scale in `scale_range`;
/// resamples (up to 100 attempts) until the template's std-dev reaches
/// `std_threshold` and the rotated source square lies inside the image.
SynthCase make_case(const GrayImage& image, std::uint64_t seed, std::pair<double, double> scale_range,
                    double std_threshold = 20.0, int out_side = 32);

/// |footprint & kept| / |footprint|.
double overlap_preserved(const std::vector<std::uint8_t>& region_mask, const GroundTruth& truth);
double overlap_preserved(const ScreeningResult& result, const GroundTruth& truth);

/// Textured test scene: multi-octave value noise plus random flat shapes.
GrayImage synthetic_scene(int width, int height, std::uint64_t seed);

/// Deterministic 64-bit mixing for deriving per-case seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept;

struct CaseRecord {
  std::string image_id;
  int case_index = 0;
  int template_side = 0;
  int source_side = 0;
  double angle = 0;
  double scale = 1;
  double overlap = 0;
  bool success = false;
  bool center_kept = false;
  std::int64_t candidates = 0;
  double patch_pruning = 0;
  double region_pruning = 0;
  double screen_seconds = 0;
  std::optional<double> match_seconds;
  std::optional<double> match_error_px;
  std::optional<double> match_score;
};

struct BenchAggregates {
  std::int64_t cases = 0;
  double mean_overlap = 0;
  double mean_patch_pruning = 0;
  double mean_region_pruning = 0;
  double success_ratio = 0;
  double mean_screen_seconds = 0;
  std::optional<double> mean_match_seconds;
};

struct BenchReport {
  std::vector<CaseRecord> cases;
  std::vector<std::string> errors;  // unreadable images and failed cases, in order
  BenchAggregates aggregates;
};

struct BenchOptions {
  ScreeningConfig screening;  // alpha/beta double as the case scale range
  int cases_per_image = 2;
  std::uint64_t seed = 1;
  int template_side = 32;
  double std_threshold = 20.0;
  bool run_match = false;
  double angle_step = 10.0;
};

inline constexpr double kSuccessOverlap = 0.90;

/// Runs every *.pgm in `dataset_dir` (sorted by name) through make_case,
/// screen and optionally match_candidates.
BenchReport run_benchmark(const std::filesystem::path& dataset_dir, const BenchOptions& opts);

BenchAggregates aggregate(const std::vector<CaseRecord>& cases);

}  // namespace octascreen

#pragma once

#include "octascreen/features.hpp"
#include "octascreen/image.hpp"

#include <cstdint>
#include <numbers>
#include <unordered_set>
#include <vector>

namespace octascreen {

/// Quantization step per channel, in intensity units.
struct Quantizer {
  double q_mean = 8.0;
  double q_std = 8.0;
  double q_grad = 8.0;
};

/// floor(f / q + 1/2).
std::int64_t quantize(double f, double q);

struct ScreeningConfig {
  double alpha = 0.5;  // smallest match size, as a fraction of the template side
  double beta = 2.0;   // largest
  double lambda = std::numbers::sqrt2;
  int ring_count = 3;
  Quantizer quantizer;
  int stride = 1;
  double min_template_std = 1.0;

  /// Throws Error(invalid_argument) describing the first violated constraint.
  void validate() const;
};

/// Quantized (mean, std, grad) cells of every ring, ring-major.
struct FeatureKey {
  std::vector<std::int64_t> cells;
};

FeatureKey quantize_features(const RingFeatureVector& fv, const Quantizer& q);

/// Per-ring membership sets over quantized feature triples.
///
/// Each inserted vector marks, per ring, every combination of the cells
/// Q(f - q/2), Q(f), Q(f + q/2) across the three channels, so a query g with
/// |g - f| < q/2 in every channel of every ring is always found.
class FeatureSet {
 public:
  FeatureSet(int ring_count, Quantizer q);

  int ring_count() const noexcept { return static_cast<int>(rings_.size()); }
  const Quantizer& quantizer() const noexcept { return q_; }
  std::size_t key_count(int ring) const { return rings_.at(static_cast<std::size_t>(ring)).size(); }
  int instances() const noexcept { return instances_; }

  void insert_guard_banded(const RingFeatureVector& fv);
  /// True iff every ring's quantized triple is marked (AND across rings).
  bool matches(const RingFeatureVector& fv) const;
  bool ring_contains(int ring, const OctagonFeatures& f) const noexcept {
    return rings_[static_cast<std::size_t>(ring)].contains(pack(f));
  }

 private:
  std::uint64_t pack(const OctagonFeatures& f) const noexcept;
  static std::uint64_t pack_cells(std::int64_t a, std::int64_t b, std::int64_t c) noexcept;

  Quantizer q_;
  std::vector<std::unordered_set<std::uint64_t>> rings_;
  int instances_ = 0;
};

void insert_guard_banded(FeatureSet& set, const RingFeatureVector& fv);
bool ring_match(const FeatureSet& set, const RingFeatureVector& fv);

/// Feature set of ladder size m: the template rescaled to every k in
/// [m, ceil(m * lambda)], central m x m crop, ring features at the crop centre.
FeatureSet build_feature_set(const GrayImage& templ, int m, const ScreeningConfig& cfg);

/// Patch sides scanned for a template of side n, largest first.
std::vector<int> scale_ladder(int n, const ScreeningConfig& cfg);

/// A kept m x m patch centred at (cx, cy); top-left is (cx, cy) - patch_center_offset(m).
/// It stands for matches of side m .. candidate_extent(m, lambda) at that centre.
struct Candidate {
  int cx = 0;
  int cy = 0;
  int m = 0;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

/// Largest match side screened by ladder size m: ceil(m * lambda).
int candidate_extent(int m, double lambda);

struct PruneStats {
  std::int64_t tested = 0;       // interior centres evaluated, all ladder sizes
  std::int64_t kept = 0;         // interior centres that survived
  std::int64_t border_kept = 0;  // centres too close to the border to evaluate (kept, not tested)
  double patch_pruning = 0;      // 1 - kept / tested
  double region_pruning = 0;     // 1 - covered / total pixels
  double region_fraction_kept = 0;
  double seconds = 0;
};

struct ScaleLevel {
  int m = 0;
  std::int64_t tested = 0;
  std::int64_t kept = 0;
  std::int64_t border_kept = 0;
  std::vector<std::uint8_t> center_mask;  // width*height; 1 = kept (tested or border), 0 = pruned/not visited
};

struct ScreeningResult {
  int width = 0;
  int height = 0;
  int template_side = 0;
  double lambda = std::numbers::sqrt2;
  std::vector<ScaleLevel> levels;
  std::vector<Candidate> candidates;      // ordered by level, then row, then column
  std::vector<std::uint8_t> region_mask;  // width*height; union of candidate footprints (extent-sized)
  PruneStats stats;
};

ScreeningResult screen(const GrayImage& image, const GrayImage& templ, const ScreeningConfig& cfg);

/// Pruning figures recomputed from a result's levels and region mask.
PruneStats prune_stats(const ScreeningResult& result);

/// Union of the candidate_extent-sized squares centred on each candidate, as a width*height 0/1 mask.
std::vector<std::uint8_t> footprint_mask(const std::vector<Candidate>& candidates, int width, int height,
                                         double lambda);

/// Result that keeps every interior centre of every ladder size (no pruning).
ScreeningResult keep_all(int width, int height, int template_side, const ScreeningConfig& cfg);

namespace serial {
ScreeningResult screen(const GrayImage& image, const GrayImage& templ, const ScreeningConfig& cfg);
}  // namespace serial

}  // namespace octascreen

// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.
#include "octascreen/features.hpp"
#include "octascreen/integral.hpp"
#include "octascreen/matcher.hpp"
#include "octascreen/screening.hpp"
#include "octascreen/serialize.hpp"
#include "octascreen/synth.hpp"
#include "test_util.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

using namespace octascreen;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// 1. Every table kind against direct loops, exact integers.
Outcome integral_exactness() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1);
  std::int64_t checks = 0, failures = 0;
  for (int img_i = 0; img_i < 200; ++img_i) {
    const int w = 2 + static_cast<int>(rng() % 63);
    const int h = 2 + static_cast<int>(rng() % 63);
    const GrayImage img = testutil::random_image(w, h, rng());
    const IntegralTables t = build_tables(img, 9);
    for (const WeightKind k : kAllWeightKinds) {
      const Sat& sat = t.sat(k);
      const Rsat& rsat = t.rsat(k);
      for (int cy = 0; cy < h; ++cy)
        for (int cx = 0; cx < w; ++cx) {
          for (int n = 1; n <= 8; ++n) {
            if (!square_fits(w, h, cx, cy, n)) continue;
            ++checks;
            failures += square_region_sum(sat, cx, cy, n) !=
                        testutil::oracle_rect(k, img, cx - n + 1, cy - n + 1, cx + n, cy + n);
          }
          for (int r = 0; r <= 9; ++r) {
            if (!diamond_fits(w, h, cx, cy, r)) continue;
            ++checks;
            failures += diamond_region_sum(rsat, cx, cy, r) != testutil::oracle_diamond(k, img, cx, cy, r);
          }
        }
    }
  }
  const double secs = since(t0);
  return {failures == 0 && checks > 0 && secs < 30.0,
          fmt("%lld region sums, %lld mismatches, %.1f s (limit 30 s)", static_cast<long long>(checks),
              static_cast<long long>(failures), secs)};
}

// 2. Square, diamond and octagon features against per-pixel loops.
Outcome feature_oracles() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2);
  std::int64_t checks = 0, failures = 0;
  double worst = 0;
  auto close = [&](double a, double b, double floor = 1e-9) {
    ++checks;
    const double scale = std::max(std::abs(a), std::abs(b));
    const double err = std::abs(a - b);
    if (scale > 0) worst = std::max(worst, err / std::max(scale, floor));
    if (!testutil::rel_close(a, b, 1e-9, floor)) ++failures;
  };
  for (int c = 0; c < 50; ++c) {
    const int w = 40 + static_cast<int>(rng() % 25);
    const int h = 40 + static_cast<int>(rng() % 25);
    const GrayImage img = (c % 2) ? testutil::random_image(w, h, rng()) : testutil::smooth_random_image(w, h, rng());
    const int n = 1 + static_cast<int>(rng() % 12);
    const int r = static_cast<int>(std::floor(std::sqrt(2.0) * n + 0.5));
    const IntegralTables t = build_tables(img, r);
    for (int cy = 0; cy < h; ++cy)
      for (int cx = 0; cx < w; ++cx) {
        if (!square_fits(w, h, cx, cy, n) || !diamond_fits(w, h, cx, cy, r)) continue;
        const auto so = testutil::square_oracle(img, cx, cy, n);
        const auto d_o = testutil::diamond_oracle(img, cx, cy, r);
        const auto s = square_features(t, cx, cy, n);
        const auto d = diamond_features(t, cx, cy, r);
        const auto o = octagon_features(t, cx, cy, n);
        close(s.mean, so.mean), close(s.std, so.std, 1e-6), close(s.gx, so.gx), close(s.gy, so.gy);
        close(d.mean, d_o.mean), close(d.std, d_o.std, 1e-6), close(d.gx, d_o.gx), close(d.gy, d_o.gy);
        close(o.mean, (so.mean + d_o.mean) / 2);
        close(o.std, (so.std + d_o.std) / 2, 1e-6);
        close(o.grad_mag, std::hypot((so.gx + d_o.gx) / 2, (so.gy + d_o.gy) / 2));
      }
  }
  const double secs = since(t0);
  return {failures == 0 && secs < 10.0, fmt("%lld comparisons, %lld outside 1e-9 relative (worst %.2e), %.1f s (limit 10 s)",
                                           static_cast<long long>(checks), static_cast<long long>(failures), worst, secs)};
}

// 3. |g - f| < q/2 per channel always hits the guard-banded set.
Outcome guard_band() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> val(0.0, 255.0), qd(1.0, 16.0), off(-1.0, 1.0);
  int hits = 0;
  const int trials = 10000;
  for (int i = 0; i < trials; ++i) {
    const Quantizer q{qd(rng), qd(rng), qd(rng)};
    FeatureSet set(3, q);
    RingFeatureVector f, g;
    for (int r = 0; r < 3; ++r) {
      const OctagonFeatures a{val(rng), val(rng), val(rng)};
      const OctagonFeatures b{a.mean + 0.49999 * q.q_mean * off(rng), a.std + 0.49999 * q.q_std * off(rng),
                              a.grad_mag + 0.49999 * q.q_grad * off(rng)};
      f.rings.push_back({10 - r, a});
      g.rings.push_back({10 - r, b});
    }
    set.insert_guard_banded(f);
    hits += set.matches(g);
  }
  return {hits == trials, fmt("%d/%d positive lookups", hits, trials)};
}

// 4. Exact crops: the crop centre survives screening at m = n.
Outcome never_miss(std::string& report) {
  std::mt19937_64 rng(4);
  Json cases = Json::array();
  int kept = 0;
  const int sides[] = {32, 40, 48};
  for (int i = 0; i < 100; ++i) {
    const std::uint64_t seed = rng();
    const int n = sides[i % 3];
    const GrayImage img = synthetic_scene(200, 150, seed);
    // resample until the crop is textured enough to pass the flat-template check
    int x0 = 0, y0 = 0;
    GrayImage templ;
    do {
      x0 = static_cast<int>(rng() % static_cast<std::uint64_t>(200 - n + 1));
      y0 = static_cast<int>(rng() % static_cast<std::uint64_t>(150 - n + 1));
      templ = crop(img, x0, y0, n, n);
    } while (std_dev(templ) < 1.0);
    const ScreeningResult r = screen(img, templ, ScreeningConfig{});
    const Candidate truth{x0 + patch_center_offset(n), y0 + patch_center_offset(n), n};
    const bool hit = std::find(r.candidates.begin(), r.candidates.end(), truth) != r.candidates.end();
    kept += hit;
    cases.push_back({{"seed", seed},
                     {"x0", x0},
                     {"y0", y0},
                     {"side", n},
                     {"center_kept", hit},
                     {"candidates", r.candidates.size()},
                     {"patch_pruning", r.stats.patch_pruning}});
  }
  report = Json{{"cases", cases}, {"kept", kept}}.dump(2);
  return {kept == 100, fmt("true centre kept in %d/100 exact-crop cases", kept)};
}

// 5. Desk-scale benchmark over 20 synthetic 640x480 scenes.
Outcome desk_benchmark(const fs::path& dir, std::string& report, double& secs) {
  const auto t0 = Clock::now();
  BenchOptions opts;
  opts.cases_per_image = 2;
  opts.seed = 5;
  const BenchReport r = run_benchmark(dir, opts);
  secs = since(t0);
  report = to_json(r, false).dump(2);
  const auto& a = r.aggregates;
  const bool ok = a.cases == 40 && r.errors.empty() && a.success_ratio >= 0.95 && a.mean_patch_pruning >= 0.95 &&
                  a.mean_region_pruning >= 0.60 && secs < 300.0;
  return {ok, fmt("%lld cases: success %.1f%% (>= 95), patch pruning %.2f%% (>= 95), region pruning %.2f%% (>= 60), "
                  "mean overlap %.2f%%, %.1f s (limit 300 s)",
                  static_cast<long long>(a.cases), 100 * a.success_ratio, 100 * a.mean_patch_pruning,
                  100 * a.mean_region_pruning, 100 * a.mean_overlap, secs)};
}

// 6. Single-threaded screening time at 640x480 with a 32x32 template.
Outcome screening_speed(const fs::path& dir) {
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const GrayImage img = load_pgm(dir / "scene_00.pgm");
  const SynthCase sc = make_case(img, 6, {0.5, 2.0});
  std::vector<double> times;
  for (int i = 0; i < 5; ++i) {
    const auto t0 = Clock::now();
    const ScreeningResult r = screen(img, sc.templ, ScreeningConfig{});
    times.push_back(since(t0));
  }
  omp_set_num_threads(saved);
  std::sort(times.begin(), times.end());
  const double median = times[times.size() / 2];
  return {median <= 1.0, fmt("median %.3f s over 5 runs, 1 thread (limit 1.0 s)", median)};
}

// 7. Octagonal star mean varies less under rotation than the square mean.
Outcome rotation_robustness() {
  const int size = 129, c = 64, n = 12;
  GrayImage box(size, size, 0);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      const int d = std::max(std::abs(x - c), std::abs(y - c));
      if (d >= 10 && d <= 13) box(x, y) = 255;  // frame straddling the window edge
    }
  double smin = 1e300, smax = -1e300, omin = 1e300, omax = -1e300;
  for (int a = 0; a < 360; ++a) {
    const IntegralTables t = build_tables(rotate(box, a, 0), octagon_diamond_radius(n));
    const double s = square_features(t, c, c, n).mean;
    const double o = octagon_features(t, c, c, n).mean;
    smin = std::min(smin, s), smax = std::max(smax, s);
    omin = std::min(omin, o), omax = std::max(omax, o);
  }
  const double ratio = (omax - omin) / (smax - smin);
  return {ratio < 0.5, fmt("peak-to-peak mean over 0..359 deg: octagon %.2f, square %.2f, ratio %.3f (< 0.5)",
                           omax - omin, smax - smin, ratio)};
}

// 8. Screen + NCC against full-search NCC on rotated crops.
Outcome two_stage() {
  std::mt19937_64 rng(8);
  const ScreeningConfig cfg;
  int located = 0, faster = 0;
  double screened_total = 0, full_total = 0;
  for (int i = 0; i < 10; ++i) {
    const GrayImage img = synthetic_scene(240, 180, rng());
    SynthCase sc;
    do {
      const double angle = std::uniform_real_distribution<double>(0, 360)(rng);
      const int x0 = 40 + static_cast<int>(rng() % 130);
      const int y0 = 40 + static_cast<int>(rng() % 70);
      sc = extract_case(img, x0, y0, 32, angle, 32);
    } while (std_dev(sc.templ) < 20.0);

    auto t0 = Clock::now();
    const ScreeningResult r = screen(img, sc.templ, cfg);
    const MatchResult m = match_candidates(img, sc.templ, r, 10.0);
    const double screened = since(t0);
    t0 = Clock::now();
    const MatchResult full = match_exhaustive(img, sc.templ, cfg, 10.0);
    const double full_s = since(t0);

    const double mx = m.cx - patch_center_offset(m.m) + (m.m - 1) / 2.0;
    const double my = m.cy - patch_center_offset(m.m) + (m.m - 1) / 2.0;
    const double err = std::hypot(mx - sc.truth.center_x, my - sc.truth.center_y);
    located += err <= 5.0;
    faster += screened < full_s;
    screened_total += screened;
    full_total += full_s;
    (void)full;
  }
  return {located >= 9 && faster >= 8,
          fmt("centre within 5 px in %d/10 (>= 9); screened faster in %d/10 (>= 8); mean %.3f s vs %.3f s", located,
              faster, screened_total / 10, full_total / 10)};
}

void line(int id, const char* name, const Outcome& o) {
  std::printf("%s  %d  %-26s %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
  std::fflush(stdout);
}

}  // namespace

int main() {
  testutil::TempDir dir("acceptance");
  for (int i = 0; i < 20; ++i) {
    save_pgm(synthetic_scene(640, 480, mix_seed(2024, static_cast<std::uint64_t>(i))),
             dir / fmt("scene_%02d.pgm", i));
  }

  std::vector<bool> results;
  auto record = [&](int id, const char* name, const Outcome& o) {
    line(id, name, o);
    results.push_back(o.pass);
  };

  record(1, "integral exactness", integral_exactness());
  record(2, "feature oracles", feature_oracles());
  record(3, "guard-band guarantee", guard_band());
  std::string never_a, never_b;
  record(4, "never-miss identity", never_miss(never_a));
  write_file_atomic("acceptance_never_miss.json", never_a + "\n");
  std::string bench_a, bench_b;
  double bench_secs = 0;
  record(5, "desk-scale benchmark", desk_benchmark(dir.path(), bench_a, bench_secs));
  write_file_atomic("acceptance_bench.json", bench_a + "\n");
  record(6, "screening speed", screening_speed(dir.path()));
  record(7, "rotation robustness", rotation_robustness());
  record(8, "two-stage speedup", two_stage());

  never_miss(never_b);
  double again_secs = 0;
  desk_benchmark(dir.path(), bench_b, again_secs);
  record(9, "determinism",
         {never_a == never_b && bench_a == bench_b,
          fmt("never-miss report %s (%zu bytes), benchmark report %s (%zu bytes)",
              never_a == never_b ? "identical" : "DIFFERS", never_a.size(),
              bench_a == bench_b ? "identical" : "DIFFERS", bench_a.size())});

  const auto passed = std::count(results.begin(), results.end(), true);
  std::printf("%lld/%zu criteria passed\n", static_cast<long long>(passed), results.size());
  return passed == static_cast<long long>(results.size()) ? 0 : 1;
}

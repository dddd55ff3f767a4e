#include "octascreen/error.hpp"
#include "octascreen/image.hpp"
#include "octascreen/matcher.hpp"
#include "octascreen/screening.hpp"
#include "octascreen/serialize.hpp"
#include "octascreen/synth.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace octascreen;

namespace {

enum Exit { kOk = 0, kUsage = 1, kIo = 2, kFlat = 3, kRetries = 4, kNoCandidates = 5 };

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::io:
    case ErrorKind::format:
      return kIo;
    case ErrorKind::flat_template:
      return kFlat;
    case ErrorKind::retries_exhausted:
      return kRetries;
    case ErrorKind::no_candidates:
      return kNoCandidates;
    case ErrorKind::bounds:
    case ErrorKind::invalid_argument:
      break;
  }
  return kUsage;
}

void add_screening_flags(CLI::App* cmd, ScreeningConfig& cfg) {
  cmd->add_option("--alpha", cfg.alpha, "Smallest match side as a fraction of the template side")->capture_default_str();
  cmd->add_option("--beta", cfg.beta, "Largest match side as a fraction of the template side")->capture_default_str();
  cmd->add_option("--lambda", cfg.lambda, "Ratio between ladder sizes")->capture_default_str();
  cmd->add_option("--rings", cfg.ring_count, "Nested central areas per patch")->capture_default_str();
  cmd->add_option("--q-mean", cfg.quantizer.q_mean, "Quantization step for the mean")->capture_default_str();
  cmd->add_option("--q-std", cfg.quantizer.q_std, "Quantization step for the std-dev")->capture_default_str();
  cmd->add_option("--q-grad", cfg.quantizer.q_grad, "Quantization step for the gradient")->capture_default_str();
  cmd->add_option("--stride", cfg.stride, "Centre grid spacing in pixels")->capture_default_str();
  cmd->add_option("--min-template-std", cfg.min_template_std, "Reject templates flatter than this")
      ->capture_default_str();
}

GrayImage mask_image(const std::vector<std::uint8_t>& mask, int w, int h) {
  GrayImage img(w, h);
  for (std::size_t i = 0; i < mask.size(); ++i) img.pixels()[i] = mask[i] ? 255 : 0;
  return img;
}

struct ScreenArgs {
  std::string image, templ, out_mask, out_stats, out_candidates, scale_masks;
  bool timings = false;
};

int cmd_screen(const ScreenArgs& a, const ScreeningConfig& cfg) {
  const GrayImage image = load_pgm(a.image);
  const GrayImage templ = load_pgm(a.templ);
  const ScreeningResult r = screen(image, templ, cfg);
  if (!a.out_mask.empty()) save_pgm(mask_image(r.region_mask, r.width, r.height), a.out_mask);
  if (!a.scale_masks.empty()) {
    fs::create_directories(a.scale_masks);
    for (const auto& level : r.levels) {
      save_pgm(mask_image(level.center_mask, r.width, r.height),
               fs::path(a.scale_masks) / ("centers_m" + std::to_string(level.m) + ".pgm"));
    }
  }
  if (!a.out_candidates.empty()) write_json(candidates_json(r), a.out_candidates);
  const Json stats = stats_json(r, cfg, a.timings);
  if (!a.out_stats.empty()) {
    write_json(stats, a.out_stats);
  } else {
    std::cout << stats.dump(2) << "\n";
  }
  std::fprintf(stderr, "patch pruning %.4f  region pruning %.4f  candidates %zu  time %.3f s\n",
               r.stats.patch_pruning, r.stats.region_pruning, r.candidates.size(), r.stats.seconds);
  return kOk;
}

struct MatchArgs {
  std::string image, templ, candidates, out;
  double angle_step = 10.0;
  bool exhaustive = false;
};

int cmd_match(const MatchArgs& a, const ScreeningConfig& cfg) {
  const GrayImage image = load_pgm(a.image);
  const GrayImage templ = load_pgm(a.templ);
  MatchResult best;
  if (a.exhaustive) {
    best = match_exhaustive(image, templ, cfg, a.angle_step);
  } else {
    ScreeningResult cands;
    if (!a.candidates.empty()) {
      cands = candidates_from_json(read_json(a.candidates));
      if (cands.width != image.width() || cands.height != image.height()) {
        throw Error(ErrorKind::invalid_argument, "candidates file was produced for a different image size");
      }
    } else {
      cands = screen(image, templ, cfg);
    }
    best = match_candidates(image, templ, cands, a.angle_step);
  }
  const Json j = to_json(best);
  if (!a.out.empty()) write_json(j, a.out);
  std::cout << j.dump(2) << "\n";
  return kOk;
}

struct SynthArgs {
  std::string image, out_template, out_truth;
  std::uint64_t seed = 1;
  double scale_min = 0.5, scale_max = 2.0, std_threshold = 20.0;
  int template_side = 32;
};

int cmd_synth(const SynthArgs& a) {
  const GrayImage image = load_pgm(a.image);
  const SynthCase sc = make_case(image, a.seed, {a.scale_min, a.scale_max}, a.std_threshold, a.template_side);
  save_pgm(sc.templ, a.out_template);
  Json truth = to_json(sc.truth);
  truth["seed"] = a.seed;
  truth["attempts"] = sc.attempts;
  if (!a.out_truth.empty()) {
    write_json(truth, a.out_truth);
  } else {
    std::cout << truth.dump(2) << "\n";
  }
  return kOk;
}

struct BenchArgs {
  std::string dir, report;
  bool timings = false;
};

int cmd_bench(const BenchArgs& a, const BenchOptions& opts) {
  const BenchReport report = run_benchmark(a.dir, opts);
  if (!a.report.empty()) write_json(to_json(report, a.timings), a.report);
  for (const auto& e : report.errors) std::fprintf(stderr, "skipped: %s\n", e.c_str());
  const auto& g = report.aggregates;
  std::printf("cases %lld  success %.4f  overlap %.4f  patch pruning %.4f  region pruning %.4f  screen %.3f s",
              static_cast<long long>(g.cases), g.success_ratio, g.mean_overlap, g.mean_patch_pruning,
              g.mean_region_pruning, g.mean_screen_seconds);
  if (g.mean_match_seconds) std::printf("  match %.3f s", *g.mean_match_seconds);
  std::printf("\n");
  return kOk;
}

struct SceneArgs {
  std::string out;
  int width = 640, height = 480, count = 1;
  std::uint64_t seed = 1;
};

int cmd_scene(const SceneArgs& a) {
  if (a.width < 1 || a.height < 1 || a.count < 1) {
    throw Error(ErrorKind::invalid_argument, "scene size and count must be >= 1");
  }
  if (a.count == 1) {
    save_pgm(synthetic_scene(a.width, a.height, a.seed), a.out);
    return kOk;
  }
  fs::create_directories(a.out);
  for (int i = 0; i < a.count; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "scene_%03d.pgm", i);
    save_pgm(synthetic_scene(a.width, a.height, mix_seed(a.seed, static_cast<std::uint64_t>(i))),
             fs::path(a.out) / name);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Screening pre-processor for rotation- and scale-invariant template matching"};
  app.require_subcommand(1);

  ScreeningConfig cfg;
  ScreenArgs sa;
  auto* s = app.add_subcommand("screen", "Prune reference patches that cannot match the template");
  s->add_option("image", sa.image, "Reference PGM")->required();
  s->add_option("template", sa.templ, "Square template PGM")->required();
  s->add_option("--out-mask", sa.out_mask, "Merged region mask PGM (255 = kept)");
  s->add_option("--out-stats", sa.out_stats, "Stats JSON (stdout when omitted)");
  s->add_option("--out-candidates", sa.out_candidates, "Candidate list JSON for the match command");
  s->add_option("--scale-masks", sa.scale_masks, "Directory for per-size centre masks");
  s->add_flag("--timings", sa.timings, "Include wall time in the stats JSON");
  add_screening_flags(s, cfg);

  MatchArgs ma;
  auto* m = app.add_subcommand("match", "Second-stage NCC over screened candidates");
  m->add_option("image", ma.image, "Reference PGM")->required();
  m->add_option("template", ma.templ, "Square template PGM")->required();
  m->add_option("--candidates", ma.candidates, "Candidate JSON from screen (screens in-process when omitted)");
  m->add_option("--angle-step", ma.angle_step, "Rotation step in degrees; must divide 360")->capture_default_str();
  m->add_option("--out", ma.out, "Also write the result JSON here");
  m->add_flag("--exhaustive", ma.exhaustive, "Skip screening and test every patch");
  add_screening_flags(m, cfg);

  SynthArgs ya;
  auto* y = app.add_subcommand("synth", "Cut a rotated, rescaled template with ground truth");
  y->add_option("image", ya.image, "Reference PGM")->required();
  y->add_option("--seed", ya.seed)->capture_default_str();
  y->add_option("--out-template", ya.out_template, "Template PGM")->required();
  y->add_option("--out-truth", ya.out_truth, "Ground-truth JSON (stdout when omitted)");
  y->add_option("--scale-min", ya.scale_min)->capture_default_str();
  y->add_option("--scale-max", ya.scale_max)->capture_default_str();
  y->add_option("--std-threshold", ya.std_threshold)->capture_default_str();
  y->add_option("--template-side", ya.template_side)->capture_default_str();

  BenchArgs ba;
  BenchOptions bo;
  auto* b = app.add_subcommand("bench", "Synthetic-case benchmark over a directory of PGMs");
  b->add_option("dataset", ba.dir, "Directory of reference PGMs")->required();
  b->add_option("--report", ba.report, "Report JSON");
  b->add_option("--cases", bo.cases_per_image, "Cases per image")->capture_default_str();
  b->add_option("--seed", bo.seed)->capture_default_str();
  b->add_option("--template-side", bo.template_side)->capture_default_str();
  b->add_option("--std-threshold", bo.std_threshold)->capture_default_str();
  b->add_option("--angle-step", bo.angle_step)->capture_default_str();
  b->add_flag("--match", bo.run_match, "Also run the NCC second stage");
  b->add_flag("--timings", ba.timings, "Include wall times in the report");
  add_screening_flags(b, cfg);

  SceneArgs ca;
  auto* c = app.add_subcommand("scene", "Write synthetic textured reference images");
  c->add_option("out", ca.out, "Output PGM, or directory when --count > 1")->required();
  c->add_option("--width", ca.width)->capture_default_str();
  c->add_option("--height", ca.height)->capture_default_str();
  c->add_option("--count", ca.count)->capture_default_str();
  c->add_option("--seed", ca.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*s || *m || *b) cfg.validate();
    if (*s) return cmd_screen(sa, cfg);
    if (*m) return cmd_match(ma, cfg);
    if (*y) return cmd_synth(ya);
    if (*b) {
      bo.screening = cfg;
      return cmd_bench(ba, bo);
    }
    return cmd_scene(ca);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kIo;
  }
}

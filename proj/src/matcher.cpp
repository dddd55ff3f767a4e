#include "octascreen/matcher.hpp"

#include "octascreen/error.hpp"

#include <cmath>
#include <map>
#include <string>
#include <tuple>

namespace octascreen {

namespace {

constexpr double kFlatEps = 1e-9;

// Rotated, zero-mean probe restricted to its in-source samples.
struct Probe {
  int side = 0;
  double angle = 0;
  std::vector<std::ptrdiff_t> offsets;  // into the reference, relative to the window's top-left
  std::vector<double> centred;          // template value minus support mean
  double norm_sq = 0;                   // sum of centred^2
};

Probe make_probe(const GrayImage& sized_template, double angle, int image_width) {
  const MaskedImage rotated = rotate_masked(sized_template, angle, 0);
  Probe p;
  p.side = sized_template.width();
  p.angle = angle;
  double sum = 0;
  for (int y = 0; y < p.side; ++y)
    for (int x = 0; x < p.side; ++x) {
      if (!rotated.valid[static_cast<std::size_t>(y) * p.side + x]) continue;
      p.offsets.push_back(static_cast<std::ptrdiff_t>(y) * image_width + x);
      p.centred.push_back(rotated.image(x, y));
      sum += rotated.image(x, y);
    }
  const double mean = p.centred.empty() ? 0.0 : sum / static_cast<double>(p.centred.size());
  for (auto& v : p.centred) {
    v -= mean;
    p.norm_sq += v * v;
  }
  return p;
}

double probe_score(const std::uint8_t* window, const Probe& p) noexcept {
  std::int64_t sw = 0, sww = 0;
  double swt = 0;
  const std::size_t count = p.offsets.size();
  for (std::size_t k = 0; k < count; ++k) {
    const std::int64_t v = window[p.offsets[k]];
    sw += v;
    sww += v * v;
    swt += static_cast<double>(v) * p.centred[k];
  }
  if (count == 0) return 0.0;
  const double n = static_cast<double>(count);
  const double var_w = static_cast<double>(sww) - static_cast<double>(sw) * static_cast<double>(sw) / n;
  if (var_w <= kFlatEps || p.norm_sq <= kFlatEps) return 0.0;
  return swt / std::sqrt(var_w * p.norm_sq);
}

// Higher score first; ties by (scale, angle, cy, cx) ascending.
bool better(const MatchResult& a, const MatchResult& b) {
  if (a.score != b.score) return a.score > b.score;
  return std::tie(a.scale, a.angle, a.cy, a.cx) < std::tie(b.scale, b.angle, b.cy, b.cx);
}

void check_angle_step(double step) {
  if (!(step > 0) || step > 360) throw Error(ErrorKind::invalid_argument, "angle step must be in (0, 360]");
  const double count = 360.0 / step;
  if (std::abs(count - std::round(count)) > 1e-9) {
    throw Error(ErrorKind::invalid_argument, "angle step must divide 360");
  }
}

template <bool Parallel>
MatchResult match_impl(const GrayImage& image, const GrayImage& templ, const ScreeningResult& cands,
                       double angle_step) {
  check_angle_step(angle_step);
  if (cands.candidates.empty()) throw Error(ErrorKind::no_candidates, "no candidates to match");
  if (templ.empty()) throw Error(ErrorKind::invalid_argument, "empty template");

  const int steps = static_cast<int>(std::lround(360.0 / angle_step));
  std::map<int, std::vector<Probe>> probes;
  for (const auto& c : cands.candidates) {
    if (probes.contains(c.m)) continue;
    const GrayImage sized = resize_bilinear(templ, c.m, c.m);
    auto& list = probes[c.m];
    for (int a = 0; a < steps; ++a) list.push_back(make_probe(sized, a * angle_step, image.width()));
  }

  const auto& list = cands.candidates;
  const int count = static_cast<int>(list.size());
  const double n = templ.width();
  MatchResult best;
  best.score = -2;

  auto eval = [&](int i, MatchResult& local) {
    const Candidate& c = list[static_cast<std::size_t>(i)];
    const int off = patch_center_offset(c.m);
    const int x0 = c.cx - off;
    const int y0 = c.cy - off;
    if (x0 < 0 || y0 < 0 || x0 + c.m > image.width() || y0 + c.m > image.height()) return;
    const std::uint8_t* window = image.pixels().data() + static_cast<std::size_t>(y0) * image.width() + x0;
    for (const Probe& p : probes.at(c.m)) {
      const MatchResult r{c.cx, c.cy, c.m, c.m / n, p.angle, probe_score(window, p)};
      if (better(r, local)) local = r;
    }
  };

  if constexpr (Parallel) {
#pragma omp parallel
    {
      MatchResult local;
      local.score = -2;
#pragma omp for schedule(dynamic, 16) nowait
      for (int i = 0; i < count; ++i) eval(i, local);
#pragma omp critical(octascreen_match_reduce)
      if (better(local, best)) best = local;
    }
  } else {
    for (int i = 0; i < count; ++i) eval(i, best);
  }

  if (best.score < -1.5) throw Error(ErrorKind::no_candidates, "no candidate window fits inside the image");
  return best;
}

}  // namespace

double ncc_score(const GrayImage& image, const GrayImage& probe, int cx, int cy) {
  const int x0 = cx - patch_center_offset(probe.width());
  const int y0 = cy - patch_center_offset(probe.height());
  if (x0 < 0 || y0 < 0 || x0 + probe.width() > image.width() || y0 + probe.height() > image.height()) {
    throw Error(ErrorKind::bounds, "probe window at (" + std::to_string(cx) + "," + std::to_string(cy) +
                                       ") leaves the image");
  }
  double sp = 0, sw = 0;
  const double count = static_cast<double>(probe.size());
  for (int y = 0; y < probe.height(); ++y)
    for (int x = 0; x < probe.width(); ++x) {
      sp += probe(x, y);
      sw += image(x0 + x, y0 + y);
    }
  const double mp = sp / count;
  const double mw = sw / count;
  double cov = 0, vp = 0, vw = 0;
  for (int y = 0; y < probe.height(); ++y)
    for (int x = 0; x < probe.width(); ++x) {
      const double a = probe(x, y) - mp;
      const double b = image(x0 + x, y0 + y) - mw;
      cov += a * b;
      vp += a * a;
      vw += b * b;
    }
  if (vp <= kFlatEps || vw <= kFlatEps) return 0.0;
  return cov / std::sqrt(vp * vw);
}

MatchResult match_candidates(const GrayImage& image, const GrayImage& templ, const ScreeningResult& candidates,
                             double angle_step) {
  return match_impl<true>(image, templ, candidates, angle_step);
}

MatchResult match_exhaustive(const GrayImage& image, const GrayImage& templ, const ScreeningConfig& cfg,
                             double angle_step) {
  return match_impl<true>(image, templ, keep_all(image.width(), image.height(), templ.width(), cfg), angle_step);
}

namespace serial {
MatchResult match_candidates(const GrayImage& image, const GrayImage& templ, const ScreeningResult& candidates,
                             double angle_step) {
  return match_impl<false>(image, templ, candidates, angle_step);
}
}  // namespace serial

}  // namespace octascreen

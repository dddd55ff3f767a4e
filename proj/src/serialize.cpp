#include "octascreen/serialize.hpp"

#include "octascreen/error.hpp"

#include <fstream>
#include <sstream>

namespace octascreen {

Json to_json(const ScreeningConfig& cfg) {
  return {{"alpha", cfg.alpha},
          {"beta", cfg.beta},
          {"lambda", cfg.lambda},
          {"rings", cfg.ring_count},
          {"q_mean", cfg.quantizer.q_mean},
          {"q_std", cfg.quantizer.q_std},
          {"q_grad", cfg.quantizer.q_grad},
          {"stride", cfg.stride},
          {"min_template_std", cfg.min_template_std}};
}

Json stats_json(const ScreeningResult& result, const ScreeningConfig& cfg, bool timings) {
  Json levels = Json::array();
  for (const auto& l : result.levels) {
    levels.push_back({{"m", l.m},
                      {"extent", candidate_extent(l.m, result.lambda)},
                      {"tested", l.tested},
                      {"kept", l.kept},
                      {"border_kept", l.border_kept}});
  }
  Json stats = {{"tested", result.stats.tested},
                {"kept", result.stats.kept},
                {"border_kept", result.stats.border_kept},
                {"candidates", result.candidates.size()},
                {"patch_pruning", result.stats.patch_pruning},
                {"region_pruning", result.stats.region_pruning},
                {"region_fraction_kept", result.stats.region_fraction_kept}};
  if (timings) stats["seconds"] = result.stats.seconds;
  return {{"width", result.width},
          {"height", result.height},
          {"template_side", result.template_side},
          {"config", to_json(cfg)},
          {"levels", std::move(levels)},
          {"stats", std::move(stats)}};
}

Json candidates_json(const ScreeningResult& result) {
  Json list = Json::array();
  for (const auto& c : result.candidates) list.push_back({c.cx, c.cy, c.m});
  return {{"width", result.width},
          {"height", result.height},
          {"template_side", result.template_side},
          {"lambda", result.lambda},
          {"candidates", std::move(list)}};
}

ScreeningResult candidates_from_json(const Json& j) {
  try {
    ScreeningResult r;
    r.width = j.at("width").get<int>();
    r.height = j.at("height").get<int>();
    r.template_side = j.at("template_side").get<int>();
    r.lambda = j.at("lambda").get<double>();
    for (const auto& c : j.at("candidates")) {
      if (!c.is_array() || c.size() != 3) throw Error(ErrorKind::format, "candidate entries must be [cx, cy, m]");
      r.candidates.push_back({c[0].get<int>(), c[1].get<int>(), c[2].get<int>()});
    }
    return r;
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::format, std::string("malformed candidates file: ") + e.what());
  }
}

Json to_json(const MatchResult& m) {
  return {{"cx", m.cx}, {"cy", m.cy}, {"m", m.m}, {"scale", m.scale}, {"angle", m.angle}, {"score", m.score}};
}

Json to_json(const GroundTruth& t) {
  return {{"center_x", t.center_x},
          {"center_y", t.center_y},
          {"side", t.side},
          {"template_side", t.template_side},
          {"angle", t.angle},
          {"scale", t.scale},
          {"width", t.width},
          {"height", t.height},
          {"footprint_pixels", t.footprint_pixels}};
}

namespace {

template <class T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

}  // namespace

Json to_json(const CaseRecord& c, bool timings) {
  Json j = {{"image_id", c.image_id},
            {"case_index", c.case_index},
            {"template_side", c.template_side},
            {"source_side", c.source_side},
            {"angle", c.angle},
            {"scale", c.scale},
            {"overlap_preserved", c.overlap},
            {"success", c.success},
            {"center_kept", c.center_kept},
            {"candidates", c.candidates},
            {"patch_pruning", c.patch_pruning},
            {"region_pruning", c.region_pruning}};
  if (timings) {
    j["screen_time"] = c.screen_seconds;
    j["match_time"] = optional_json(c.match_seconds);
  }
  j["match_error_px"] = optional_json(c.match_error_px);
  j["match_score"] = optional_json(c.match_score);
  return j;
}

Json to_json(const BenchReport& report, bool timings) {
  Json cases = Json::array();
  for (const auto& c : report.cases) cases.push_back(to_json(c, timings));
  const auto& a = report.aggregates;
  Json agg = {{"cases", a.cases},
              {"mean_overlap", a.mean_overlap},
              {"mean_patch_pruning", a.mean_patch_pruning},
              {"mean_region_pruning", a.mean_region_pruning},
              {"success_ratio", a.success_ratio},
              {"success_threshold", kSuccessOverlap}};
  if (timings) {
    agg["mean_screen_time"] = a.mean_screen_seconds;
    agg["mean_match_time"] = optional_json(a.mean_match_seconds);
  }
  return {{"cases", std::move(cases)}, {"errors", report.errors}, {"aggregates", std::move(agg)}};
}

void write_json(const Json& j, const std::filesystem::path& path) { write_file_atomic(path, j.dump(2) + "\n"); }

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return Json::parse(ss.str());
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::format, path.string() + ": " + e.what());
  }
}

}  // namespace octascreen

#pragma once

#include "octascreen/matcher.hpp"
#include "octascreen/screening.hpp"
#include "octascreen/synth.hpp"

#include <json.hpp>

#include <filesystem>

namespace octascreen {

using Json = nlohmann::ordered_json;

Json to_json(const ScreeningConfig& cfg);

/// Screening summary: config, per-level counts and pruning figures.
/// `seconds` is included only when `timings` is set.
Json stats_json(const ScreeningResult& result, const ScreeningConfig& cfg, bool timings);

/// Candidate list with the image geometry needed to rebuild a ScreeningResult.
Json candidates_json(const ScreeningResult& result);
ScreeningResult candidates_from_json(const Json& j);

Json to_json(const MatchResult& m);
Json to_json(const GroundTruth& t);  // footprint itself is omitted; pixel count is kept
Json to_json(const CaseRecord& c, bool timings);
Json to_json(const BenchReport& report, bool timings);

/// dump(2) plus trailing newline, written through write_file_atomic.
void write_json(const Json& j, const std::filesystem::path& path);
Json read_json(const std::filesystem::path& path);

}  // namespace octascreen

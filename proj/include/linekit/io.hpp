#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "linekit/detect.hpp"
#include "linekit/geom.hpp"
#include "linekit/match.hpp"

namespace linekit {

using Json = nlohmann::json;

/// Parses JSON text; throws FormatError on malformed input.
Json parse_json(std::string_view text);
/// Two-space indented dump with a trailing newline. Non-finite numbers throw FormatError.
std::string dump_json(const Json& j);
Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);

// {"segments": [[x1, y1, x2, y2], ...]}
Json segments_to_json(std::span<const LineSegment> segments);
std::vector<LineSegment> segments_from_json(const Json& j);

// Adds "scores": [[y_avg, y_inlier], ...] and, when given, "junctions": [[x, y], ...].
Json scored_segments_to_json(std::span<const ScoredSegment> segments, std::span<const Point2> junctions = {});
/// Scores default to 1 when the document has none.
std::vector<ScoredSegment> scored_segments_from_json(const Json& j);

Json junctions_to_json(std::span<const Point2> junctions);
/// Reads "junctions"; when absent, collects the distinct segment endpoints.
std::vector<Point2> junctions_from_json(const Json& j);

// {"matches": [[i, j, score], ...], "unmatched_1": [...], "unmatched_2": [...]}
Json matches_to_json(const LineMatchSet& m);
LineMatchSet matches_from_json(const Json& j);

// {"homography": [9 reals, row-major, canonical scale]}; a bare 9-element array is accepted on input.
Json homography_to_json(const Homography& h);
Homography homography_from_json(const Json& j);

/// One evaluation pair of a manifest; paths are resolved against the manifest's directory.
struct ManifestPair {
    std::filesystem::path segments1;
    std::filesystem::path segments2;
    std::filesystem::path homography;
    std::optional<std::filesystem::path> matches;
};

// {"pairs": [{"segments1": ..., "segments2": ..., "homography": ..., "matches": ...}, ...]}
std::vector<ManifestPair> manifest_from_json(const Json& j, const std::filesystem::path& base_dir);
std::vector<ManifestPair> read_manifest(const std::filesystem::path& path);

} // namespace linekit

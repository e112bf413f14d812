#include "linekit/io.hpp"

#include <algorithm>
#include <cmath>

#include "linekit/error.hpp"
#include "linekit/maps.hpp"

namespace linekit {

namespace {

double number(const Json& v, const char* what)
{
    if (!v.is_number()) {
        throw FormatError(std::string(what) + ": expected a number");
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
        throw FormatError(std::string(what) + ": non-finite number");
    }
    return d;
}

std::size_t index_value(const Json& v, const char* what)
{
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        throw FormatError(std::string(what) + ": expected a non-negative integer");
    }
    return v.get<std::size_t>();
}

const Json& field(const Json& j, const char* key)
{
    if (!j.is_object() || !j.contains(key)) {
        throw FormatError(std::string("missing \"") + key + "\" field");
    }
    return j.at(key);
}

const Json& array_field(const Json& j, const char* key)
{
    const Json& v = field(j, key);
    if (!v.is_array()) {
        throw FormatError(std::string("\"") + key + "\" must be an array");
    }
    return v;
}

Json finite(double v)
{
    if (!std::isfinite(v)) {
        throw FormatError("cannot serialize a non-finite number");
    }
    return v;
}

std::vector<std::size_t> index_list(const Json& j, const char* key)
{
    std::vector<std::size_t> out;
    if (j.contains(key)) {
        for (const auto& v : array_field(j, key)) {
            out.push_back(index_value(v, key));
        }
    }
    return out;
}

} // namespace

Json parse_json(std::string_view text)
{
    try {
        return Json::parse(text.begin(), text.end());
    } catch (const Json::parse_error& e) {
        throw FormatError(std::string("malformed JSON: ") + e.what());
    }
}

std::string dump_json(const Json& j)
{
    try {
        return j.dump(2) + "\n";
    } catch (const Json::exception& e) {
        throw FormatError(std::string("cannot serialize JSON: ") + e.what());
    }
}

Json read_json(const std::filesystem::path& path)
{
    const auto bytes = read_file_bytes(path);
    return parse_json(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

void write_json(const std::filesystem::path& path, const Json& j)
{
    const std::string text = dump_json(j);
    write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

Json segments_to_json(std::span<const LineSegment> segments)
{
    Json arr = Json::array();
    for (const auto& s : segments) {
        arr.push_back({finite(s.e1.x), finite(s.e1.y), finite(s.e2.x), finite(s.e2.y)});
    }
    return Json{{"segments", std::move(arr)}};
}

std::vector<LineSegment> segments_from_json(const Json& j)
{
    std::vector<LineSegment> out;
    for (const auto& row : array_field(j, "segments")) {
        if (!row.is_array() || row.size() != 4) {
            throw FormatError("each segment must be [x1, y1, x2, y2]");
        }
        out.push_back({{number(row[0], "segment"), number(row[1], "segment")},
                       {number(row[2], "segment"), number(row[3], "segment")}});
    }
    return out;
}

Json scored_segments_to_json(std::span<const ScoredSegment> segments, std::span<const Point2> junctions)
{
    std::vector<LineSegment> plain;
    Json scores = Json::array();
    for (const auto& s : segments) {
        plain.push_back(s.segment);
        scores.push_back({finite(s.avg_score), finite(s.inlier_ratio)});
    }
    Json out = segments_to_json(plain);
    out["scores"] = std::move(scores);
    if (!junctions.empty()) {
        out["junctions"] = junctions_to_json(junctions)["junctions"];
    }
    return out;
}

std::vector<ScoredSegment> scored_segments_from_json(const Json& j)
{
    const auto segments = segments_from_json(j);
    std::vector<ScoredSegment> out;
    out.reserve(segments.size());
    const bool has_scores = j.contains("scores");
    if (has_scores && (!j["scores"].is_array() || j["scores"].size() != segments.size())) {
        throw FormatError("\"scores\" must have one entry per segment");
    }
    for (std::size_t k = 0; k < segments.size(); ++k) {
        ScoredSegment s{segments[k], 1.0, 1.0};
        if (has_scores) {
            const auto& row = j["scores"][k];
            if (!row.is_array() || row.size() != 2) {
                throw FormatError("each score must be [y_avg, y_inlier]");
            }
            s.avg_score = number(row[0], "score");
            s.inlier_ratio = number(row[1], "score");
        }
        out.push_back(s);
    }
    return out;
}

Json junctions_to_json(std::span<const Point2> junctions)
{
    Json arr = Json::array();
    for (const auto& p : junctions) {
        arr.push_back({finite(p.x), finite(p.y)});
    }
    return Json{{"junctions", std::move(arr)}};
}

std::vector<Point2> junctions_from_json(const Json& j)
{
    std::vector<Point2> out;
    if (j.is_object() && j.contains("junctions")) {
        for (const auto& row : array_field(j, "junctions")) {
            if (!row.is_array() || row.size() != 2) {
                throw FormatError("each junction must be [x, y]");
            }
            out.push_back({number(row[0], "junction"), number(row[1], "junction")});
        }
        return out;
    }
    for (const auto& s : segments_from_json(j)) {
        for (const Point2 p : {s.e1, s.e2}) {
            if (std::find(out.begin(), out.end(), p) == out.end()) {
                out.push_back(p);
            }
        }
    }
    return out;
}

Json matches_to_json(const LineMatchSet& m)
{
    Json arr = Json::array();
    for (const auto& x : m.matches) {
        arr.push_back({x.i, x.j, finite(x.score)});
    }
    return Json{{"matches", std::move(arr)}, {"unmatched_1", m.unmatched_1}, {"unmatched_2", m.unmatched_2}};
}

LineMatchSet matches_from_json(const Json& j)
{
    LineMatchSet out;
    for (const auto& row : array_field(j, "matches")) {
        if (!row.is_array() || row.size() != 3) {
            throw FormatError("each match must be [i, j, score]");
        }
        out.matches.push_back({index_value(row[0], "match"), index_value(row[1], "match"), number(row[2], "match")});
    }
    out.unmatched_1 = index_list(j, "unmatched_1");
    out.unmatched_2 = index_list(j, "unmatched_2");
    return out;
}

Json homography_to_json(const Homography& h)
{
    Json arr = Json::array();
    for (double v : h.row_major()) {
        arr.push_back(finite(v));
    }
    return Json{{"homography", std::move(arr)}};
}

Homography homography_from_json(const Json& j)
{
    const Json& arr = j.is_array() ? j : array_field(j, "homography");
    if (!arr.is_array() || arr.size() != 9) {
        throw FormatError("a homography needs 9 row-major values");
    }
    std::array<double, 9> v{};
    for (std::size_t k = 0; k < 9; ++k) {
        v[k] = number(arr[k], "homography");
    }
    try {
        return Homography::from_row_major(v);
    } catch (const SingularHomography& e) {
        throw FormatError(std::string("invalid homography: ") + e.what());
    }
}

std::vector<ManifestPair> manifest_from_json(const Json& j, const std::filesystem::path& base_dir)
{
    const auto resolve = [&](const Json& v, const char* what) {
        if (!v.is_string()) {
            throw FormatError(std::string(what) + " must be a path string");
        }
        const std::filesystem::path p(v.get<std::string>());
        return p.is_absolute() ? p : base_dir / p;
    };
    std::vector<ManifestPair> out;
    for (const auto& entry : array_field(j, "pairs")) {
        ManifestPair p;
        p.segments1 = resolve(field(entry, "segments1"), "segments1");
        p.segments2 = resolve(field(entry, "segments2"), "segments2");
        p.homography = resolve(field(entry, "homography"), "homography");
        if (entry.contains("matches")) {
            p.matches = resolve(entry["matches"], "matches");
        }
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<ManifestPair> read_manifest(const std::filesystem::path& path)
{
    return manifest_from_json(read_json(path), path.parent_path());
}

} // namespace linekit

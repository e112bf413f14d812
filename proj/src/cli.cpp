#include "linekit/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "linekit/adapt.hpp"
#include "linekit/bench.hpp"
#include "linekit/detect.hpp"
#include "linekit/error.hpp"
#include "linekit/eval.hpp"
#include "linekit/hest.hpp"
#include "linekit/io.hpp"
#include "linekit/maps.hpp"
#include "linekit/match.hpp"
#include "linekit/overlay.hpp"
#include "linekit/synth.hpp"

namespace linekit::cli {

namespace fs = std::filesystem;

namespace {

struct Common {
    bool json = false;
    std::uint64_t seed = 0;
};

void require_file(const std::string& path)
{
    if (!fs::is_regular_file(path)) {
        throw IoError("input file not found: " + path);
    }
}

void require_output(const std::string& path)
{
    const fs::path parent = fs::path(path).parent_path();
    if (!parent.empty() && !fs::is_directory(parent)) {
        throw IoError("output directory does not exist: " + parent.string());
    }
}

void add_detection_flags(CLI::App& cmd, DetectionParams& p)
{
    cmd.add_option("--junction-threshold", p.junction_threshold, "junction map threshold")->capture_default_str();
    cmd.add_option("--nms-radius", p.junction_nms_radius, "junction suppression radius (px)")->capture_default_str();
    cmd.add_option("--samples", p.n_samples, "points sampled per candidate")->capture_default_str();
    cmd.add_option("--xi-avg", p.xi_avg, "average score gate")->capture_default_str();
    cmd.add_option("--xi-inlier", p.xi_inlier, "inlier ratio gate")->capture_default_str();
    cmd.add_option("--lambda", p.lambda_radius, "search radius growth with length")->capture_default_str();
    cmd.add_option("--r-min", p.r_min, "minimal search radius (px)")->capture_default_str();
    cmd.add_option("--xi-cs", p.xi_cs, "candidate selection distance (px)")->capture_default_str();
    cmd.add_option("--min-length", p.min_length, "drop shorter segments (px)")->capture_default_str();
    cmd.add_flag("--cs", p.use_candidate_selection, "enable candidate selection");
}

void add_match_flags(CLI::App& cmd, MatchParams& p)
{
    cmd.add_option("--gap", p.gap, "alignment gap score")->capture_default_str();
    cmd.add_option("--max-samples", p.max_samples, "descriptor samples per line")->capture_default_str();
    cmd.add_option("--min-spacing", p.min_spacing, "minimal sample spacing (px)")->capture_default_str();
    cmd.add_option("--top-k", p.top_k_prefilter, "candidates kept by the prefilter")->capture_default_str();
}

void emit(std::ostream& out, const Common& c, Json summary, const std::string& text)
{
    if (c.json) {
        summary["seed"] = c.seed;
        out << dump_json(summary);
    } else {
        out << text << "\n";
    }
}

Json with_seed(Json j, std::uint64_t seed)
{
    j["seed"] = seed;
    return j;
}

std::vector<std::optional<std::size_t>> uncoloured(std::size_t n)
{
    return std::vector<std::optional<std::size_t>>(n);
}

// ---- synth

struct SynthArgs {
    std::string kind = "polygon";
    std::size_t size = 256;
    std::string out_dir;
    bool view = false;
    double occlusion = 0.0;
    bool overlay = false;
};

int do_synth(const SynthArgs& a, const Common& c, std::ostream& out)
{
    const auto kind = parse_scene_kind(a.kind);
    if (!kind) {
        throw InvalidArgument("unknown scene kind: " + a.kind);
    }
    fs::create_directories(a.out_dir);
    if (!fs::is_directory(a.out_dir)) {
        throw IoError("cannot create output directory: " + a.out_dir);
    }
    const fs::path dir(a.out_dir);
    const SceneLabel scene = render_scene(*kind, c.seed, a.size, a.size);

    SceneLabel label = scene;
    OracleMaps maps;
    Json doc;
    if (a.view || a.occlusion > 0.0) {
        const Homography h = a.view ? sample_homography(c.seed, HomographyConfig{}, a.size, a.size) : Homography::identity();
        label.image = warp_map(scene.image, h, a.size, a.size).first;
        label.segments = visible_segments(scene.segments, h, a.size, a.size, 0.0);
        label.junctions.clear();
        for (const auto& s : label.segments) {
            for (const Point2 p : {s.e1, s.e2}) {
                if (std::find(label.junctions.begin(), label.junctions.end(), p) == label.junctions.end()) {
                    label.junctions.push_back(p);
                }
            }
        }
        std::vector<Ellipse> occluders;
        if (a.occlusion > 0.0) {
            std::vector<std::size_t> parents;
            label = synthesize_occlusions(label, a.occlusion, c.seed, &occluders, &parents);
            doc["parents"] = parents;
        }
        maps.junctions = splat_junctions(label.junctions, a.size, a.size);
        maps.heatmap = rasterize_heatmap(label.segments, a.size, a.size);
        maps.descriptors = oracle_descriptor_map(h, a.size, a.size, occluders);
        write_json(dir / "homography.json", with_seed(homography_to_json(h), c.seed));
    } else {
        maps = oracle_maps(scene, Homography::identity());
    }

    doc["segments"] = segments_to_json(label.segments)["segments"];
    doc["junctions"] = junctions_to_json(label.junctions)["junctions"];
    doc["kind"] = a.kind;
    doc["structure"] = scene.structure;
    doc["height"] = a.size;
    doc["width"] = a.size;
    doc["seed"] = c.seed;
    write_pgm(label.image, dir / "scene.pgm", "seed " + std::to_string(c.seed));
    write_json(dir / "segments.json", doc);
    write_map(maps.junctions, dir / "J.lmap");
    write_map(maps.heatmap, dir / "H.lmap");
    write_map(maps.descriptors, dir / "D.lmap");
    if (a.overlay) {
        write_ppm(render_overlay(label.image, label.segments, uncoloured(label.segments.size())), dir / "overlay.ppm");
    }
    emit(out, c,
         Json{{"subcommand", "synth"}, {"out_dir", a.out_dir}, {"segments", label.segments.size()},
              {"junctions", label.junctions.size()}},
         "synth: " + std::to_string(label.segments.size()) + " segments, " + std::to_string(label.junctions.size()) +
             " junctions -> " + a.out_dir);
    return kExitOk;
}

// ---- detect

struct DetectArgs {
    std::string junctions;
    std::string heatmap;
    std::string out;
    bool refine = false;
    std::string image;
    std::string overlay;
    DetectionParams params;
};

int do_detect(const DetectArgs& a, const Common& c, std::ostream& out)
{
    require_file(a.junctions);
    require_file(a.heatmap);
    require_output(a.out);
    if (!a.overlay.empty()) {
        require_file(a.image);
        require_output(a.overlay);
    }
    a.params.validate();
    const TensorMap j = read_map(a.junctions);
    const TensorMap h = read_map(a.heatmap);
    if (!j.same_size(h)) {
        throw SizeMismatch("junction and line maps differ in size");
    }
    const auto junctions = extract_junctions(j, a.params);
    auto segments = detect_segments_from_junctions(junctions, h, a.params);
    if (a.refine) {
        for (auto& s : segments) {
            s = refine_endpoints(s, h, a.params);
        }
    }
    write_json(a.out, with_seed(scored_segments_to_json(segments, junctions), c.seed));
    if (!a.overlay.empty()) {
        std::vector<LineSegment> plain;
        for (const auto& s : segments) {
            plain.push_back(s.segment);
        }
        write_ppm(render_overlay(read_pgm(a.image), plain, uncoloured(plain.size())), a.overlay);
    }
    emit(out, c, Json{{"subcommand", "detect"}, {"out", a.out}, {"segments", segments.size()}, {"junctions", junctions.size()}},
         "detect: " + std::to_string(segments.size()) + " segments from " + std::to_string(junctions.size()) +
             " junctions -> " + a.out);
    return kExitOk;
}

// ---- match

struct MatchArgs {
    std::string lines1;
    std::string lines2;
    std::string desc1;
    std::string desc2;
    std::string out;
    std::string baseline = "nw";
    bool no_mutual = false;
    std::string image1;
    std::string image2;
    std::string overlay;
    MatchParams params;
};

int do_match(const MatchArgs& a, const Common& c, std::ostream& out)
{
    for (const auto& p : {a.lines1, a.lines2, a.desc1, a.desc2}) {
        require_file(p);
    }
    require_output(a.out);
    if (!a.overlay.empty()) {
        require_file(a.image1);
        require_file(a.image2);
        require_output(a.overlay);
    }
    MatchParams params = a.params;
    params.mutual_check = !a.no_mutual;
    params.validate();
    const auto l1 = segments_from_json(read_json(a.lines1));
    const auto l2 = segments_from_json(read_json(a.lines2));
    const TensorMap d1 = read_map(a.desc1);
    const TensorMap d2 = read_map(a.desc2);
    LineMatchSet m;
    if (a.baseline == "nw") {
        m = match_lines(l1, l2, d1, d2, params);
    } else if (a.baseline == "average") {
        m = match_lines_baseline(BaselineStrategy::average_descriptor, l1, l2, d1, d2, params);
    } else if (a.baseline == "nn") {
        m = match_lines_baseline(BaselineStrategy::nn_average, l1, l2, d1, d2, params);
    } else if (a.baseline == "endpoint") {
        m = match_lines_baseline(BaselineStrategy::endpoint_only, l1, l2, d1, d2, params);
    } else {
        throw InvalidArgument("unknown matcher: " + a.baseline);
    }
    write_json(a.out, with_seed(matches_to_json(m), c.seed));
    if (!a.overlay.empty()) {
        write_ppm(render_match_overlay(read_pgm(a.image1), l1, read_pgm(a.image2), l2, m), a.overlay);
    }
    emit(out, c, Json{{"subcommand", "match"}, {"out", a.out}, {"matches", m.matches.size()}},
         "match: " + std::to_string(m.matches.size()) + " matches -> " + a.out);
    return kExitOk;
}

// ---- adapt

struct AdaptArgs {
    std::string image;
    std::string oracle;
    std::string maps_dir;
    std::string out;
    std::string overlay;
    AdaptationParams params;
};

Predictor maps_dir_predictor(const fs::path& dir, std::vector<Homography>& views)
{
    const Json doc = read_json(dir / "homographies.json");
    const Json& arr = doc.is_object() ? doc.at("homographies") : doc;
    if (!arr.is_array()) {
        throw FormatError("homographies.json must hold an array of homographies");
    }
    std::vector<std::pair<TensorMap, TensorMap>> maps;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        views.push_back(homography_from_json(arr[i]));
        const std::string k = std::to_string(i);
        maps.emplace_back(read_map(dir / ("J_" + k + ".lmap")), read_map(dir / ("H_" + k + ".lmap")));
    }
    return precomputed_predictor(std::move(maps));
}

int do_adapt(AdaptArgs a, const Common& c, std::ostream& out)
{
    require_file(a.image);
    require_output(a.out);
    if (a.oracle.empty() == a.maps_dir.empty()) {
        throw InvalidArgument("give exactly one of --oracle and --maps-dir");
    }
    if (!a.oracle.empty()) {
        require_file(a.oracle);
    } else if (!fs::is_directory(a.maps_dir)) {
        throw IoError("maps directory not found: " + a.maps_dir);
    }
    a.params.seed = c.seed;
    a.params.validate();
    const TensorMap image = read_pgm(a.image);

    AggregatedMaps agg;
    if (!a.oracle.empty()) {
        const Json doc = read_json(a.oracle);
        SceneLabel label;
        label.image = image;
        label.segments = segments_from_json(doc);
        label.junctions = junctions_from_json(doc);
        agg = aggregate_maps(oracle_predictor(label), image, a.params);
    } else {
        std::vector<Homography> views;
        const Predictor p = maps_dir_predictor(a.maps_dir, views);
        agg = aggregate_maps(p, image, views);
    }
    const auto labels = detect_segments(agg.junctions, agg.heatmap, a.params.detection);
    std::vector<Point2> junctions = extract_junctions(agg.junctions, a.params.detection);
    write_json(a.out, with_seed(scored_segments_to_json(labels, junctions), c.seed));
    if (!a.overlay.empty()) {
        std::vector<LineSegment> plain;
        for (const auto& s : labels) {
            plain.push_back(s.segment);
        }
        write_ppm(render_overlay(image, plain, uncoloured(plain.size())), a.overlay);
    }
    emit(out, c, Json{{"subcommand", "adapt"}, {"out", a.out}, {"segments", labels.size()}},
         "adapt: " + std::to_string(labels.size()) + " pseudo-label segments -> " + a.out);
    return kExitOk;
}

// ---- evaluate

struct EvaluateArgs {
    std::string pairs;
    double epsilon = 5.0;
    std::string distance = "structural";
    std::string out;
};

Json nullable(std::optional<double> v)
{
    return v ? Json(*v) : Json(nullptr);
}

int do_evaluate(const EvaluateArgs& a, const Common& c, std::ostream& out)
{
    require_file(a.pairs);
    if (!a.out.empty()) {
        require_output(a.out);
    }
    const auto distance = parse_line_distance(a.distance);
    if (!distance) {
        throw InvalidArgument("unknown distance: " + a.distance);
    }
    if (!(a.epsilon > 0.0)) {
        throw InvalidArgument("epsilon must be positive");
    }
    const auto manifest = read_manifest(a.pairs);
    for (const auto& p : manifest) {
        require_file(p.segments1.string());
        require_file(p.segments2.string());
        require_file(p.homography.string());
        if (p.matches) {
            require_file(p.matches->string());
        }
    }
    Json per_pair = Json::array();
    struct Mean {
        double sum = 0.0;
        std::size_t n = 0;
        void add(std::optional<double> v)
        {
            if (v) {
                sum += *v;
                ++n;
            }
        }
        Json value() const { return n > 0 ? Json(sum / static_cast<double>(n)) : Json(nullptr); }
    };
    Mean rep;
    Mean le;
    Mean precision;
    Mean recall;
    Mean accuracy;
    for (const auto& p : manifest) {
        const EvalPair pair{segments_from_json(read_json(p.segments1)), segments_from_json(read_json(p.segments2)),
                            homography_from_json(read_json(p.homography)), a.epsilon, *distance};
        std::optional<double> r;
        std::optional<double> l;
        if (!pair.segments1.empty() || !pair.segments2.empty()) {
            r = repeatability(pair);
        }
        try {
            l = localization_error(pair);
        } catch (const EmptyResult&) {
        }
        Json entry{{"segments1", p.segments1.string()}, {"rep", nullable(r)}, {"le", nullable(l)}};
        rep.add(r);
        le.add(l);
        if (p.matches) {
            const LineMatchSet m = matches_from_json(read_json(*p.matches));
            const auto gt = gt_correspondences(pair);
            const auto pr = match_precision_recall(m, gt);
            const double acc = matching_accuracy(m, gt);
            entry["precision"] = pr.precision;
            entry["recall"] = pr.recall;
            entry["accuracy"] = acc;
            precision.add(pr.precision);
            recall.add(pr.recall);
            accuracy.add(acc);
        }
        per_pair.push_back(std::move(entry));
    }
    Json report{{"epsilon", a.epsilon},
                {"distance", std::string(to_string(*distance))},
                {"pairs", per_pair},
                {"aggregate",
                 {{"rep", rep.value()},
                  {"le", le.value()},
                  {"precision", precision.value()},
                  {"recall", recall.value()},
                  {"accuracy", accuracy.value()}}},
                {"seed", c.seed}};
    if (!a.out.empty()) {
        write_json(a.out, report);
    }
    std::ostringstream text;
    text << "evaluate: " << manifest.size() << " pairs, Rep-" << a.epsilon << " " << report["aggregate"]["rep"].dump()
         << ", LE-" << a.epsilon << " " << report["aggregate"]["le"].dump();
    if (accuracy.n > 0) {
        text << ", P " << report["aggregate"]["precision"].dump() << ", R " << report["aggregate"]["recall"].dump()
             << ", accuracy " << report["aggregate"]["accuracy"].dump();
    }
    Json summary = report;
    summary["subcommand"] = "evaluate";
    emit(out, c, summary, text.str());
    return kExitOk;
}

// ---- estimate-homography

struct EstimateArgs {
    std::string matches;
    std::string lines1;
    std::string lines2;
    std::string out;
    RansacParams params;
};

int do_estimate(EstimateArgs a, const Common& c, std::ostream& out)
{
    for (const auto& p : {a.matches, a.lines1, a.lines2}) {
        require_file(p);
    }
    require_output(a.out);
    a.params.seed = c.seed;
    a.params.validate();
    const LineMatchSet m = matches_from_json(read_json(a.matches));
    const auto l1 = segments_from_json(read_json(a.lines1));
    const auto l2 = segments_from_json(read_json(a.lines2));
    std::vector<SegmentPair> pairs;
    for (const auto& x : m.matches) {
        if (x.i >= l1.size() || x.j >= l2.size()) {
            throw FormatError("match index out of range of the line files");
        }
        pairs.emplace_back(l1[x.i], l2[x.j]);
    }
    const RansacResult r = ransac_homography(pairs, a.params);
    Json doc = homography_to_json(r.h);
    doc["inliers"] = r.inliers;
    doc["iterations"] = r.iterations;
    doc["seed"] = c.seed;
    write_json(a.out, doc);
    emit(out, c, Json{{"subcommand", "estimate-homography"}, {"out", a.out}, {"inliers", r.inliers.size()},
                      {"homography", doc["homography"]}},
         "estimate-homography: " + std::to_string(r.inliers.size()) + " of " + std::to_string(pairs.size()) +
             " matches are inliers -> " + a.out);
    return kExitOk;
}

// ---- bench

struct BenchArgs {
    double scale = 1.0;
    std::vector<int> only;
};

int do_bench(const BenchArgs& a, const Common& c, std::ostream& out)
{
    if (!(a.scale > 0.0 && a.scale <= 1.0)) {
        throw InvalidArgument("--scale must lie in (0, 1]");
    }
    const bench::Options opt{a.scale, c.seed};
    using Fn = bench::CriterionResult (*)(const bench::Options&);
    const Fn all[] = {bench::nw_oracle_equivalence, bench::detector_recovery, bench::matching_end_to_end,
                      bench::adaptation_consistency, bench::line_ransac,   bench::metric_fixtures,
                      bench::format_round_trips,    bench::parameter_defaults};
    bool ok = true;
    Json rows = Json::array();
    for (int id = 1; id <= 8; ++id) {
        if (!a.only.empty() && std::find(a.only.begin(), a.only.end(), id) == a.only.end()) {
            continue;
        }
        const auto r = all[id - 1](opt);
        ok = ok && r.passed;
        if (c.json) {
            rows.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}, {"seconds", r.seconds}});
        } else {
            out << bench::format_line(r) << "\n" << std::flush;
        }
    }
    if (c.json) {
        out << dump_json(Json{{"subcommand", "bench"}, {"criteria", rows}, {"passed", ok}, {"seed", c.seed}});
    }
    return ok ? kExitOk : kExitFailure;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Line detection, description and matching toolkit", "linekit"};
    app.require_subcommand(1);
    Common common;
    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_flag("--json", common.json, "machine-readable summary on stdout");
        cmd->add_option("--seed", common.seed, "64-bit seed recorded in every output")->capture_default_str();
    };

    SynthArgs synth;
    auto* s = app.add_subcommand("synth", "render a synthetic scene with oracle maps");
    add_common(s);
    s->add_option("--kind", synth.kind, "polygon|star|lines|checkerboard|stripes|cube")->capture_default_str();
    s->add_option("--size", synth.size, "image side (px), at least 64")->capture_default_str();
    s->add_option("--out-dir", synth.out_dir, "output directory")->required();
    s->add_flag("--view", synth.view, "render a random homographic view (writes homography.json)");
    s->add_option("--occlusion", synth.occlusion, "hide this fraction of line length behind ellipses")
        ->capture_default_str();
    s->add_flag("--overlay", synth.overlay, "also write overlay.ppm");

    DetectArgs detect;
    auto* d = app.add_subcommand("detect", "detect segments from junction and line maps");
    add_common(d);
    d->add_option("--junctions", detect.junctions, "junction map (LMAP)")->required();
    d->add_option("--heatmap", detect.heatmap, "line heatmap (LMAP)")->required();
    d->add_option("--out", detect.out, "segments JSON")->required();
    d->add_flag("--refine", detect.refine, "quarter-pixel endpoint refinement");
    d->add_option("--image", detect.image, "PGM image for --overlay");
    d->add_option("--overlay", detect.overlay, "overlay PPM path");
    add_detection_flags(*d, detect.params);

    MatchArgs match;
    auto* m = app.add_subcommand("match", "match two line sets through their descriptors");
    add_common(m);
    m->add_option("--lines1", match.lines1, "segments JSON of image 1")->required();
    m->add_option("--lines2", match.lines2, "segments JSON of image 2")->required();
    m->add_option("--desc1", match.desc1, "descriptor map of image 1 (LMAP)")->required();
    m->add_option("--desc2", match.desc2, "descriptor map of image 2 (LMAP)")->required();
    m->add_option("--out", match.out, "matches JSON")->required();
    m->add_option("--matcher", match.baseline, "nw|average|nn|endpoint")->capture_default_str();
    m->add_flag("--no-mutual", match.no_mutual, "skip the mutual check");
    m->add_option("--image1", match.image1, "PGM image 1 for --overlay");
    m->add_option("--image2", match.image2, "PGM image 2 for --overlay");
    m->add_option("--overlay", match.overlay, "overlay PPM path");
    add_match_flags(*m, match.params);

    AdaptArgs adapt;
    auto* ad = app.add_subcommand("adapt", "homography adaptation pseudo-labels");
    add_common(ad);
    ad->add_option("--image", adapt.image, "PGM image")->required();
    ad->add_option("--n-homographies", adapt.params.n_homographies, "number of views")->capture_default_str();
    ad->add_option("--oracle", adapt.oracle, "scene segments JSON used as the synthetic predictor");
    ad->add_option("--maps-dir", adapt.maps_dir, "directory with homographies.json and J_i.lmap, H_i.lmap");
    ad->add_option("--out", adapt.out, "pseudo-label segments JSON")->required();
    ad->add_option("--overlay", adapt.overlay, "overlay PPM path");
    ad->add_option("--scale-sigma", adapt.params.homography_config.scale_sigma)->capture_default_str();
    ad->add_option("--rotation-range", adapt.params.homography_config.rotation_range_deg, "degrees")
        ->capture_default_str();
    ad->add_option("--perspective", adapt.params.homography_config.perspective_amplitude)->capture_default_str();
    add_detection_flags(*ad, adapt.params.detection);

    EvaluateArgs evaluate;
    auto* e = app.add_subcommand("evaluate", "repeatability, localization error and matching metrics");
    add_common(e);
    e->add_option("--pairs", evaluate.pairs, "manifest JSON")->required();
    e->add_option("--epsilon", evaluate.epsilon, "distance threshold (px)")->capture_default_str();
    e->add_option("--distance", evaluate.distance, "structural|orthogonal")->capture_default_str();
    e->add_option("--out", evaluate.out, "report JSON");

    EstimateArgs estimate;
    auto* h = app.add_subcommand("estimate-homography", "RANSAC homography from line matches");
    add_common(h);
    h->add_option("--matches", estimate.matches, "matches JSON")->required();
    h->add_option("--lines1", estimate.lines1, "segments JSON of image 1")->required();
    h->add_option("--lines2", estimate.lines2, "segments JSON of image 2")->required();
    h->add_option("--out", estimate.out, "homography JSON")->required();
    h->add_option("--threshold", estimate.params.inlier_threshold, "inlier distance (px)")->capture_default_str();
    h->add_option("--confidence", estimate.params.confidence)->capture_default_str();
    h->add_option("--max-iterations", estimate.params.max_iterations)->capture_default_str();
    h->add_flag("--overlap-gate", estimate.params.overlap_gate, "inliers must also overlap by 0.5");

    BenchArgs bench_args;
    auto* b = app.add_subcommand("bench", "synthetic acceptance suite");
    add_common(b);
    b->add_option("--scale", bench_args.scale, "fraction of the full trial counts")->capture_default_str();
    b->add_option("--only", bench_args.only, "criterion ids to run");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& ex) {
        const int code = app.exit(ex, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (s->parsed()) {
            return do_synth(synth, common, out);
        }
        if (d->parsed()) {
            return do_detect(detect, common, out);
        }
        if (m->parsed()) {
            return do_match(match, common, out);
        }
        if (ad->parsed()) {
            return do_adapt(adapt, common, out);
        }
        if (e->parsed()) {
            return do_evaluate(evaluate, common, out);
        }
        if (h->parsed()) {
            return do_estimate(estimate, common, out);
        }
        return do_bench(bench_args, common, out);
    } catch (const InvalidArgument& ex) {
        err << "error: " << ex.what() << "\n";
        return kExitUsage;
    } catch (const SizeMismatch& ex) {
        err << "error: size mismatch: " << ex.what() << "\n";
        return kExitIo;
    } catch (const FormatError& ex) {
        err << "error: format: " << ex.what() << "\n";
        return kExitIo;
    } catch (const IoError& ex) {
        err << "error: io: " << ex.what() << "\n";
        return kExitIo;
    } catch (const fs::filesystem_error& ex) {
        err << "error: io: " << ex.what() << "\n";
        return kExitIo;
    } catch (const EmptyResult& ex) {
        err << "error: " << ex.what() << "\n";
        return kExitEmpty;
    } catch (const InsufficientData& ex) {
        err << "error: " << ex.what() << "\n";
        return kExitEmpty;
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << "\n";
        return kExitFailure;
    }
}

} // namespace linekit::cli

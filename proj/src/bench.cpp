#include "linekit/bench.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "linekit/adapt.hpp"
#include "linekit/detect.hpp"
#include "linekit/error.hpp"
#include "linekit/hest.hpp"
#include "linekit/io.hpp"
#include "linekit/maps.hpp"

namespace linekit::bench {

namespace {

using Clock = std::chrono::steady_clock;

std::size_t trials(const Options& opt, std::size_t full)
{
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(opt.scale * static_cast<double>(full))));
}

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* pattern, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

DescriptorSequence random_sequence(std::mt19937_64& rng, std::size_t rows, std::size_t dim)
{
    std::normal_distribution<double> n(0.0, 1.0);
    DescriptorSequence d(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(dim));
    for (Eigen::Index r = 0; r < d.rows(); ++r) {
        for (Eigen::Index c = 0; c < d.cols(); ++c) {
            d(r, c) = n(rng);
        }
        d.row(r).normalize();
    }
    return d;
}

SceneKind kind_for(std::size_t k)
{
    return kAllSceneKinds[k % std::size(kAllSceneKinds)];
}

// Fraction of `pred` lying within epsilon (structural) of some reference line.
std::size_t count_near(std::span<const LineSegment> pred, std::span<const LineSegment> ref, double epsilon)
{
    std::size_t hits = 0;
    for (const auto& p : pred) {
        const auto d = nearest_distance(p, ref, LineDistance::structural);
        hits += (d && *d <= epsilon) ? 1 : 0;
    }
    return hits;
}

std::vector<LineSegment> plain(std::span<const ScoredSegment> s)
{
    std::vector<LineSegment> out;
    for (const auto& x : s) {
        out.push_back(x.segment);
    }
    return out;
}

bool same_bits(double a, double b)
{
    return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

bool same_bits(const LineSegment& a, const LineSegment& b)
{
    return same_bits(a.e1.x, b.e1.x) && same_bits(a.e1.y, b.e1.y) && same_bits(a.e2.x, b.e2.x) &&
           same_bits(a.e2.y, b.e2.y);
}

double random_finite(std::mt19937_64& rng)
{
    for (;;) {
        const double v = std::bit_cast<double>(rng());
        if (std::isfinite(v)) {
            return v;
        }
    }
}

float random_finite_float(std::mt19937_64& rng)
{
    for (;;) {
        const float v = std::bit_cast<float>(static_cast<std::uint32_t>(rng()));
        if (std::isfinite(v)) {
            return v;
        }
    }
}

} // namespace

namespace detail {

double nw_enumerate(const DescriptorSequence& d1, const DescriptorSequence& d2, double gap)
{
    const auto m = static_cast<unsigned>(d1.rows());
    const auto n = static_cast<unsigned>(d2.rows());
    if (m == 0 && n == 0) {
        throw InvalidArgument("cannot align two empty descriptor sequences");
    }
    double best = -std::numeric_limits<double>::infinity();
    std::vector<unsigned> ia;
    std::vector<unsigned> ib;
    for (unsigned a = 0; a < (1u << m); ++a) {
        for (unsigned b = 0; b < (1u << n); ++b) {
            if (std::popcount(a) != std::popcount(b)) {
                continue;
            }
            ia.clear();
            ib.clear();
            for (unsigned i = 0; i < m; ++i) {
                if ((a >> i) & 1u) {
                    ia.push_back(i);
                }
            }
            for (unsigned j = 0; j < n; ++j) {
                if ((b >> j) & 1u) {
                    ib.push_back(j);
                }
            }
            // The k-th chosen row of d1 is matched to the k-th chosen row of d2.
            double matched = 0.0;
            for (std::size_t k = 0; k < ia.size(); ++k) {
                double dot = 0.0;
                for (Eigen::Index c = 0; c < d1.cols(); ++c) {
                    dot += d1(ia[k], c) * d2(ib[k], c);
                }
                matched += dot;
            }
            const unsigned lo_i = ia.empty() ? 0 : ia.back() + 1;
            const unsigned lo_j = ib.empty() ? 0 : ib.back() + 1;
            // Every prefix (pi, pj) containing the alignment; unmatched points of the prefix are gaps.
            for (unsigned pi = lo_i; pi <= m; ++pi) {
                for (unsigned pj = lo_j; pj <= n; ++pj) {
                    const double skipped = static_cast<double>(pi + pj - 2 * ia.size());
                    best = std::max(best, matched + gap * skipped);
                }
            }
        }
    }
    return best;
}

} // namespace detail

ScenePair make_scene_pair(SceneKind kind, std::uint64_t seed, std::size_t size, const HomographyConfig& cfg)
{
    ScenePair p;
    p.scene = render_scene(kind, seed, size, size);
    p.view = sample_homography(seed ^ 0x9E3779B97F4A7C15ull, cfg, size, size);
    p.lines2 = visible_segments(p.scene.segments, p.view, size, size, 4.0, &p.source_index);
    for (std::size_t k : p.source_index) {
        p.lines1.push_back(p.scene.segments[k]);
    }
    return p;
}

CriterionResult nw_oracle_equivalence(const Options& opt)
{
    const auto start = Clock::now();
    std::mt19937_64 rng(opt.seed + 1);
    std::uniform_int_distribution<std::size_t> len(0, 6);
    std::uniform_int_distribution<std::size_t> dim(2, 16);
    std::uniform_real_distribution<double> gap(-0.5, 0.5);
    const std::size_t n = trials(opt, 1000);
    double worst = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        std::size_t m1 = len(rng);
        std::size_t m2 = len(rng);
        if (m1 == 0 && m2 == 0) {
            m1 = 1;
        }
        const std::size_t d = dim(rng);
        const auto a = random_sequence(rng, m1, d);
        const auto b = random_sequence(rng, m2, d);
        const double g = gap(rng);
        worst = std::max(worst, std::abs(nw_score(a, b, g) - detail::nw_enumerate(a, b, g)));
    }
    const double secs = seconds_since(start);
    CriterionResult r{1, "NW oracle equivalence", worst < kNwTolerance && secs < kNwMaxSeconds, "", secs};
    r.detail = fmt("%zu pairs, max |dp - brute force| = %.3g (tol %.0e)", n, worst, kNwTolerance);
    return r;
}

CriterionResult detector_recovery(const Options& opt)
{
    const auto start = Clock::now();
    const std::size_t n = trials(opt, 100);
    DetectionParams params;
    params.use_candidate_selection = true;
    double rep_sum = 0.0;
    double le_sum = 0.0;
    std::size_t le_count = 0;
    std::size_t emitted = 0;
    std::size_t correct = 0;
    for (std::size_t s = 0; s < n; ++s) {
        const SceneLabel scene = render_scene(kind_for(s), opt.seed + 1000 + s, 128, 128);
        const OracleMaps maps = oracle_maps(scene, Homography::identity());
        const auto detected = plain(detect_segments(maps.junctions, maps.heatmap, params));
        const EvalPair pair{detected, scene.segments, Homography::identity(), kEvalEpsilon, LineDistance::structural};
        rep_sum += repeatability(pair);
        try {
            le_sum += localization_error(pair);
            ++le_count;
        } catch (const EmptyResult&) {
        }
        emitted += detected.size();
        correct += count_near(detected, scene.segments, kEvalEpsilon);
    }
    const double rep = rep_sum / static_cast<double>(n);
    const double le = le_count > 0 ? le_sum / static_cast<double>(le_count) : std::numeric_limits<double>::infinity();
    const double precision = emitted > 0 ? static_cast<double>(correct) / static_cast<double>(emitted) : 0.0;
    const double secs = seconds_since(start);
    CriterionResult r{2, "detector recovery on oracle maps",
                      rep >= kDetectMinRep && le <= kDetectMaxLe && precision >= kDetectMinPrecision &&
                          secs < kDetectMaxSeconds,
                      "", secs};
    r.detail = fmt("%zu scenes, Rep-5 %.4f (>= %.2f), LE-5 %.4f px (<= %.1f), precision %.4f (>= %.2f)", n, rep,
                   kDetectMinRep, le, kDetectMaxLe, precision, kDetectMinPrecision);
    return r;
}

CriterionResult matching_end_to_end(const Options& opt)
{
    const auto start = Clock::now();
    const std::size_t n = trials(opt, 50);
    constexpr std::size_t kSize = kMatchImageSize;
    const MatchParams params;
    std::size_t clean_total = 0;
    std::size_t clean_ok = 0;
    std::size_t occ_total = 0;
    std::size_t nw_ok = 0;
    std::size_t avg_ok = 0;
    for (std::size_t s = 0; s < n; ++s) {
        const std::uint64_t seed = opt.seed + 3000 + s;
        const ScenePair pair = make_scene_pair(kind_for(s), seed, kSize, HomographyConfig{});
        if (pair.lines1.empty()) {
            continue;
        }
        const TensorMap d1 = oracle_descriptor_map(Homography::identity(), kSize, kSize);
        const TensorMap d2 = oracle_descriptor_map(pair.view, kSize, kSize);

        std::vector<IndexPair> gt;
        for (std::size_t k = 0; k < pair.lines1.size(); ++k) {
            gt.emplace_back(k, k);
        }
        const auto clean = match_lines(pair.lines1, pair.lines2, d1, d2, params);
        clean_total += gt.size();
        clean_ok += static_cast<std::size_t>(std::lround(matching_accuracy(clean, gt) * static_cast<double>(gt.size())));

        // Occlude the second view.
        SceneLabel view2;
        view2.image = warp_map(pair.scene.image, pair.view, kSize, kSize).first;
        view2.segments = pair.lines2;
        for (const auto& l : pair.lines2) {
            view2.junctions.push_back(l.e1);
            view2.junctions.push_back(l.e2);
        }
        std::vector<Ellipse> occluders;
        std::vector<std::size_t> parents;
        const SceneLabel occluded = synthesize_occlusions(view2, kMatchOcclusion, seed, &occluders, &parents);
        if (occluded.segments.empty()) {
            continue;
        }
        const TensorMap d2_occ = oracle_descriptor_map(pair.view, kSize, kSize, occluders);
        std::vector<IndexPair> gt_occ;
        for (std::size_t k = 0; k < parents.size(); ++k) {
            gt_occ.emplace_back(parents[k], k);
        }
        const auto nw = match_lines(pair.lines1, occluded.segments, d1, d2_occ, params);
        const auto avg = match_lines_baseline(BaselineStrategy::average_descriptor, pair.lines1, occluded.segments, d1,
                                              d2_occ, params);
        const auto count = [&](const LineMatchSet& m) {
            return static_cast<std::size_t>(std::lround(matching_accuracy(m, gt_occ) * static_cast<double>(gt_occ.size())));
        };
        occ_total += gt_occ.size();
        nw_ok += count(nw);
        avg_ok += count(avg);
    }
    const auto ratio = [](std::size_t a, std::size_t b) { return b > 0 ? static_cast<double>(a) / static_cast<double>(b) : 0.0; };
    const double clean_acc = ratio(clean_ok, clean_total);
    const double nw_acc = ratio(nw_ok, occ_total);
    const double avg_acc = ratio(avg_ok, occ_total);
    const double secs = seconds_since(start);
    CriterionResult r{3, "end-to-end matching on oracle descriptors",
                      clean_acc >= kMatchMinAccuracy && nw_acc > avg_acc && secs < kMatchMaxSeconds, "", secs};
    r.detail = fmt("%zu pairs, accuracy %.4f over %zu lines (>= %.2f); occluded s=%.1f: NW %.4f vs average %.4f over %zu lines",
                   n, clean_acc, clean_total, kMatchMinAccuracy, kMatchOcclusion, nw_acc, avg_acc, occ_total);
    return r;
}

CriterionResult adaptation_consistency(const Options& opt)
{
    const auto start = Clock::now();
    const std::size_t n = trials(opt, 50);
    AdaptationParams many;
    many.n_homographies = 50;
    many.detection.use_candidate_selection = true;
    AdaptationParams single = many;
    single.n_homographies = 1;
    double rep_many = 0.0;
    double rep_single = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        const SceneLabel scene = render_scene(kind_for(s), opt.seed + 4000 + s, 128, 128);
        many.seed = opt.seed + 4000 + s;
        const Predictor oracle = oracle_predictor(scene);
        const auto rep = [&](const AdaptationParams& p) {
            const auto labels = plain(generate_pseudo_labels(oracle, scene.image, p));
            if (labels.empty() && scene.segments.empty()) {
                return 1.0;
            }
            return repeatability({labels, scene.segments, Homography::identity(), kEvalEpsilon, LineDistance::structural});
        };
        rep_many += rep(many);
        rep_single += rep(single);
    }
    rep_many /= static_cast<double>(n);
    rep_single /= static_cast<double>(n);
    const double secs = seconds_since(start);
    CriterionResult r{4, "homography adaptation consistency", rep_many >= kAdaptMinRep && rep_many >= rep_single, "", secs};
    r.detail = fmt("%zu scenes, Rep-5 with N_h=50 %.4f (>= %.2f), N_h=1 %.4f", n, rep_many, kAdaptMinRep, rep_single);
    return r;
}

CriterionResult line_ransac(const Options& opt)
{
    const auto start = Clock::now();
    const std::size_t n = trials(opt, 100);
    constexpr std::size_t kW = 640;
    constexpr std::size_t kH = 480;
    std::size_t sub_pixel = 0;
    std::size_t correct = 0;
    double worst = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        std::mt19937_64 rng(opt.seed + 5000 + t);
        const Homography gt = sample_homography(rng(), HomographyConfig{}, kH, kW);
        std::uniform_real_distribution<double> ux(0.0, kW - 1.0);
        std::uniform_real_distribution<double> uy(0.0, kH - 1.0);
        const auto random_segment = [&] {
            for (;;) {
                const LineSegment s{{ux(rng), uy(rng)}, {ux(rng), uy(rng)}};
                if (s.length() >= 20.0) {
                    return s;
                }
            }
        };
        std::vector<SegmentPair> matches;
        while (matches.size() < 30) {
            const LineSegment a = random_segment();
            try {
                matches.emplace_back(a, warp_segment(a, gt));
            } catch (const PointAtInfinity&) {
            }
        }
        for (int k = 0; k < 30; ++k) {
            matches.emplace_back(random_segment(), random_segment());
        }
        std::shuffle(matches.begin(), matches.end(), rng);
        RansacParams params;
        params.seed = opt.seed + t;
        double err = std::numeric_limits<double>::infinity();
        try {
            const auto result = ransac_homography(matches, params);
            const auto acc = corner_accuracy(result.h, gt, kW, kH);
            err = acc.mean_error;
        } catch (const Error&) {
        }
        worst = std::max(worst, err);
        sub_pixel += err < kRansacMaxMeanError ? 1 : 0;
        correct += err < kCornerThreshold ? 1 : 0;
    }
    const double secs = seconds_since(start);
    const auto need = [&](std::size_t full_bar) {
        return static_cast<std::size_t>(std::ceil(static_cast<double>(full_bar) * static_cast<double>(n) / 100.0));
    };
    CriterionResult r{5, "line RANSAC", sub_pixel >= need(kRansacMinSubPixel) && correct >= need(kRansacMinCorrect) &&
                                            secs < kRansacMaxSeconds,
                      "", secs};
    r.detail = fmt("%zu trials, mean corner error < 1 px in %zu (>= %zu), correct@3px in %zu (>= %zu), worst %.3g px", n,
                   sub_pixel, need(kRansacMinSubPixel), correct, need(kRansacMinCorrect), worst);
    return r;
}

CriterionResult metric_fixtures(const Options&)
{
    const auto start = Clock::now();
    struct Fixture {
        const char* name;
        std::function<double()> value;
        double expected;
        bool exact;
    };
    const LineSegment a{{0, 0}, {10, 0}};
    const LineSegment far{{0, 50}, {10, 50}};
    const LineSegment shifted{{0, 1}, {10, 1}};
    const std::vector<Fixture> fixtures = {
        {"Rep-5 {a, b} vs {a}",
         [&] { return repeatability({{a, far}, {a}, Homography::identity(), 5.0, LineDistance::structural}); },
         2.0 / 3.0, true},
        {"LE-5 shift by 1 px",
         [&] { return localization_error({{a}, {shifted}, Homography::identity(), 5.0, LineDistance::structural}); },
         2.0, true},
        {"structural distance", [&] { return structural_distance(a, shifted); }, 2.0, false},
        {"orthogonal distance", [&] { return orthogonal_distance(a, LineSegment{{2, 1}, {8, 1}}); }, 2.0, false},
        {"overlap", [&] { return segment_overlap(a, LineSegment{{5, 1}, {15, 1}}); }, 0.5, false},
    };
    bool ok = true;
    std::ostringstream detail;
    for (const auto& f : fixtures) {
        const double v = f.value();
        const bool pass = f.exact ? v == f.expected : std::abs(v - f.expected) < kFixtureTolerance;
        ok = ok && pass;
        detail << f.name << (pass ? " ok" : " FAILED") << "; ";
    }
    const double secs = seconds_since(start);
    CriterionResult r{6, "metric fixtures", ok, detail.str(), secs};
    r.detail.resize(r.detail.size() - 2);
    return r;
}

CriterionResult format_round_trips(const Options& opt)
{
    const auto start = Clock::now();
    const std::size_t n = trials(opt, 1000);
    std::mt19937_64 rng(opt.seed + 7000);
    std::uniform_int_distribution<std::size_t> small(0, 6);
    std::uniform_int_distribution<std::size_t> dim(1, 6);
    std::size_t failures = 0;
    const auto json_stable = [](const Json& j) { return dump_json(parse_json(dump_json(j))) == dump_json(j); };
    for (std::size_t t = 0; t < n; ++t) {
        // LMAP
        const std::size_t h = dim(rng);
        const std::size_t w = dim(rng);
        const std::size_t c = dim(rng);
        std::vector<float> values(h * w * c);
        for (auto& v : values) {
            v = random_finite_float(rng);
        }
        const TensorMap map(h, w, c, values);
        const auto bytes = encode_lmap(map);
        const TensorMap back = decode_lmap(bytes);
        bool ok = back.same_size(map) && back.channels() == map.channels() && encode_lmap(back) == bytes &&
                  std::equal(values.begin(), values.end(), back.data().begin(), [](float x, float y) {
                      return std::bit_cast<std::uint32_t>(x) == std::bit_cast<std::uint32_t>(y);
                  });

        // Segments, scores and junctions.
        std::vector<ScoredSegment> segs(small(rng));
        std::vector<Point2> junctions(small(rng));
        for (auto& s : segs) {
            s = {{{random_finite(rng), random_finite(rng)}, {random_finite(rng), random_finite(rng)}},
                 random_finite(rng),
                 random_finite(rng)};
        }
        for (auto& p : junctions) {
            p = {random_finite(rng), random_finite(rng)};
        }
        const Json js = scored_segments_to_json(segs, junctions);
        const auto segs_back = scored_segments_from_json(parse_json(dump_json(js)));
        const auto junctions_back = junctions_from_json(parse_json(dump_json(js)));
        ok = ok && json_stable(js) && segs_back.size() == segs.size();
        for (std::size_t k = 0; ok && k < segs.size(); ++k) {
            ok = same_bits(segs[k].segment, segs_back[k].segment) && same_bits(segs[k].avg_score, segs_back[k].avg_score) &&
                 same_bits(segs[k].inlier_ratio, segs_back[k].inlier_ratio);
        }
        if (!junctions.empty()) {
            ok = ok && junctions_back.size() == junctions.size();
            for (std::size_t k = 0; ok && k < junctions.size(); ++k) {
                ok = same_bits(junctions[k].x, junctions_back[k].x) && same_bits(junctions[k].y, junctions_back[k].y);
            }
        }

        // Matches.
        LineMatchSet m;
        for (std::size_t k = 0, count = small(rng); k < count; ++k) {
            m.matches.push_back({rng() % 1000, rng() % 1000, random_finite(rng)});
        }
        for (std::size_t k = 0, count = small(rng); k < count; ++k) {
            m.unmatched_1.push_back(rng() % 1000);
            m.unmatched_2.push_back(rng());
        }
        const LineMatchSet m_back = matches_from_json(parse_json(dump_json(matches_to_json(m))));
        ok = ok && json_stable(matches_to_json(m)) && m_back.matches.size() == m.matches.size() &&
             m_back.unmatched_1 == m.unmatched_1 && m_back.unmatched_2 == m.unmatched_2;
        for (std::size_t k = 0; ok && k < m.matches.size(); ++k) {
            ok = m_back.matches[k].i == m.matches[k].i && m_back.matches[k].j == m.matches[k].j &&
                 same_bits(m_back.matches[k].score, m.matches[k].score);
        }

        // Homography.
        std::normal_distribution<double> g(0.0, 1.0);
        Eigen::Matrix3d raw;
        for (int k = 0; k < 9; ++k) {
            raw(k / 3, k % 3) = g(rng) * std::pow(10.0, static_cast<double>(static_cast<int>(rng() % 7) - 3));
        }
        try {
            const Homography hom(raw);
            const Homography hom_back = homography_from_json(parse_json(dump_json(homography_to_json(hom))));
            const auto x = hom.row_major();
            const auto y = hom_back.row_major();
            for (std::size_t k = 0; k < 9; ++k) {
                ok = ok && same_bits(x[k], y[k]);
            }
        } catch (const SingularHomography&) {
        }
        failures += ok ? 0 : 1;
    }
    const double secs = seconds_since(start);
    CriterionResult r{7, "format round trips", failures == 0, "", secs};
    r.detail = fmt("%zu fuzzed cases (LMAP, segments, junctions, matches, homography), %zu failures", n, failures);
    return r;
}

CriterionResult parameter_defaults(const Options&)
{
    const auto start = Clock::now();
    const DetectionParams d;
    const AdaptationParams a;
    const MatchParams m;
    struct Row {
        const char* name;
        double value;
        double expected;
    };
    const Row rows[] = {
        {"junction threshold", d.junction_threshold, 1.0 / 65.0},
        {"xi_avg", d.xi_avg, 0.25},
        {"xi_inlier", d.xi_inlier, 0.75},
        {"N_s", static_cast<double>(d.n_samples), 64},
        {"N_h", static_cast<double>(a.n_homographies), 100},
        {"gap", m.gap, 0.1},
        {"max samples", static_cast<double>(m.max_samples), 5},
        {"min spacing", m.min_spacing, 8},
        {"top-k prefilter", static_cast<double>(m.top_k_prefilter), 10},
        {"lambda", d.lambda_radius, 3},
        {"r_min", d.r_min, std::sqrt(2.0) / 2.0},
        {"xi_cs", d.xi_cs, 3},
    };
    bool ok = true;
    std::ostringstream detail;
    for (const auto& r : rows) {
        const bool pass = std::abs(r.value - r.expected) <= 1e-15;
        ok = ok && pass;
        if (!pass) {
            detail << r.name << " = " << r.value << " (expected " << r.expected << "); ";
        }
    }
    const double secs = seconds_since(start);
    CriterionResult r{8, "parameter defaults", ok, ok ? fmt("%zu defaults checked", std::size(rows)) : detail.str(), secs};
    return r;
}

std::vector<CriterionResult> run_all(const Options& opt)
{
    return {nw_oracle_equivalence(opt), detector_recovery(opt),  matching_end_to_end(opt), adaptation_consistency(opt),
            line_ransac(opt),           metric_fixtures(opt),    format_round_trips(opt),  parameter_defaults(opt)};
}

std::string format_line(const CriterionResult& r)
{
    return fmt("[%s] C%d %s: %s (%.2f s)", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.detail.c_str(), r.seconds);
}

} // namespace linekit::bench

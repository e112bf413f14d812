#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "linekit/detect.hpp"
#include "linekit/error.hpp"
#include "linekit/eval.hpp"
#include "linekit/synth.hpp"

using namespace linekit;

namespace {

bool has_segment(const std::vector<ScoredSegment>& out, const LineSegment& s, double tol)
{
    return std::any_of(out.begin(), out.end(),
                       [&](const ScoredSegment& o) { return structural_distance(o.segment, s) < tol; });
}

std::vector<LineSegment> plain(const std::vector<ScoredSegment>& s)
{
    std::vector<LineSegment> out;
    for (const auto& x : s) {
        out.push_back(x.segment);
    }
    return out;
}

} // namespace

TEST_CASE("junction extraction examples")
{
    DetectionParams p;
    TensorMap j(32, 32, 1);
    j.at(10, 12) = 0.9f;
    auto out = extract_junctions(j, p);
    REQUIRE(out.size() == 1);
    CHECK(out[0] == Point2{12, 10});

    j.at(10, 14) = 0.8f;
    out = extract_junctions(j, p);
    REQUIRE(out.size() == 1);
    CHECK(out[0] == Point2{12, 10});

    j.at(10, 20) = 0.8f;
    out = extract_junctions(j, p);
    REQUIRE(out.size() == 2);
    CHECK(out[1] == Point2{20, 10});

    const TensorMap low(16, 16, 1, 0.01f);
    CHECK(extract_junctions(low, p).empty());
    CHECK_THROWS_AS(extract_junctions(TensorMap(4, 4, 2), p), SizeMismatch);
}

TEST_CASE("junction extraction keeps peaks separated by more than the radius")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    TensorMap j(40, 50, 1);
    for (float& v : j.data()) {
        v = u(rng);
    }
    DetectionParams p;
    const auto out = extract_junctions(j, p);
    REQUIRE(!out.empty());
    for (std::size_t a = 0; a < out.size(); ++a) {
        CHECK(j.at(std::size_t(out[a].y), std::size_t(out[a].x)) >= float(p.junction_threshold));
        for (std::size_t b = a + 1; b < out.size(); ++b) {
            CHECK(distance(out[a], out[b]) > p.junction_nms_radius);
        }
    }
    // every thresholded pixel is within the radius of a kept junction
    for (std::size_t y = 0; y < j.height(); ++y) {
        for (std::size_t x = 0; x < j.width(); ++x) {
            if (j.at(y, x) < float(p.junction_threshold)) {
                continue;
            }
            const Point2 q{double(x), double(y)};
            CHECK(std::any_of(out.begin(), out.end(),
                              [&](Point2 k) { return distance(k, q) <= p.junction_nms_radius; }));
        }
    }
}

TEST_CASE("line sampling")
{
    const auto two = sample_line_points({1, 2}, {3, 4}, 2);
    REQUIRE(two.size() == 2);
    CHECK(two[0] == Point2{1, 2});
    CHECK(two[1] == Point2{3, 4});

    const auto three = sample_line_points({0, 0}, {10, 0}, 3);
    REQUIRE(three.size() == 3);
    CHECK(three[1] == Point2{5, 0});
    CHECK(three[2] == Point2{10, 0});

    std::mt19937_64 rng(11);
    for (int t = 0; t < 100; ++t) {
        const auto s = testutil::random_segment(rng);
        const std::size_t n = 2 + rng() % 100;
        const auto pts = sample_line_points(s.e1, s.e2, n);
        REQUIRE(pts.size() == n);
        const double step = s.length() / double(n - 1);
        for (std::size_t k = 1; k < n; ++k) {
            CHECK(std::abs(distance(pts[k - 1], pts[k]) - step) < 1e-9);
        }
    }
    CHECK_THROWS_AS(sample_line_points({0, 0}, {1, 1}, 1), InvalidArgument);
}

TEST_CASE("adaptive search radius")
{
    DetectionParams p;
    CHECK(search_radius(0.0, 100.0, p) == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-15));
    CHECK(search_radius(100.0, 100.0, p) == doctest::Approx(std::sqrt(2.0) / 2.0 + 3.0).epsilon(1e-15));

    const TensorMap flat(20, 30, 1, 0.6f);
    CHECK(adaptive_local_max(flat, {4.3, 7.9}, 10.0, 36.0, p) == doctest::Approx(0.6));
    CHECK_THROWS_AS(adaptive_local_max(flat, {-1.0, 2.0}, 10.0, 36.0, p), OutOfBounds);

    TensorMap spike(20, 20, 1);
    spike.at(10, 11) = 1.0f;
    // r_min reaches half a pixel, the full-diagonal radius more than three
    CHECK(adaptive_local_max(spike, {10.5, 10.0}, 0.0, 28.0, p) == doctest::Approx(1.0));
    CHECK(adaptive_local_max(spike, {9.5, 10.0}, 0.0, 28.0, p) == doctest::Approx(0.0));
    CHECK(adaptive_local_max(spike, {8.0, 10.0}, 28.0, 28.0, p) == doctest::Approx(1.0));
}

TEST_CASE("detection on an axis-aligned square")
{
    const std::vector<LineSegment> edges{
        {{20, 20}, {60, 20}}, {{60, 20}, {60, 60}}, {{60, 60}, {20, 60}}, {{20, 60}, {20, 20}}};
    const TensorMap h = rasterize_heatmap(edges, 80, 80);
    const TensorMap j = splat_junctions(std::vector<Point2>{{20, 20}, {60, 20}, {60, 60}, {20, 60}}, 80, 80);
    const auto out = detect_segments(j, h, DetectionParams{});
    CHECK(out.size() == 4);
    for (const auto& e : edges) {
        CHECK(has_segment(out, e, 1.0));
    }
    CHECK_FALSE(has_segment(out, {{20, 20}, {60, 60}}, 1.0));
    CHECK_FALSE(has_segment(out, {{60, 20}, {20, 60}}, 1.0));
    const auto [diag_avg, diag_inlier] = score_line(h, {{20, 20}, {60, 60}}, DetectionParams{});
    CHECK(diag_avg < 0.25);
    for (std::size_t k = 1; k < out.size(); ++k) {
        CHECK(out[k - 1].avg_score >= out[k].avg_score);
    }
}

TEST_CASE("detection trivial heatmaps")
{
    TensorMap j(30, 30, 1);
    j.at(5, 5) = 1.0f;
    j.at(20, 25) = 1.0f;
    CHECK(detect_segments(j, TensorMap(30, 30, 1), DetectionParams{}).empty());

    const auto out = detect_segments(j, TensorMap(30, 30, 1, 1.0f), DetectionParams{});
    REQUIRE(out.size() == 1);
    CHECK(out[0].avg_score == 1.0);
    CHECK(out[0].inlier_ratio == 1.0);
    CHECK(out[0].segment == LineSegment{{5, 5}, {25, 20}});

    CHECK_THROWS_AS(detect_segments(j, TensorMap(30, 31, 1), DetectionParams{}), SizeMismatch);

    DetectionParams p;
    p.min_length = 100.0;
    CHECK(detect_segments(j, TensorMap(30, 30, 1, 1.0f), p).empty());
}

TEST_CASE("detection parameter validation")
{
    DetectionParams p;
    CHECK_NOTHROW(p.validate());
    p.xi_avg = 0.0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p = {};
    p.xi_inlier = 1.5;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p = {};
    p.n_samples = 1;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p = {};
    p.junction_nms_radius = 0.0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
}

TEST_CASE("candidate selection examples")
{
    const std::vector<Point2> js{{0, 0}, {5, 0}, {10, 0}};
    const std::vector<LineSegment> cands{{{0, 0}, {10, 0}}, {{0, 0}, {5, 0}}};
    const auto out = candidate_selection(js, cands, 3.0);
    REQUIRE(out.size() == 1);
    CHECK(out[0] == cands[1]);

    const std::vector<Point2> far{{0, 0}, {5, 4}, {10, 0}};
    CHECK(candidate_selection(far, std::vector<LineSegment>{{{0, 0}, {10, 0}}}, 3.0).size() == 1);

    const std::vector<Point2> outside{{0, 0}, {12, 0}, {10, 0}};
    CHECK(candidate_selection(outside, std::vector<LineSegment>{{{0, 0}, {10, 0}}}, 3.0).size() == 1);
}

TEST_CASE("candidate selection is a subset and idempotent")
{
    std::mt19937_64 rng(21);
    for (int t = 0; t < 30; ++t) {
        std::vector<Point2> js;
        for (int k = 0; k < 12; ++k) {
            js.push_back(testutil::random_point(rng, 0.0, 50.0));
        }
        const auto all = enumerate_candidates(js);
        CHECK(all.size() == js.size() * (js.size() - 1) / 2);
        const auto once = candidate_selection(js, all, 3.0);
        for (const auto& c : once) {
            CHECK(std::find(all.begin(), all.end(), c) != all.end());
        }
        CHECK(candidate_selection(js, once, 3.0) == once);
    }
}

TEST_CASE("endpoint refinement")
{
    DetectionParams p;
    const ScoredSegment s{{{4, 5}, {24, 5}}, 0.0, 0.0};
    const TensorMap flat(12, 30, 1, 0.4f);
    CHECK(refine_endpoints(s, flat, p).segment == s.segment);
    CHECK(refine_endpoints(s, TensorMap(12, 30, 1), p).segment == s.segment);

    // ridge one row below the segment: the bilinear score grows towards it
    TensorMap ridge(12, 30, 1);
    for (std::size_t x = 0; x < 30; ++x) {
        ridge.at(6, x) = 1.0f;
    }
    const double before = score_line(ridge, s.segment, p, ScoreMode::bilinear).first;
    const auto r = refine_endpoints(s, ridge, p);
    CHECK(r.segment.e1.y == 5.25);
    CHECK(r.segment.e2.y == 5.25);
    CHECK(r.avg_score > before);
    CHECK(r.avg_score == score_line(ridge, r.segment, p, ScoreMode::bilinear).first);
}

TEST_CASE("detected endpoints are extracted junctions")
{
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const auto label = render_scene(kAllSceneKinds[seed % 6], seed, 96, 96);
        const auto maps = oracle_maps(label, Homography::identity());
        DetectionParams p;
        const auto js = extract_junctions(maps.junctions, p);
        for (const auto& s : detect_segments(maps.junctions, maps.heatmap, p)) {
            CHECK(std::find(js.begin(), js.end(), s.segment.e1) != js.end());
            CHECK(std::find(js.begin(), js.end(), s.segment.e2) != js.end());
            CHECK(s.avg_score >= p.xi_avg);
            CHECK(s.inlier_ratio >= p.xi_inlier);
            CHECK(s.avg_score <= 1.0);
        }
    }
}

TEST_CASE("raising the gates never adds a segment")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<float> noise(0.0f, 0.3f);
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const auto label = render_scene(kAllSceneKinds[seed], seed + 40, 96, 96);
        auto maps = oracle_maps(label, Homography::identity());
        for (float& v : maps.heatmap.data()) {
            v = std::min(1.0f, v + noise(rng));
        }
        DetectionParams lo;
        const auto base = plain(detect_segments(maps.junctions, maps.heatmap, lo));
        for (const auto [avg, inl] : {std::pair{0.3, 0.75}, std::pair{0.25, 0.9}, std::pair{0.5, 0.95}}) {
            DetectionParams hi;
            hi.xi_avg = avg;
            hi.xi_inlier = inl;
            for (const auto& s : detect_segments(maps.junctions, maps.heatmap, hi)) {
                CHECK(std::find(base.begin(), base.end(), s.segment) != base.end());
            }
        }
    }
}

TEST_CASE("oracle detection recovers the scene and is deterministic")
{
    std::size_t recovered = 0;
    std::size_t total = 0;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto label = render_scene(kAllSceneKinds[seed % 6], 500 + seed, 128, 128);
        const auto maps = oracle_maps(label, Homography::identity());
        DetectionParams p;
        p.use_candidate_selection = true;
        const auto a = detect_segments(maps.junctions, maps.heatmap, p);
        CHECK(a == detect_segments(maps.junctions, maps.heatmap, p));
        const auto found = plain(a);
        for (const auto& g : label.segments) {
            ++total;
            std::size_t idx = 0;
            const auto d = nearest_distance(g, found, LineDistance::structural, &idx);
            recovered += (d && *d <= 5.0) ? 1 : 0;
        }
    }
    CHECK(double(recovered) / double(total) >= 0.95);
}

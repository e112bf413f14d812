#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "helpers.hpp"
#include "linekit/error.hpp"
#include "linekit/eval.hpp"
#include "linekit/synth.hpp"

using namespace linekit;

namespace {

LineMatchSet make_matches(std::initializer_list<IndexPair> pairs)
{
    LineMatchSet m;
    for (const auto& [i, j] : pairs) {
        m.matches.push_back({i, j, 1.0});
    }
    return m;
}

std::vector<LineSegment> random_lines(std::mt19937_64& rng, std::size_t n)
{
    std::vector<LineSegment> out;
    for (std::size_t k = 0; k < n; ++k) {
        out.push_back(testutil::random_segment(rng, 0.0, 400.0));
    }
    return out;
}

} // namespace

TEST_CASE("distance names")
{
    CHECK(parse_line_distance("structural") == LineDistance::structural);
    CHECK(parse_line_distance("orthogonal") == LineDistance::orthogonal);
    CHECK_FALSE(parse_line_distance("euclid").has_value());
    CHECK(to_string(LineDistance::orthogonal) == "orthogonal");
}

TEST_CASE("repeatability examples")
{
    const LineSegment a{{10, 10}, {50, 10}};
    const LineSegment b{{10, 80}, {50, 120}};
    EvalPair p;
    p.segments1 = {a, b};
    p.segments2 = {a, b};
    CHECK(repeatability(p) == 1.0);
    CHECK(localization_error(p) == 0.0);

    p.segments2 = {{{500, 500}, {600, 600}}};
    CHECK(repeatability(p) == 0.0);
    CHECK_THROWS_AS(localization_error(p), EmptyResult);

    p.segments2 = {a};
    CHECK(repeatability(p) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

    p.segments1.clear();
    p.segments2.clear();
    CHECK_THROWS_AS(repeatability(p), InvalidArgument);
}

TEST_CASE("localization error of a one pixel shift")
{
    EvalPair p;
    p.segments1 = {{{10, 10}, {50, 10}}, {{20, 30}, {20, 90}}};
    p.segments2 = {{{10, 11}, {50, 11}}, {{21, 30}, {21, 90}}};
    CHECK(localization_error(p) == 2.0);
    p.distance = LineDistance::orthogonal;
    CHECK(localization_error(p) == doctest::Approx(2.0));
}

TEST_CASE("orthogonal distance ignores low-overlap neighbours")
{
    // collinear but disjoint: zero orthogonal distance, zero overlap
    EvalPair p;
    p.distance = LineDistance::orthogonal;
    p.segments1 = {{{0, 0}, {10, 0}}};
    p.segments2 = {{{20, 0}, {30, 0}}};
    CHECK(repeatability(p) == 0.0);
    p.segments2 = {{{4, 0}, {30, 0}}};
    CHECK(repeatability(p) == 1.0);

    std::size_t idx = 99;
    const std::vector<LineSegment> pool{{{20, 0}, {30, 0}}, {{0, 2}, {10, 2}}};
    const auto d = nearest_distance({{0, 0}, {10, 0}}, pool, LineDistance::orthogonal, &idx);
    REQUIRE(d.has_value());
    CHECK(*d == doctest::Approx(4.0));
    CHECK(idx == 1);
    CHECK_FALSE(nearest_distance({{0, 0}, {10, 0}}, {}, LineDistance::structural).has_value());
}

TEST_CASE("repeatability uses the homography in both directions")
{
    std::mt19937_64 rng(1);
    const Homography h = Homography::translation(7.0, -3.0);
    for (int t = 0; t < 50; ++t) {
        EvalPair p;
        p.h = sample_homography(rng(), HomographyConfig{}, 400, 400);
        p.segments1 = random_lines(rng, 1 + rng() % 10);
        p.segments2 = warp_segments(random_lines(rng, 1 + rng() % 10), h);
        // put a few exact copies in
        for (std::size_t k = 0; k < std::min<std::size_t>(3, p.segments1.size()); ++k) {
            try {
                p.segments2.push_back(warp_segment(p.segments1[k], p.h));
            } catch (const PointAtInfinity&) {
            }
        }
        p.epsilon = 5.0 + double(t % 3) * 10.0;
        const double r = repeatability(p);
        CHECK(r >= 0.0);
        CHECK(r <= 1.0);

        EvalPair swapped = p;
        std::swap(swapped.segments1, swapped.segments2);
        swapped.h = p.h.inverse();
        CHECK(repeatability(swapped) == doctest::Approx(r).epsilon(1e-9));
        try {
            CHECK(localization_error(p) <= p.epsilon);
        } catch (const EmptyResult&) {
        }
    }
}

TEST_CASE("precision and recall")
{
    const std::vector<IndexPair> gt{{0, 0}, {1, 1}, {2, 2}};
    const auto pr = match_precision_recall(make_matches({{0, 0}, {1, 1}, {2, 2}}), gt);
    CHECK(pr.precision == 1.0);
    CHECK(pr.recall == 1.0);

    const auto none = match_precision_recall(LineMatchSet{}, gt);
    CHECK(none.precision == 0.0);
    CHECK(none.recall == 0.0);

    const auto both_empty = match_precision_recall(LineMatchSet{}, {});
    CHECK(both_empty.precision == 1.0);
    CHECK(both_empty.recall == 1.0);

    const auto half = match_precision_recall(make_matches({{0, 0}, {1, 2}}), gt);
    CHECK(half.precision == 0.5);
    CHECK(half.recall == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

    const auto extra = match_precision_recall(make_matches({{0, 0}, {1, 1}, {2, 2}, {3, 3}}), gt);
    CHECK(extra.precision == 0.75);
    CHECK(extra.recall == 1.0);
}

TEST_CASE("precision and recall are both one only for the exact set")
{
    std::mt19937_64 rng(2);
    for (int t = 0; t < 200; ++t) {
        std::vector<IndexPair> gt;
        LineMatchSet pred;
        for (std::size_t i = 0; i < 5; ++i) {
            if (rng() % 2) {
                gt.emplace_back(i, rng() % 3);
            }
            if (rng() % 2) {
                pred.matches.push_back({i, rng() % 3, 0.0});
            }
        }
        std::vector<IndexPair> p;
        for (const auto& m : pred.matches) {
            p.emplace_back(m.i, m.j);
        }
        const auto pr = match_precision_recall(pred, gt);
        CHECK(((pr.precision == 1.0 && pr.recall == 1.0) == (p == gt)));
    }
}

TEST_CASE("matching accuracy")
{
    const std::vector<IndexPair> gt{{0, 0}, {1, 1}, {2, 2}, {3, 3}};
    CHECK(matching_accuracy(make_matches({{0, 0}, {1, 1}, {2, 2}, {3, 3}}), gt) == 1.0);
    CHECK(matching_accuracy(make_matches({{0, 1}, {1, 0}, {2, 3}, {3, 2}}), gt) == 0.0);
    CHECK(matching_accuracy(make_matches({{0, 0}, {1, 1}, {2, 2}, {3, 0}}), gt) == 0.75);
    CHECK(matching_accuracy(make_matches({{0, 0}}), {}) == 1.0);
}

TEST_CASE("ground-truth correspondences")
{
    std::mt19937_64 rng(3);
    EvalPair p;
    p.segments1 = {{{0, 0}, {40, 0}}, {{0, 50}, {40, 90}}, {{100, 0}, {100, 60}}};
    p.segments2 = p.segments1;
    const auto same = gt_correspondences(p);
    CHECK(same == std::vector<IndexPair>{{0, 0}, {1, 1}, {2, 2}});
    p.segments2.clear();
    CHECK(gt_correspondences(p).empty());

    for (int t = 0; t < 30; ++t) {
        EvalPair q;
        q.h = sample_homography(rng(), HomographyConfig{}, 400, 400);
        // well separated lines: a grid of short horizontal segments
        for (int r = 0; r < 4; ++r) {
            for (int c = 0; c < 4; ++c) {
                q.segments1.push_back({{60.0 + 80.0 * c, 60.0 + 80.0 * r}, {100.0 + 80.0 * c, 70.0 + 80.0 * r}});
            }
        }
        std::vector<std::size_t> perm(q.segments1.size());
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        std::uniform_real_distribution<double> jitter(-0.6, 0.6);
        q.segments2.resize(perm.size());
        bool warped = true;
        for (std::size_t k = 0; k < perm.size(); ++k) {
            try {
                const auto w = warp_segment(q.segments1[k], q.h);
                q.segments2[perm[k]] = {w.e1 + Point2{jitter(rng), jitter(rng)}, w.e2 + Point2{jitter(rng), jitter(rng)}};
            } catch (const PointAtInfinity&) {
                warped = false;
            }
        }
        if (!warped) {
            continue;
        }
        auto got = gt_correspondences(q);
        std::vector<IndexPair> want;
        for (std::size_t k = 0; k < perm.size(); ++k) {
            want.emplace_back(k, perm[k]);
        }
        CHECK(got == want);
    }
}

TEST_CASE("ground-truth correspondences are one to one")
{
    std::mt19937_64 rng(4);
    for (int t = 0; t < 50; ++t) {
        EvalPair p;
        p.epsilon = 40.0;
        p.segments1 = random_lines(rng, 12);
        p.segments2 = random_lines(rng, 12);
        const auto g = gt_correspondences(p);
        std::vector<int> s1(12, 0);
        std::vector<int> s2(12, 0);
        for (const auto& [i, j] : g) {
            CHECK(++s1[i] == 1);
            CHECK(++s2[j] == 1);
            CHECK(structural_distance(p.segments1[i], p.segments2[j]) <= p.epsilon);
        }
    }
}

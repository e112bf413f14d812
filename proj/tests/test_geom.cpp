#include "doctest.h"

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "linekit/error.hpp"
#include "linekit/geom.hpp"

using namespace linekit;

TEST_CASE("structural distance examples")
{
    const LineSegment a{{0, 0}, {10, 0}};
    CHECK(structural_distance(a, a) == 0.0);
    CHECK(structural_distance(a, a.reversed()) == 0.0);
    CHECK(structural_distance(a, {{0, 1}, {10, 1}}) == doctest::Approx(2.0));
}

TEST_CASE("orthogonal distance examples")
{
    const LineSegment a{{0, 0}, {10, 0}};
    CHECK(orthogonal_distance(a, a) == 0.0);
    CHECK(orthogonal_distance(a, {{2, 1}, {8, 1}}) == doctest::Approx(2.0));
    CHECK(orthogonal_distance(a, {{2, 0}, {5, 0}}) == doctest::Approx(0.0));
    CHECK_THROWS_AS(orthogonal_distance(a, {{3, 3}, {3, 3}}), DegenerateSegment);
    CHECK_THROWS_AS(orthogonal_distance({{3, 3}, {3, 3}}, a), DegenerateSegment);
}

TEST_CASE("overlap examples")
{
    const LineSegment a{{0, 0}, {10, 0}};
    CHECK(segment_overlap(a, a) == doctest::Approx(1.0));
    CHECK(segment_overlap({{0, 0}, {1, 0}}, {{5, 0}, {6, 0}}) == 0.0);
    CHECK(segment_overlap(a, {{5, 1}, {15, 1}}) == doctest::Approx(0.5));
    CHECK_THROWS_AS(segment_overlap({{1, 1}, {1, 1}}, a), DegenerateSegment);
}

TEST_CASE("overlap agrees with dense sampling")
{
    // Fraction of l1 covered by the projection of l2, estimated on a fine grid of l2 points.
    const auto sampled = [](const LineSegment& l1, const LineSegment& l2) {
        double lo = 1.0;
        double hi = 0.0;
        constexpr int n = 20000;
        for (int k = 0; k <= n; ++k) {
            const double t = projection_parameter(l2.e1 + (static_cast<double>(k) / n) * (l2.e2 - l2.e1), l1);
            if (t >= 0.0 && t <= 1.0) {
                lo = std::min(lo, t);
                hi = std::max(hi, t);
            }
        }
        return hi > lo ? hi - lo : 0.0;
    };
    std::mt19937_64 rng(11);
    for (int k = 0; k < 200; ++k) {
        const auto a = testutil::random_segment(rng);
        const auto b = testutil::random_segment(rng);
        const double expected = std::max(sampled(a, b), sampled(b, a));
        CHECK(segment_overlap(a, b) == doctest::Approx(expected).epsilon(1e-3).scale(1.0));
    }
}

TEST_CASE("distances are symmetric and ignore endpoint order")
{
    std::mt19937_64 rng(1);
    for (int k = 0; k < 500; ++k) {
        const auto a = testutil::random_segment(rng);
        const auto b = testutil::random_segment(rng);
        const double s = structural_distance(a, b);
        CHECK(s >= 0.0);
        CHECK(s == doctest::Approx(structural_distance(b, a)));
        CHECK(s == doctest::Approx(structural_distance(a.reversed(), b)));
        CHECK(s == doctest::Approx(structural_distance(a, b.reversed())));
        const double o = orthogonal_distance(a, b);
        CHECK(o >= 0.0);
        CHECK(o == doctest::Approx(orthogonal_distance(b, a)));
        CHECK(o == doctest::Approx(orthogonal_distance(a.reversed(), b.reversed())));
        CHECK(segment_overlap(a, b) == doctest::Approx(segment_overlap(b.reversed(), a)));
    }
}

TEST_CASE("structural distance vanishes only on equal endpoint sets")
{
    std::mt19937_64 rng(2);
    for (int k = 0; k < 100; ++k) {
        const auto a = testutil::random_segment(rng);
        CHECK(structural_distance(a, a.reversed()) == 0.0);
        const LineSegment moved{a.e1, a.e2 + Point2{1e-6, 0.0}};
        CHECK(structural_distance(a, moved) > 0.0);
    }
}

TEST_CASE("overlap is similarity invariant")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 300; ++k) {
        const auto a = testutil::random_segment(rng);
        const auto b = testutil::random_segment(rng);
        const double angle = std::numbers::pi * u(rng);
        const double s = std::exp(u(rng));
        Eigen::Matrix3d m;
        m << s * std::cos(angle), -s * std::sin(angle), 50 * u(rng), s * std::sin(angle), s * std::cos(angle),
            50 * u(rng), 0, 0, 1;
        const Homography h(m);
        CHECK(segment_overlap(warp_segment(a, h), warp_segment(b, h)) ==
              doctest::Approx(segment_overlap(a, b)).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("warp examples")
{
    const LineSegment a{{0, 0}, {1, 0}};
    CHECK(warp_segment(a, Homography::identity()) == a);
    const auto t = warp_segment(a, Homography::translation(3, 4));
    CHECK(t.e1.x == doctest::Approx(3));
    CHECK(t.e1.y == doctest::Approx(4));
    CHECK(t.e2.x == doctest::Approx(4));
    CHECK(t.e2.y == doctest::Approx(4));
    const auto s = warp_segment({{1, 1}, {2, 2}}, Homography::scaling(2));
    CHECK(s.e1.x == doctest::Approx(2));
    CHECK(s.e2.y == doctest::Approx(4));
}

TEST_CASE("warp round trip through the inverse")
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        Eigen::Matrix3d m;
        m << 1 + 0.2 * u(rng), 0.2 * u(rng), 30 * u(rng), 0.2 * u(rng), 1 + 0.2 * u(rng), 30 * u(rng),
            1e-4 * u(rng), 1e-4 * u(rng), 1;
        const Homography h(m);
        const auto l = testutil::random_segment(rng);
        const auto back = warp_segment(warp_segment(l, h), h.inverse());
        CHECK(structural_distance(l, back) < 1e-9);
    }
}

TEST_CASE("point at infinity")
{
    Eigen::Matrix3d m;
    m << 1, 0, 0, 0, 1, 0, 1, 0, 0;
    m(2, 2) = 1;
    const Homography h(m);
    CHECK_THROWS_AS(h.apply({-1.0, 0.0}), PointAtInfinity);
}

TEST_CASE("homography canonical scale")
{
    Eigen::Matrix3d m;
    m << 2, 0, 1, 0, 2, 3, 0, 0, 2;
    const Homography a(m);
    const Homography b(Eigen::Matrix3d(-4.0 * m));
    CHECK(a.row_major() == b.row_major());
    CHECK(a.matrix().norm() == doctest::Approx(1.0));
    CHECK_THROWS_AS(Homography(Eigen::Matrix3d::Zero()), SingularHomography);
    Eigen::Matrix3d rank2;
    rank2 << 1, 2, 3, 2, 4, 6, 0, 0, 1;
    CHECK_THROWS_AS(Homography{rank2}, SingularHomography);
}

TEST_CASE("composition applies the right factor first")
{
    const Homography t = Homography::translation(1, 0);
    const Homography s = Homography::scaling(2);
    const Point2 p = (s * t).apply({1, 1});
    CHECK(p.x == doctest::Approx(4));
    CHECK(p.y == doctest::Approx(2));
}

#include "doctest.h"

#include <algorithm>
#include <random>

#include "helpers.hpp"
#include "linekit/error.hpp"
#include "linekit/overlay.hpp"
#include "linekit/synth.hpp"

using namespace linekit;

namespace {

Rgb pixel(const RgbImage& img, std::size_t y, std::size_t x)
{
    const std::size_t o = (y * img.width + x) * 3;
    return {img.data[o], img.data[o + 1], img.data[o + 2]};
}

} // namespace

TEST_CASE("match colours are saturated and never the reserved colour")
{
    for (std::size_t k = 0; k < 5000; ++k) {
        const Rgb c = match_color(k);
        CHECK(c != kUnmatchedColor);
        const auto [lo, hi] = std::minmax({c[0], c[1], c[2]});
        CHECK(hi - lo >= 64);
    }
    CHECK(match_color(0) != match_color(1));
    CHECK(match_color(3) == match_color(3));
}

TEST_CASE("empty overlay is a grayscale conversion")
{
    TensorMap img(5, 7, 1);
    for (std::size_t y = 0; y < 5; ++y) {
        for (std::size_t x = 0; x < 7; ++x) {
            img.at(y, x) = float(x + 7 * y) / 34.0f;
        }
    }
    const RgbImage out = render_overlay(img, {});
    CHECK(out == to_rgb(img));
    REQUIRE(out.data.size() == 5 * 7 * 3);
    CHECK(pixel(out, 0, 0) == Rgb{0, 0, 0});
    CHECK(pixel(out, 4, 6) == Rgb{255, 255, 255});
    CHECK_THROWS_AS(to_rgb(TensorMap(2, 2, 3)), SizeMismatch);
}

TEST_CASE("a drawn segment recolours exactly its raster support")
{
    std::mt19937_64 rng(1);
    const TensorMap img(60, 80, 1, 0.5f);
    const RgbImage base = to_rgb(img);
    for (int t = 0; t < 30; ++t) {
        const LineSegment s = testutil::random_segment(rng, 0.0, 59.0);
        const std::vector<LineSegment> one{s};
        const std::vector<std::optional<std::size_t>> ids{std::size_t(t)};
        const RgbImage out = render_overlay(img, one, ids);
        const TensorMap support = rasterize_heatmap(one, 60, 80);
        for (std::size_t y = 0; y < 60; ++y) {
            for (std::size_t x = 0; x < 80; ++x) {
                const bool on = support.at(y, x) > 0.0f;
                CHECK((pixel(out, y, x) != pixel(base, y, x)) == on);
                if (on) {
                    CHECK(pixel(out, y, x) == match_color(std::size_t(t)));
                }
            }
        }
        const RgbImage plain = render_overlay(img, one);
        const auto idx = std::find(support.data().begin(), support.data().end(), 1.0f) - support.data().begin();
        if (idx < std::ptrdiff_t(support.size())) {
            CHECK(pixel(plain, std::size_t(idx) / 80, std::size_t(idx) % 80) == kUnmatchedColor);
        }
    }
    CHECK_THROWS_AS(render_overlay(img, std::vector<LineSegment>{{{0, 0}, {5, 5}}},
                                   std::vector<std::optional<std::size_t>>{1, 2}),
                    SizeMismatch);
}

TEST_CASE("match overlays are deterministic and share colours")
{
    const auto label = render_scene(SceneKind::polygon, 3, 64, 64);
    LineMatchSet m;
    m.matches.push_back({0, 1, 1.0});
    const std::vector<LineSegment> l1{label.segments[0]};
    const std::vector<LineSegment> l2{label.segments[1], label.segments[0]};
    const RgbImage a = render_match_overlay(label.image, l1, label.image, l2, m);
    CHECK(a == render_match_overlay(label.image, l1, label.image, l2, m));
    CHECK(encode_ppm(a) == encode_ppm(render_match_overlay(label.image, l1, label.image, l2, m)));
    CHECK(a.width == 128);
    CHECK(a.height == 64);
    const TensorMap s1 = rasterize_heatmap(l1, 64, 64);
    const TensorMap s2 = rasterize_heatmap(std::vector<LineSegment>{l2[1]}, 64, 64);
    std::size_t hits = 0;
    for (std::size_t y = 0; y < 64; ++y) {
        for (std::size_t x = 0; x < 64; ++x) {
            if (s1.at(y, x) > 0.0f) {
                CHECK(pixel(a, y, x) == match_color(0));
                ++hits;
            }
            if (s2.at(y, x) > 0.0f) {
                CHECK(pixel(a, y, 64 + x) == match_color(0));
            }
        }
    }
    CHECK(hits > 0);
    const auto ppm = encode_ppm(a);
    CHECK(std::string(ppm.begin(), ppm.begin() + 2) == "P6");
}

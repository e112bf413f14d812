#include "doctest.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>

#include "helpers.hpp"
#include "linekit/error.hpp"
#include "linekit/maps.hpp"

using namespace linekit;

namespace {

TensorMap affine_map(std::size_t h, std::size_t w)
{
    TensorMap m(h, w, 2);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            m.at(y, x, 0) = static_cast<float>(0.02 * static_cast<double>(x) - 0.01 * static_cast<double>(y) + 0.5);
            m.at(y, x, 1) = static_cast<float>(0.1 * static_cast<double>(y));
        }
    }
    return m;
}

TensorMap logits_cell(std::size_t hot, float value)
{
    TensorMap coarse(1, 1, 65);
    coarse.at(0, 0, hot) = value;
    return coarse;
}

} // namespace

TEST_CASE("bilinear examples")
{
    const TensorMap constant(5, 7, 3, 0.7f);
    for (const Point2 p : {Point2{0, 0}, Point2{6, 4}, Point2{2.3, 1.9}}) {
        for (float v : bilinear_sample(constant, p)) {
            CHECK(v == doctest::Approx(0.7));
        }
    }
    const TensorMap ramp(1, 2, 1, std::vector<float>{0.0f, 1.0f});
    CHECK(bilinear_sample(ramp, {0.5, 0})[0] == doctest::Approx(0.5));
    CHECK_THROWS_AS(bilinear_sample(ramp, {1.01, 0}), OutOfBounds);
    CHECK_THROWS_AS(bilinear_sample(ramp, {0, -0.01}), OutOfBounds);
}

TEST_CASE("bilinear reproduces grid values and affine maps")
{
    const TensorMap m = affine_map(9, 11);
    for (std::size_t y = 0; y < 9; ++y) {
        for (std::size_t x = 0; x < 11; ++x) {
            CHECK(bilinear_sample(m, {static_cast<double>(x), static_cast<double>(y)})[0] == m.at(y, x, 0));
        }
    }
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ux(0.0, 10.0);
    std::uniform_real_distribution<double> uy(0.0, 8.0);
    for (int k = 0; k < 500; ++k) {
        const Point2 p{ux(rng), uy(rng)};
        const auto v = bilinear_sample(m, p);
        CHECK(std::abs(v[0] - (0.02 * p.x - 0.01 * p.y + 0.5)) < 1e-6);
        CHECK(std::abs(v[1] - 0.1 * p.y) < 1e-6);
        CHECK(std::abs(bilinear_sample_channel(m, p, 1) - 0.1 * p.y) < 1e-6);
    }
}

TEST_CASE("junction decoding")
{
    // Hand softmax: e^50 against 64 ones.
    const double big = std::exp(50.0);
    const double hot = big / (big + 64.0);
    const double cold = 1.0 / (big + 64.0);
    for (std::size_t k : {0u, 9u, 63u}) {
        const TensorMap out = decode_junction_map(logits_cell(k, 50.0f));
        REQUIRE(out.height() == 8);
        REQUIRE(out.width() == 8);
        for (std::size_t y = 0; y < 8; ++y) {
            for (std::size_t x = 0; x < 8; ++x) {
                const bool is_hot = x == k % 8 && y == k / 8;
                CHECK(out.at(y, x) == doctest::Approx(is_hot ? hot : cold));
            }
        }
    }
    const TensorMap uniform = decode_junction_map(TensorMap(2, 3, 65));
    CHECK(uniform.height() == 16);
    CHECK(uniform.width() == 24);
    for (float v : uniform.data()) {
        CHECK(v == doctest::Approx(1.0 / 65.0));
    }
    const TensorMap dustbin = decode_junction_map(logits_cell(64, 50.0f));
    for (float v : dustbin.data()) {
        CHECK(v < 1e-20);
    }
    CHECK_THROWS_AS(decode_junction_map(TensorMap(1, 1, 64)), InvalidArgument);
}

TEST_CASE("junction decoding mass per patch")
{
    std::mt19937_64 rng(6);
    std::normal_distribution<float> n(0.0f, 3.0f);
    TensorMap coarse(3, 2, 65);
    for (auto& v : coarse.data()) {
        v = n(rng);
    }
    const TensorMap out = decode_junction_map(coarse);
    for (std::size_t cy = 0; cy < 3; ++cy) {
        for (std::size_t cx = 0; cx < 2; ++cx) {
            double denom = 0.0;
            for (std::size_t c = 0; c < 65; ++c) {
                denom += std::exp(static_cast<double>(coarse.at(cy, cx, c)));
            }
            const double dustbin = std::exp(static_cast<double>(coarse.at(cy, cx, 64))) / denom;
            double mass = 0.0;
            for (std::size_t y = 0; y < 8; ++y) {
                for (std::size_t x = 0; x < 8; ++x) {
                    const float v = out.at(8 * cy + y, 8 * cx + x);
                    CHECK(v >= 0.0f);
                    CHECK(v <= 1.0f);
                    mass += v;
                }
            }
            CHECK(mass == doctest::Approx(1.0 - dustbin).epsilon(1e-5));
        }
    }
}

TEST_CASE("warp examples")
{
    const TensorMap m = affine_map(6, 8);
    const auto [same, full] = warp_map(m, Homography::identity(), 6, 8);
    CHECK(same == m);
    CHECK(full.count() == 48);
    const auto [gone, none] = warp_map(m, Homography::translation(8, 0), 6, 8);
    CHECK(none.count() == 0);
    for (float v : gone.data()) {
        CHECK(v == 0.0f);
    }
    const TensorMap c(6, 8, 1, 0.25f);
    const auto [shifted, mask] = warp_map(c, Homography::translation(1, 0), 6, 8);
    for (std::size_t y = 0; y < 6; ++y) {
        CHECK_FALSE(mask.at(y, 0));
        CHECK(shifted.at(y, 0) == 0.0f);
        for (std::size_t x = 1; x < 8; ++x) {
            CHECK(mask.at(y, x));
            CHECK(shifted.at(y, x) == c.at(y, x - 1));
        }
    }
}

TEST_CASE("warp there and back on the doubly valid region")
{
    const TensorMap m = affine_map(40, 50);
    Eigen::Matrix3d h;
    h << 0.95, 0.05, 2.0, -0.04, 1.02, 1.5, 1e-4, -2e-4, 1.0;
    const Homography view(h);
    const auto [there, mask1] = warp_map(m, view, 40, 50);
    const auto [back, mask2] = warp_map(there, view.inverse(), 40, 50);
    std::size_t checked = 0;
    for (std::size_t y = 0; y < 40; ++y) {
        for (std::size_t x = 0; x < 50; ++x) {
            if (!mask2.at(y, x)) {
                continue;
            }
            // The four texels used on the way back must all be valid in the first warp.
            const Point2 q = view.apply({static_cast<double>(x), static_cast<double>(y)});
            const auto x0 = static_cast<std::size_t>(std::floor(q.x));
            const auto y0 = static_cast<std::size_t>(std::floor(q.y));
            bool ok = true;
            for (std::size_t dy = 0; dy <= 1; ++dy) {
                for (std::size_t dx = 0; dx <= 1; ++dx) {
                    ok = ok && y0 + dy < 40 && x0 + dx < 50 && mask1.at(y0 + dy, x0 + dx);
                }
            }
            if (!ok) {
                continue;
            }
            ++checked;
            // Affine maps survive bilinear resampling.
            CHECK(std::abs(back.at(y, x, 0) - m.at(y, x, 0)) < 1e-5);
        }
    }
    CHECK(checked > 1000);
}

TEST_CASE("LMAP layout and round trip")
{
    const TensorMap m(1, 2, 1, std::vector<float>{1.0f, -2.5f});
    const auto bytes = encode_lmap(m);
    REQUIRE(bytes.size() == 4 + 2 + 12 + 8);
    CHECK(std::memcmp(bytes.data(), "LMAP", 4) == 0);
    CHECK(bytes[4] == 1);
    CHECK(bytes[5] == 0);
    CHECK(bytes[6] == 1);  // height
    CHECK(bytes[10] == 2); // width
    CHECK(bytes[14] == 1); // channels
    std::uint32_t first = 0;
    for (int k = 0; k < 4; ++k) {
        first |= static_cast<std::uint32_t>(bytes[18 + k]) << (8 * k);
    }
    CHECK(first == std::bit_cast<std::uint32_t>(1.0f));

    std::mt19937_64 rng(7);
    for (int k = 0; k < 50; ++k) {
        TensorMap r(1 + rng() % 5, 1 + rng() % 5, 1 + rng() % 4);
        for (auto& v : r.data()) {
            do {
                v = std::bit_cast<float>(static_cast<std::uint32_t>(rng()));
            } while (!std::isfinite(v));
        }
        const auto enc = encode_lmap(r);
        const TensorMap back = decode_lmap(enc);
        CHECK(encode_lmap(back) == enc);
        CHECK(back.height() == r.height());
        CHECK(back.channels() == r.channels());
    }

    const auto dir = testutil::scratch_dir("lmap");
    write_map(m, dir / "m.lmap");
    CHECK(read_file_bytes(dir / "m.lmap") == bytes);
    CHECK(read_map(dir / "m.lmap") == m);
    CHECK_THROWS_AS(read_map(dir / "missing.lmap"), IoError);
}

TEST_CASE("LMAP errors")
{
    auto bytes = encode_lmap(TensorMap(2, 2, 1, 0.5f));
    auto bad = bytes;
    std::memcpy(bad.data(), "XXXX", 4);
    CHECK_THROWS_AS(decode_lmap(bad), FormatError);
    auto truncated = bytes;
    truncated.resize(truncated.size() - 4); // three floats left for a 2x2x1 header
    CHECK_THROWS_AS(decode_lmap(truncated), FormatError);
    CHECK_THROWS_AS(decode_lmap(std::span(bytes.data(), 10)), FormatError);
    auto nan = bytes;
    const auto bits = std::bit_cast<std::uint32_t>(std::numeric_limits<float>::quiet_NaN());
    for (int k = 0; k < 4; ++k) {
        nan[18 + k] = static_cast<std::uint8_t>(bits >> (8 * k));
    }
    CHECK_THROWS_AS(decode_lmap(nan), FormatError);
    auto version = bytes;
    version[4] = 2;
    CHECK_THROWS_AS(decode_lmap(version), FormatError);
}

TEST_CASE("PGM round trip")
{
    TensorMap img(3, 4, 1);
    for (std::size_t k = 0; k < img.size(); ++k) {
        img.data()[k] = static_cast<float>(k) / 11.0f;
    }
    const auto enc = encode_pgm(img, "hello");
    const TensorMap back = decode_pgm(enc);
    REQUIRE(back.height() == 3);
    REQUIRE(back.width() == 4);
    for (std::size_t k = 0; k < img.size(); ++k) {
        CHECK(std::abs(back.data()[k] - img.data()[k]) <= 0.5f / 255.0f + 1e-6f);
    }
    CHECK(encode_pgm(back, "hello") == enc);
    const std::string p2 = "P2\n1 1\n255\n0\n";
    CHECK_THROWS_AS(decode_pgm(std::span(reinterpret_cast<const std::uint8_t*>(p2.data()), p2.size())), FormatError);
}

TEST_CASE("L2 pixel normalisation")
{
    TensorMap m(1, 2, 2, std::vector<float>{3.0f, 4.0f, 0.0f, 0.0f});
    l2_normalize_pixels(m);
    CHECK(m.at(0, 0, 0) == doctest::Approx(0.6));
    CHECK(m.at(0, 0, 1) == doctest::Approx(0.8));
    CHECK(m.at(0, 1, 0) == 0.0f);
}

TEST_CASE("shape checks")
{
    CHECK_THROWS_AS(TensorMap(2, 2, 1, std::vector<float>(3)), SizeMismatch);
}

#include "linekit/overlay.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "linekit/error.hpp"
#include "linekit/synth.hpp"

namespace linekit {

Rgb match_color(std::size_t k)
{
    constexpr double kGolden = 0.6180339887498949;
    const double hue = std::fmod(static_cast<double>(k) * kGolden, 1.0) * 6.0;
    const int sector = static_cast<int>(hue) % 6;
    const double f = hue - std::floor(hue);
    const auto up = static_cast<std::uint8_t>(std::lround(255.0 * f));
    const auto down = static_cast<std::uint8_t>(255 - up);
    switch (sector) {
    case 0: return {255, up, 0};
    case 1: return {down, 255, 0};
    case 2: return {0, 255, up};
    case 3: return {0, down, 255};
    case 4: return {up, 0, 255};
    default: return {255, 0, down};
    }
}

RgbImage to_rgb(const TensorMap& gray)
{
    if (gray.channels() != 1) {
        throw SizeMismatch("overlay images must be single-channel");
    }
    RgbImage out{gray.height(), gray.width(), std::vector<std::uint8_t>(gray.height() * gray.width() * 3)};
    const auto data = gray.data();
    for (std::size_t p = 0; p < data.size(); ++p) {
        const auto v = static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(static_cast<double>(data[p]), 0.0, 1.0)));
        std::fill_n(out.data.begin() + static_cast<std::ptrdiff_t>(3 * p), 3, v);
    }
    return out;
}

RgbImage render_overlay(const TensorMap& image, std::span<const LineSegment> segments,
                        std::span<const std::optional<std::size_t>> color_ids)
{
    if (!color_ids.empty() && color_ids.size() != segments.size()) {
        throw SizeMismatch("one colour id per segment expected");
    }
    RgbImage out = to_rgb(image);
    for (std::size_t s = 0; s < segments.size(); ++s) {
        const Rgb color = (!color_ids.empty() && color_ids[s]) ? match_color(*color_ids[s]) : kUnmatchedColor;
        const TensorMap mask = rasterize_heatmap(std::span(&segments[s], 1), image.height(), image.width());
        const auto m = mask.data();
        for (std::size_t p = 0; p < m.size(); ++p) {
            if (m[p] != 0.0f) {
                std::copy(color.begin(), color.end(), out.data.begin() + static_cast<std::ptrdiff_t>(3 * p));
            }
        }
    }
    return out;
}

RgbImage render_match_overlay(const TensorMap& image1, std::span<const LineSegment> lines1, const TensorMap& image2,
                              std::span<const LineSegment> lines2, const LineMatchSet& matches)
{
    std::vector<std::optional<std::size_t>> ids1(lines1.size());
    std::vector<std::optional<std::size_t>> ids2(lines2.size());
    for (std::size_t k = 0; k < matches.matches.size(); ++k) {
        const auto& m = matches.matches[k];
        if (m.i < ids1.size() && m.j < ids2.size()) {
            ids1[m.i] = k;
            ids2[m.j] = k;
        }
    }
    const RgbImage a = render_overlay(image1, lines1, ids1);
    const RgbImage b = render_overlay(image2, lines2, ids2);
    RgbImage out{std::max(a.height, b.height), a.width + b.width, {}};
    out.data.assign(out.height * out.width * 3, 0);
    for (std::size_t y = 0; y < out.height; ++y) {
        if (y < a.height) {
            std::copy_n(a.data.begin() + static_cast<std::ptrdiff_t>(y * a.width * 3), a.width * 3,
                        out.data.begin() + static_cast<std::ptrdiff_t>(y * out.width * 3));
        }
        if (y < b.height) {
            std::copy_n(b.data.begin() + static_cast<std::ptrdiff_t>(y * b.width * 3), b.width * 3,
                        out.data.begin() + static_cast<std::ptrdiff_t>((y * out.width + a.width) * 3));
        }
    }
    return out;
}

} // namespace linekit

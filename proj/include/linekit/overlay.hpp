#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>

#include "linekit/geom.hpp"
#include "linekit/maps.hpp"
#include "linekit/match.hpp"

namespace linekit {

using Rgb = std::array<std::uint8_t, 3>;

/// Reserved for unmatched segments; never produced by match_color.
inline constexpr Rgb kUnmatchedColor{255, 255, 255};

/// Saturated colour for match number k (golden-ratio hue walk).
Rgb match_color(std::size_t k);

/// Grayscale [0, 1] map to 8-bit RGB.
RgbImage to_rgb(const TensorMap& gray);

/// Draws every segment over the image: segment s takes match_color(*color_ids[s]) when set,
/// kUnmatchedColor otherwise. Drawn pixels are the rasterize_heatmap support of the segment.
RgbImage render_overlay(const TensorMap& image, std::span<const LineSegment> segments,
                        std::span<const std::optional<std::size_t>> color_ids = {});

/// Both images side by side, each matched pair sharing the colour of its match index.
RgbImage render_match_overlay(const TensorMap& image1, std::span<const LineSegment> lines1, const TensorMap& image2,
                              std::span<const LineSegment> lines2, const LineMatchSet& matches);

} // namespace linekit

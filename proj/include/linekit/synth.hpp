#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "linekit/geom.hpp"
#include "linekit/maps.hpp"

namespace linekit {

enum class SceneKind { polygon, cube, star, lines, checkerboard, stripes };

inline constexpr SceneKind kAllSceneKinds[] = {SceneKind::polygon, SceneKind::cube,         SceneKind::star,
                                               SceneKind::lines,   SceneKind::checkerboard, SceneKind::stripes};

std::string_view to_string(SceneKind kind);
std::optional<SceneKind> parse_scene_kind(std::string_view name);

/// A rendered grayscale scene with exact junction and segment labels.
struct SceneLabel {
    TensorMap image; // h x w x 1, values in [0, 1]
    std::vector<Point2> junctions;
    std::vector<LineSegment> segments;
    /// Generator counts: polygon {vertices}, star {arms}, lines {segments},
    /// checkerboard {columns, rows}, stripes {stripes}; empty for cube.
    std::vector<std::size_t> structure;
};

/// Random homography composed of perspective, scale, rotation and translation about the image centre.
struct HomographyConfig {
    double scale_sigma = 0.1;          // scale ~ N(1, sigma), clamped to [max(0.1, 1 - 3 sigma), 1 + 3 sigma]
    double rotation_range_deg = 90.0;  // angle ~ U(-range, +range)
    bool translation = true;           // centre shift ~ U(+-w/4) x U(+-h/4)
    double perspective_amplitude = 0.2; // projective row entries ~ U(+-amplitude) / half-diagonal
};

Homography sample_homography(std::uint64_t seed, const HomographyConfig& cfg, std::size_t height, std::size_t width);

/// Renders one synthetic primitive over a textured background. Requires h, w >= 64.
/// Junctions sit on integer pixel coordinates; every segment endpoint is a junction.
SceneLabel render_scene(SceneKind kind, std::uint64_t seed, std::size_t height, std::size_t width);

/// Binary line map: a pixel is 1 iff its centre lies within thickness / 2 of some segment.
TensorMap rasterize_heatmap(std::span<const LineSegment> segments, std::size_t height, std::size_t width,
                            double thickness = 1.0);

/// Bilinear splat of the junction positions (max-combined, so values stay in [0, 1]).
TensorMap splat_junctions(std::span<const Point2> junctions, std::size_t height, std::size_t width);

inline constexpr std::size_t kDescriptorDim = 128;
inline constexpr std::size_t kDescriptorStride = 4;

struct Ellipse;

/// Quarter-resolution positional-code descriptor field for a view: texel p holds
/// the unit-norm code of the canonical coordinate view^-1(4 p). Texels covered by an
/// occluder (given in view coordinates) describe the occluder instead: a code of a
/// coordinate far outside the scene, distinct per occluder.
TensorMap oracle_descriptor_map(const Homography& view, std::size_t height, std::size_t width,
                                std::span<const Ellipse> occluders = {});

/// The code itself: 64 (cos, sin) pairs of fixed seeded frequencies, scaled to unit norm.
std::vector<float> positional_code(Point2 canonical);

struct OracleMaps {
    TensorMap junctions;   // h x w x 1
    TensorMap heatmap;     // h x w x 1
    TensorMap descriptors; // h/4 x w/4 x 128
};

/// Network substitute: the maps an ideal predictor would output for the scene seen through `view`.
OracleMaps oracle_maps(const SceneLabel& label, const Homography& view);

/// The scene geometry seen through a homography, restricted to segments whose
/// warped endpoints both land inside the image (with `margin` px to spare).
/// `kept` receives the source index of every retained segment.
std::vector<LineSegment> visible_segments(std::span<const LineSegment> segments, const Homography& view,
                                          std::size_t height, std::size_t width, double margin,
                                          std::vector<std::size_t>* kept = nullptr);

struct Ellipse {
    Point2 center;
    double semi_major = 1.0;
    double semi_minor = 1.0;
    double angle = 0.0; // radians

    bool contains(Point2 p) const;
    /// Parameter interval of `l` (0 at e1, 1 at e2, unclipped) inside the ellipse, if any.
    std::optional<std::pair<double, double>> intersect(const LineSegment& l) const;
};

inline constexpr double kMinVisibleLength = 1.0;
inline constexpr std::size_t kMaxOccluders = 100;

/// Clips every segment against the occluders, keeping its longest visible piece.
/// Pieces shorter than kMinVisibleLength are dropped. Occluders are painted into the image.
/// `parents` receives, per output segment, the index of the input segment it came from.
SceneLabel apply_occluders(const SceneLabel& label, std::span<const Ellipse> occluders, std::uint64_t texture_seed,
                           std::vector<std::size_t>* parents = nullptr);

/// Adds random textured ellipses until at least `fraction` of the total line
/// length is hidden (or kMaxOccluders are placed), then clips the labels.
SceneLabel synthesize_occlusions(const SceneLabel& label, double fraction, std::uint64_t seed,
                                 std::vector<Ellipse>* placed = nullptr, std::vector<std::size_t>* parents = nullptr);

/// Fraction of the total segment length covered by the union of the ellipses.
double covered_fraction(std::span<const LineSegment> segments, std::span<const Ellipse> occluders);

} // namespace linekit

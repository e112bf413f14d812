#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "linekit/detect.hpp"
#include "linekit/geom.hpp"
#include "linekit/maps.hpp"
#include "linekit/synth.hpp"

namespace linekit {

struct AdaptationParams {
    std::size_t n_homographies = 100;
    HomographyConfig homography_config;
    DetectionParams detection;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Returns the (junction, heatmap) prediction for a warped image. `index` is the
/// position of `view` in the homography list; `view` maps the original image onto the warped one.
using Predictor =
    std::function<std::pair<TensorMap, TensorMap>(const TensorMap& warped_image, std::size_t index, const Homography& view)>;

/// H_1 = identity, H_i (i > 1) drawn with sample_homography from a per-index seed.
std::vector<Homography> adaptation_homographies(const AdaptationParams& params, std::size_t height, std::size_t width);

struct AggregatedMaps {
    TensorMap junctions;
    TensorMap heatmap;
    std::vector<std::uint32_t> coverage; // per pixel, number of views whose unwarped prediction is valid there
};

/// Warps the image by each view, predicts, unwarps by the inverse and averages every
/// pixel over the views that cover it. Pixels covered by no view are 0.
AggregatedMaps aggregate_maps(const Predictor& predictor, const TensorMap& image, std::span<const Homography> views);
AggregatedMaps aggregate_maps(const Predictor& predictor, const TensorMap& image, const AdaptationParams& params);

/// detect_segments on the aggregated maps.
std::vector<ScoredSegment> generate_pseudo_labels(const Predictor& predictor, const TensorMap& image,
                                                  const AdaptationParams& params);

/// Ideal predictor for a synthetic scene: oracle junction and heatmap of the scene seen through `view`.
Predictor oracle_predictor(const SceneLabel& label);

/// Oracle predictor whose heatmap receives zero-mean uniform noise in [-amplitude, amplitude]
/// (then clamped to [0, 1]), freshly drawn per view from (seed, index).
Predictor noisy_oracle_predictor(const SceneLabel& label, double amplitude, std::uint64_t seed);

/// Predictor backed by precomputed maps, one (J, H) pair per homography index.
Predictor precomputed_predictor(std::vector<std::pair<TensorMap, TensorMap>> maps);

} // namespace linekit

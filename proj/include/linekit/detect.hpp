#pragma once

#include <cstddef>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "linekit/geom.hpp"
#include "linekit/maps.hpp"

namespace linekit {

struct DetectionParams {
    double junction_threshold = 1.0 / 65.0;
    double junction_nms_radius = 4.0;
    std::size_t n_samples = 64;
    double xi_avg = 0.25;
    double xi_inlier = 0.75;
    double lambda_radius = 3.0;
    double r_min = std::numbers::sqrt2 / 2.0;
    bool use_candidate_selection = false;
    double xi_cs = 3.0;
    double min_length = 0.0;

    /// Throws InvalidArgument when a field is outside its range.
    void validate() const;
};

struct ScoredSegment {
    LineSegment segment;
    double avg_score = 0.0;
    double inlier_ratio = 0.0;

    friend bool operator==(const ScoredSegment&, const ScoredSegment&) = default;
};

/// Thresholded greedy NMS over the pixels of a single-channel junction map.
/// Kept junctions come out in descending score order (ties: row-major pixel order).
std::vector<Point2> extract_junctions(const TensorMap& j, const DetectionParams& params);

/// n regularly spaced points from e1 to e2, both included.
std::vector<Point2> sample_line_points(Point2 e1, Point2 e2, std::size_t n);

/// r_min + lambda * length / diagonal.
double search_radius(double segment_length, double image_diag, const DetectionParams& params);

/// Largest heatmap value among the pixels within the adaptive radius of q and the bilinear value at q.
double adaptive_local_max(const TensorMap& h, Point2 q, double segment_length, double image_diag,
                          const DetectionParams& params);

enum class ScoreMode { local_max, bilinear };

/// (y_avg, y_inlier) of a segment over params.n_samples points.
std::pair<double, double> score_line(const TensorMap& h, const LineSegment& s, const DetectionParams& params,
                                     ScoreMode mode = ScoreMode::local_max);

/// Drops every candidate that has a third junction strictly between its endpoints
/// (projection parameter in (0, 1)) closer than xi_cs to its supporting line.
std::vector<LineSegment> candidate_selection(std::span<const Point2> junctions,
                                             std::span<const LineSegment> candidates, double xi_cs);

/// All junction pairs, each oriented so that e1 precedes e2 lexicographically by (x, y).
std::vector<LineSegment> enumerate_candidates(std::span<const Point2> junctions);

/// Gated segments sorted by (y_avg descending, endpoints lexicographic).
std::vector<ScoredSegment> detect_segments(const TensorMap& j, const TensorMap& h, const DetectionParams& params);

/// Same, starting from already extracted junctions.
std::vector<ScoredSegment> detect_segments_from_junctions(std::span<const Point2> junctions, const TensorMap& h,
                                                          const DetectionParams& params);

/// Quarter-pixel endpoint search, e1 then e2, over the 9 offsets {-0.25, 0, 0.25}^2.
/// Offsets are ranked by the bilinear y_avg (the local-max search is blind to
/// sub-pixel shifts); ties keep the current endpoint and out-of-bounds offsets are skipped.
/// The returned scores are bilinear-mode scores of the refined segment.
ScoredSegment refine_endpoints(const ScoredSegment& s, const TensorMap& h, const DetectionParams& params);

} // namespace linekit

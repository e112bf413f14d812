#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "linekit/geom.hpp"

namespace linekit {

struct RansacParams {
    std::size_t max_iterations = 1'000'000;
    double inlier_threshold = 5.0; // orthogonal distance, pixels
    double confidence = 0.9999;
    std::uint64_t seed = 0;
    bool overlap_gate = false; // also require segment_overlap >= 0.5 for an inlier

    void validate() const;
};

using SegmentPair = std::pair<LineSegment, LineSegment>; // (image 1, image 2)

/// Least-squares homography from >= 4 homogeneous line correspondences l2 ~ H^-T l1.
/// Each line is scaled to unit norm first. Throws DegenerateConfiguration when the
/// second-smallest singular value of the system is below 1e-9 of the largest.
Homography homography_from_homogeneous_lines(std::span<const Eigen::Vector3d> lines1,
                                             std::span<const Eigen::Vector3d> lines2);

/// Same from segment correspondences (supporting lines, after Hartley normalization of the endpoints).
Homography homography_from_lines(std::span<const SegmentPair> pairs);

/// Minimal solver: exactly four correspondences.
Homography homography_from_4_lines(std::span<const SegmentPair> pairs);

/// Homogeneous supporting line e1 x e2.
Eigen::Vector3d supporting_line(const LineSegment& l);

/// orthogonal_distance(warp(l1, h), l2), +inf when the warp or the distance is undefined
/// (or, with the gate, when the overlap is below 0.5).
double line_residual(const Homography& h, const SegmentPair& pair, bool overlap_gate = false);

struct RansacResult {
    Homography h;
    std::vector<std::size_t> inliers;
    std::size_t iterations = 0;
};

/// Hypothesize-and-verify over random 4-subsets with an adaptive iteration bound,
/// followed by a least-squares refit on the inliers (kept only if it does not lose inliers).
/// Throws InsufficientData for fewer than 4 matches, EmptyResult when no model reaches 4 inliers.
RansacResult ransac_homography(std::span<const SegmentPair> matches, const RansacParams& params);

struct CornerAccuracy {
    double mean_error = 0.0;
    bool correct = false;
};

inline constexpr double kCornerThreshold = 3.0;

/// Mean over the image corners c of |h_gt^-1(h_est(c)) - c|; correct when below 3 px.
CornerAccuracy corner_accuracy(const Homography& h_est, const Homography& h_gt, std::size_t image_w,
                               std::size_t image_h);

} // namespace linekit

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "linekit/geom.hpp"
#include "linekit/maps.hpp"

namespace linekit {

struct MatchParams {
    std::size_t max_samples = 5;
    double min_spacing = 8.0;
    double gap = 0.1;
    std::size_t top_k_prefilter = 10;
    bool mutual_check = true;

    void validate() const;
};

struct LineMatch {
    std::size_t i = 0; // index in image 1
    std::size_t j = 0; // index in image 2
    double score = 0.0;

    friend bool operator==(const LineMatch&, const LineMatch&) = default;
};

struct LineMatchSet {
    std::vector<LineMatch> matches; // sorted by i
    std::vector<std::size_t> unmatched_1;
    std::vector<std::size_t> unmatched_2;

    friend bool operator==(const LineMatchSet&, const LineMatchSet&) = default;
};

/// One descriptor per row, in the order of the sampled points.
using DescriptorSequence = Eigen::MatrixXd;

/// clamp(floor(length / min_spacing) + 1, 2, max_samples) regularly spaced points, endpoints included.
std::vector<Point2> sample_descriptor_points(const LineSegment& l, const MatchParams& params);

/// Samples a quarter-resolution descriptor map at full-resolution pixel positions.
/// Positions are scaled by 1/4 and clamped into the map; every descriptor is L2-normalized.
DescriptorSequence sample_descriptors(const TensorMap& dmap, std::span<const Point2> points);

/// The descriptor sequence of each line.
std::vector<DescriptorSequence> line_descriptors(std::span<const LineSegment> lines, const TensorMap& dmap,
                                                 const MatchParams& params);

struct NwResult {
    double score = 0.0;
    Eigen::MatrixXd matrix; // (m + 1) x (m' + 1)
};

/// Needleman-Wunsch grid with S(i, 0) = i * gap, S(0, j) = j * gap and
/// S(i, j) = max(S(i-1, j) + gap, S(i, j-1) + gap, S(i-1, j-1) + <d_i, d'_j>).
/// The score is the largest entry of the whole grid. Throws InvalidArgument when
/// both sequences are empty, SizeMismatch when the descriptor widths differ.
NwResult nw_best_score(const DescriptorSequence& d1, const DescriptorSequence& d2, double gap);

/// Score only, without keeping the grid.
double nw_score(const DescriptorSequence& d1, const DescriptorSequence& d2, double gap);

/// max(nw(d1, d2), nw(d1, reversed d2)).
double nw_score_both_orientations(const DescriptorSequence& d1, const DescriptorSequence& d2, double gap);

DescriptorSequence reversed_rows(const DescriptorSequence& d);

/// Mean over the query's descriptors of the best dot product with each candidate line.
double nn_average_similarity(const DescriptorSequence& query, const DescriptorSequence& candidate);

/// Indices of the top_k candidates by nn_average_similarity (ties: lower index first).
std::vector<std::size_t> prefilter_candidates(const DescriptorSequence& query,
                                              std::span<const DescriptorSequence> candidates, std::size_t top_k);

/// Full matcher on precomputed descriptor sequences: prefilter each direction
/// independently, score the survivors with NW in both orientations, keep the argmax
/// (ties: lower index) and, with mutual_check, only the pairs that pick each other.
LineMatchSet match_descriptor_sets(std::span<const DescriptorSequence> d1, std::span<const DescriptorSequence> d2,
                                   const MatchParams& params);

LineMatchSet match_lines(std::span<const LineSegment> lines1, std::span<const LineSegment> lines2,
                         const TensorMap& dmap1, const TensorMap& dmap2, const MatchParams& params);

enum class BaselineStrategy { average_descriptor, nn_average, endpoint_only };

/// Scoring rule of a baseline for one (query, candidate) pair.
double baseline_similarity(BaselineStrategy strategy, const DescriptorSequence& query,
                           const DescriptorSequence& candidate);

/// Same assignment and mutual check as match_descriptor_sets, with every line
/// scored by the baseline rule and no prefilter.
LineMatchSet match_descriptor_sets_baseline(BaselineStrategy strategy, std::span<const DescriptorSequence> d1,
                                            std::span<const DescriptorSequence> d2, const MatchParams& params);

LineMatchSet match_lines_baseline(BaselineStrategy strategy, std::span<const LineSegment> lines1,
                                  std::span<const LineSegment> lines2, const TensorMap& dmap1, const TensorMap& dmap2,
                                  const MatchParams& params);

} // namespace linekit

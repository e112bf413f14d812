#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "linekit/geom.hpp"
#include "linekit/match.hpp"

namespace linekit {

enum class LineDistance { structural, orthogonal };

std::string_view to_string(LineDistance d);
std::optional<LineDistance> parse_line_distance(std::string_view name);

inline constexpr double kMinOverlap = 0.5;

struct EvalPair {
    std::vector<LineSegment> segments1;
    std::vector<LineSegment> segments2;
    Homography h; // image 1 -> image 2
    double epsilon = 5.0;
    LineDistance distance = LineDistance::structural;
};

using IndexPair = std::pair<std::size_t, std::size_t>;

/// Distance from `query` to its nearest neighbour in `pool`, if any candidate is admissible.
/// Under the orthogonal distance, candidates overlapping the query by less than 0.5
/// and zero-length segments are not admissible.
std::optional<double> nearest_distance(const LineSegment& query, std::span<const LineSegment> pool, LineDistance d,
                                       std::size_t* index = nullptr);

/// Lines of both sets re-detected within epsilon in the other view, over M1 + M2.
/// L1 is compared in image 2 (warped by h), L2 in image 1 (warped by h^-1).
/// Throws InvalidArgument when both sets are empty.
double repeatability(const EvalPair& p);

/// Mean nearest-neighbour distance, in image 1, over the lines of L2 re-detected in L1.
/// Throws EmptyResult when no line of L2 is re-detected.
double localization_error(const EvalPair& p);

struct PrecisionRecall {
    double precision = 0.0;
    double recall = 0.0;
};

/// Predicted pairs are compared as a set against gt_pairs. Empty prediction:
/// precision 0 (1 when gt is empty too). Empty gt: recall 1.
PrecisionRecall match_precision_recall(const LineMatchSet& pred, std::span<const IndexPair> gt_pairs);

/// Fraction of gt pairs (i, j) for which the prediction matches i to j. 1 when gt is empty.
double matching_accuracy(const LineMatchSet& pred, std::span<const IndexPair> gt_one_to_one);

/// Pairs (i, j) that are mutual nearest neighbours (L1 warped into image 2) within epsilon.
std::vector<IndexPair> gt_correspondences(const EvalPair& p);

} // namespace linekit

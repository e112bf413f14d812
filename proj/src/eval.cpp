#include "linekit/eval.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "linekit/error.hpp"

namespace linekit {

namespace {

double pair_distance(const LineSegment& a, const LineSegment& b, LineDistance d)
{
    return d == LineDistance::structural ? structural_distance(a, b) : orthogonal_distance(a, b);
}

bool admissible(const LineSegment& query, const LineSegment& candidate, LineDistance d)
{
    if (d == LineDistance::structural) {
        return true;
    }
    if (!(query.length() > 0.0) || !(candidate.length() > 0.0)) {
        return false;
    }
    return segment_overlap(query, candidate) >= kMinOverlap;
}

void check_epsilon(const EvalPair& p)
{
    if (!(p.epsilon > 0.0)) {
        throw InvalidArgument("epsilon must be positive");
    }
}

// Warps a set, marking segments that cannot be warped (points at infinity) as absent.
std::vector<std::optional<LineSegment>> try_warp(std::span<const LineSegment> lines, const Homography& h)
{
    std::vector<std::optional<LineSegment>> out;
    out.reserve(lines.size());
    for (const auto& l : lines) {
        try {
            out.emplace_back(warp_segment(l, h));
        } catch (const PointAtInfinity&) {
            out.emplace_back(std::nullopt);
        }
    }
    return out;
}

// Nearest-neighbour distances of every warped query into the pool.
std::vector<std::optional<double>> nn_distances(std::span<const std::optional<LineSegment>> queries,
                                                std::span<const LineSegment> pool, LineDistance d,
                                                std::vector<std::size_t>* nn = nullptr)
{
    std::vector<std::optional<double>> out;
    if (nn != nullptr) {
        nn->assign(queries.size(), static_cast<std::size_t>(-1));
    }
    for (std::size_t k = 0; k < queries.size(); ++k) {
        if (!queries[k]) {
            out.emplace_back(std::nullopt);
            continue;
        }
        std::size_t idx = static_cast<std::size_t>(-1);
        out.push_back(nearest_distance(*queries[k], pool, d, &idx));
        if (nn != nullptr) {
            (*nn)[k] = idx;
        }
    }
    return out;
}

} // namespace

std::string_view to_string(LineDistance d)
{
    return d == LineDistance::structural ? "structural" : "orthogonal";
}

std::optional<LineDistance> parse_line_distance(std::string_view name)
{
    if (name == "structural") {
        return LineDistance::structural;
    }
    if (name == "orthogonal") {
        return LineDistance::orthogonal;
    }
    return std::nullopt;
}

std::optional<double> nearest_distance(const LineSegment& query, std::span<const LineSegment> pool, LineDistance d,
                                       std::size_t* index)
{
    std::optional<double> best;
    for (std::size_t k = 0; k < pool.size(); ++k) {
        if (!admissible(query, pool[k], d)) {
            continue;
        }
        const double v = pair_distance(query, pool[k], d);
        if (!best || v < *best) {
            best = v;
            if (index != nullptr) {
                *index = k;
            }
        }
    }
    return best;
}

double repeatability(const EvalPair& p)
{
    check_epsilon(p);
    const std::size_t total = p.segments1.size() + p.segments2.size();
    if (total == 0) {
        throw InvalidArgument("repeatability needs at least one segment");
    }
    const auto in2 = try_warp(p.segments1, p.h);
    const auto in1 = try_warp(p.segments2, p.h.inverse());
    std::size_t hits = 0;
    for (const auto& d : nn_distances(in2, p.segments2, p.distance)) {
        hits += (d && *d <= p.epsilon) ? 1 : 0;
    }
    for (const auto& d : nn_distances(in1, p.segments1, p.distance)) {
        hits += (d && *d <= p.epsilon) ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(total);
}

double localization_error(const EvalPair& p)
{
    check_epsilon(p);
    const auto in1 = try_warp(p.segments2, p.h.inverse());
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& d : nn_distances(in1, p.segments1, p.distance)) {
        if (d && *d <= p.epsilon) {
            sum += *d;
            ++count;
        }
    }
    if (count == 0) {
        throw EmptyResult("no line is re-detected within epsilon");
    }
    return sum / static_cast<double>(count);
}

PrecisionRecall match_precision_recall(const LineMatchSet& pred, std::span<const IndexPair> gt_pairs)
{
    std::set<IndexPair> predicted;
    for (const auto& m : pred.matches) {
        predicted.emplace(m.i, m.j);
    }
    const std::set<IndexPair> truth(gt_pairs.begin(), gt_pairs.end());
    std::size_t tp = 0;
    for (const auto& m : predicted) {
        tp += truth.count(m);
    }
    PrecisionRecall out;
    if (predicted.empty()) {
        out.precision = truth.empty() ? 1.0 : 0.0;
    } else {
        out.precision = static_cast<double>(tp) / static_cast<double>(predicted.size());
    }
    out.recall = truth.empty() ? 1.0 : static_cast<double>(tp) / static_cast<double>(truth.size());
    return out;
}

double matching_accuracy(const LineMatchSet& pred, std::span<const IndexPair> gt_one_to_one)
{
    if (gt_one_to_one.empty()) {
        return 1.0;
    }
    std::set<IndexPair> predicted;
    for (const auto& m : pred.matches) {
        predicted.emplace(m.i, m.j);
    }
    std::size_t correct = 0;
    for (const auto& g : gt_one_to_one) {
        correct += predicted.count(g);
    }
    return static_cast<double>(correct) / static_cast<double>(gt_one_to_one.size());
}

std::vector<IndexPair> gt_correspondences(const EvalPair& p)
{
    check_epsilon(p);
    const auto in2 = try_warp(p.segments1, p.h);
    std::vector<LineSegment> warped1;
    std::vector<std::size_t> warped_index;
    for (std::size_t i = 0; i < in2.size(); ++i) {
        if (in2[i]) {
            warped1.push_back(*in2[i]);
            warped_index.push_back(i);
        }
    }
    std::vector<std::size_t> nn12;
    const auto d12 = nn_distances(in2, p.segments2, p.distance, &nn12);
    std::vector<std::optional<LineSegment>> plain2(p.segments2.begin(), p.segments2.end());
    std::vector<std::size_t> nn21;
    nn_distances(plain2, warped1, p.distance, &nn21);

    std::vector<IndexPair> out;
    for (std::size_t i = 0; i < in2.size(); ++i) {
        if (!d12[i] || *d12[i] > p.epsilon) {
            continue;
        }
        const std::size_t j = nn12[i];
        const std::size_t back = nn21[j];
        if (back != static_cast<std::size_t>(-1) && warped_index[back] == i) {
            out.emplace_back(i, j);
        }
    }
    return out;
}

} // namespace linekit

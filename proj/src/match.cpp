#include "linekit/match.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "linekit/detect.hpp"
#include "linekit/error.hpp"
#include "linekit/parallel.hpp"

namespace linekit {

namespace {

using Scorer = std::function<double(const DescriptorSequence&, const DescriptorSequence&)>;

// For every query line: best target index (or npos) and its score.
struct Assignment {
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::vector<std::size_t> best;
    std::vector<double> score;
};

Assignment assign(std::span<const DescriptorSequence> queries, std::span<const DescriptorSequence> targets,
                  const Scorer& scorer, std::size_t top_k)
{
    Assignment a{std::vector<std::size_t>(queries.size(), Assignment::npos), std::vector<double>(queries.size(), 0.0)};
    if (targets.empty()) {
        return a;
    }
    parallel_for(queries.size(), [&](std::size_t q) {
        std::vector<std::size_t> pool;
        if (top_k == 0) {
            pool.resize(targets.size());
            std::iota(pool.begin(), pool.end(), std::size_t{0});
        } else {
            pool = prefilter_candidates(queries[q], targets, top_k);
            std::sort(pool.begin(), pool.end());
        }
        double best = -std::numeric_limits<double>::infinity();
        std::size_t arg = Assignment::npos;
        for (std::size_t t : pool) {
            const double s = scorer(queries[q], targets[t]);
            if (s > best) {
                best = s;
                arg = t;
            }
        }
        a.best[q] = arg;
        a.score[q] = best;
    });
    return a;
}

LineMatchSet combine(const Assignment& forward, const Assignment& backward, std::size_t n1, std::size_t n2,
                     bool mutual)
{
    LineMatchSet out;
    std::vector<std::uint8_t> used2(n2, 0);
    for (std::size_t i = 0; i < n1; ++i) {
        const std::size_t j = forward.best[i];
        const bool ok = j != Assignment::npos && (!mutual || backward.best[j] == i);
        if (ok) {
            out.matches.push_back({i, j, forward.score[i]});
            used2[j] = 1;
        } else {
            out.unmatched_1.push_back(i);
        }
    }
    for (std::size_t j = 0; j < n2; ++j) {
        if (used2[j] == 0) {
            out.unmatched_2.push_back(j);
        }
    }
    return out;
}

LineMatchSet run_matcher(std::span<const DescriptorSequence> d1, std::span<const DescriptorSequence> d2,
                         const Scorer& scorer, std::size_t top_k, bool mutual)
{
    const Assignment forward = assign(d1, d2, scorer, top_k);
    Assignment backward;
    if (mutual) {
        backward = assign(d2, d1, scorer, top_k);
    }
    return combine(forward, backward, d1.size(), d2.size(), mutual);
}

Eigen::RowVectorXd mean_row(const DescriptorSequence& d)
{
    return d.colwise().mean();
}

// Plain left-to-right dot product, so every strategy sums in the same order.
template <typename A, typename B>
double ordered_dot(const A& a, const B& b)
{
    double sum = 0.0;
    for (Eigen::Index k = 0; k < a.size(); ++k) {
        sum += a(k) * b(k);
    }
    return sum;
}

} // namespace

void MatchParams::validate() const
{
    if (max_samples < 2) {
        throw InvalidArgument("max_samples must be >= 2");
    }
    if (!(min_spacing > 0.0)) {
        throw InvalidArgument("min_spacing must be positive");
    }
    if (!std::isfinite(gap)) {
        throw InvalidArgument("gap must be finite");
    }
    if (top_k_prefilter < 1) {
        throw InvalidArgument("top_k_prefilter must be >= 1");
    }
}

std::vector<Point2> sample_descriptor_points(const LineSegment& l, const MatchParams& params)
{
    const double fits = std::floor(l.length() / params.min_spacing) + 1.0;
    const double n = std::clamp(fits, 2.0, static_cast<double>(params.max_samples));
    return sample_line_points(l.e1, l.e2, static_cast<std::size_t>(n));
}

DescriptorSequence sample_descriptors(const TensorMap& dmap, std::span<const Point2> points)
{
    if (dmap.empty()) {
        throw InvalidArgument("descriptor map is empty");
    }
    const double maxx = static_cast<double>(dmap.width() - 1);
    const double maxy = static_cast<double>(dmap.height() - 1);
    DescriptorSequence out(static_cast<Eigen::Index>(points.size()), static_cast<Eigen::Index>(dmap.channels()));
    for (std::size_t k = 0; k < points.size(); ++k) {
        const Point2 q{std::clamp(points[k].x / 4.0, 0.0, maxx), std::clamp(points[k].y / 4.0, 0.0, maxy)};
        const auto v = bilinear_sample(dmap, q);
        for (std::size_t c = 0; c < v.size(); ++c) {
            out(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c)) = v[c];
        }
        const double n = out.row(static_cast<Eigen::Index>(k)).norm();
        if (n > 0.0) {
            out.row(static_cast<Eigen::Index>(k)) /= n;
        }
    }
    return out;
}

std::vector<DescriptorSequence> line_descriptors(std::span<const LineSegment> lines, const TensorMap& dmap,
                                                 const MatchParams& params)
{
    std::vector<DescriptorSequence> out;
    out.reserve(lines.size());
    for (const auto& l : lines) {
        const auto pts = sample_descriptor_points(l, params);
        out.push_back(sample_descriptors(dmap, pts));
    }
    return out;
}

NwResult nw_best_score(const DescriptorSequence& d1, const DescriptorSequence& d2, double gap)
{
    const Eigen::Index m = d1.rows();
    const Eigen::Index n = d2.rows();
    if (m == 0 && n == 0) {
        throw InvalidArgument("cannot align two empty descriptor sequences");
    }
    if (m > 0 && n > 0 && d1.cols() != d2.cols()) {
        throw SizeMismatch("descriptor dimensions differ");
    }
    NwResult r;
    r.matrix.resize(m + 1, n + 1);
    for (Eigen::Index i = 0; i <= m; ++i) {
        r.matrix(i, 0) = static_cast<double>(i) * gap;
    }
    for (Eigen::Index j = 0; j <= n; ++j) {
        r.matrix(0, j) = static_cast<double>(j) * gap;
    }
    const Eigen::MatrixXd sim = (m > 0 && n > 0) ? Eigen::MatrixXd(d1 * d2.transpose()) : Eigen::MatrixXd();
    for (Eigen::Index i = 1; i <= m; ++i) {
        for (Eigen::Index j = 1; j <= n; ++j) {
            const double diag = r.matrix(i - 1, j - 1) + sim(i - 1, j - 1);
            const double left = r.matrix(i, j - 1) + gap;
            const double top = r.matrix(i - 1, j) + gap;
            r.matrix(i, j) = std::max({diag, left, top});
        }
    }
    r.score = r.matrix.maxCoeff();
    return r;
}

double nw_score(const DescriptorSequence& d1, const DescriptorSequence& d2, double gap)
{
    return nw_best_score(d1, d2, gap).score;
}

DescriptorSequence reversed_rows(const DescriptorSequence& d)
{
    return d.colwise().reverse();
}

double nw_score_both_orientations(const DescriptorSequence& d1, const DescriptorSequence& d2, double gap)
{
    return std::max(nw_score(d1, d2, gap), nw_score(d1, reversed_rows(d2), gap));
}

double nn_average_similarity(const DescriptorSequence& query, const DescriptorSequence& candidate)
{
    if (query.rows() == 0 || candidate.rows() == 0) {
        return 0.0;
    }
    // Row by row so that single-point lines reduce to the plain dot product.
    double sum = 0.0;
    for (Eigen::Index r = 0; r < query.rows(); ++r) {
        double best = -std::numeric_limits<double>::infinity();
        for (Eigen::Index c = 0; c < candidate.rows(); ++c) {
            best = std::max(best, ordered_dot(query.row(r), candidate.row(c)));
        }
        sum += best;
    }
    return sum / static_cast<double>(query.rows());
}

std::vector<std::size_t> prefilter_candidates(const DescriptorSequence& query,
                                              std::span<const DescriptorSequence> candidates, std::size_t top_k)
{
    std::vector<double> score(candidates.size());
    for (std::size_t t = 0; t < candidates.size(); ++t) {
        score[t] = nn_average_similarity(query, candidates[t]);
    }
    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
    if (order.size() > top_k) {
        order.resize(top_k);
    }
    return order;
}

LineMatchSet match_descriptor_sets(std::span<const DescriptorSequence> d1, std::span<const DescriptorSequence> d2,
                                   const MatchParams& params)
{
    params.validate();
    const double gap = params.gap;
    const Scorer scorer = [gap](const DescriptorSequence& a, const DescriptorSequence& b) {
        return nw_score_both_orientations(a, b, gap);
    };
    return run_matcher(d1, d2, scorer, params.top_k_prefilter, params.mutual_check);
}

LineMatchSet match_lines(std::span<const LineSegment> lines1, std::span<const LineSegment> lines2,
                         const TensorMap& dmap1, const TensorMap& dmap2, const MatchParams& params)
{
    params.validate();
    if (lines1.empty() || lines2.empty()) {
        LineMatchSet out;
        for (std::size_t i = 0; i < lines1.size(); ++i) {
            out.unmatched_1.push_back(i);
        }
        for (std::size_t j = 0; j < lines2.size(); ++j) {
            out.unmatched_2.push_back(j);
        }
        return out;
    }
    const auto d1 = line_descriptors(lines1, dmap1, params);
    const auto d2 = line_descriptors(lines2, dmap2, params);
    return match_descriptor_sets(d1, d2, params);
}

double baseline_similarity(BaselineStrategy strategy, const DescriptorSequence& query,
                           const DescriptorSequence& candidate)
{
    if (query.rows() == 0 || candidate.rows() == 0) {
        return 0.0;
    }
    switch (strategy) {
    case BaselineStrategy::average_descriptor: return ordered_dot(mean_row(query), mean_row(candidate));
    case BaselineStrategy::nn_average: return nn_average_similarity(query, candidate);
    case BaselineStrategy::endpoint_only: {
        const Eigen::Index a = query.rows() - 1;
        const Eigen::Index b = candidate.rows() - 1;
        const double direct = 0.5 * (query.row(0).dot(candidate.row(0)) + query.row(a).dot(candidate.row(b)));
        const double flipped = 0.5 * (query.row(0).dot(candidate.row(b)) + query.row(a).dot(candidate.row(0)));
        return std::max(direct, flipped);
    }
    }
    return 0.0;
}

LineMatchSet match_descriptor_sets_baseline(BaselineStrategy strategy, std::span<const DescriptorSequence> d1,
                                            std::span<const DescriptorSequence> d2, const MatchParams& params)
{
    params.validate();
    const Scorer scorer = [strategy](const DescriptorSequence& a, const DescriptorSequence& b) {
        return baseline_similarity(strategy, a, b);
    };
    return run_matcher(d1, d2, scorer, 0, params.mutual_check);
}

LineMatchSet match_lines_baseline(BaselineStrategy strategy, std::span<const LineSegment> lines1,
                                  std::span<const LineSegment> lines2, const TensorMap& dmap1, const TensorMap& dmap2,
                                  const MatchParams& params)
{
    params.validate();
    const auto d1 = line_descriptors(lines1, dmap1, params);
    const auto d2 = line_descriptors(lines2, dmap2, params);
    return match_descriptor_sets_baseline(strategy, d1, d2, params);
}

} // namespace linekit

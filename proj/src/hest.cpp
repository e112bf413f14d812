#include "linekit/hest.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Geometry>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "linekit/error.hpp"

namespace linekit {

namespace {

constexpr double kDegenerateRatio = 1e-9;

// Rows of l2 x (G l1) = 0, unknowns g = row-major G.
void append_rows(Eigen::MatrixXd& a, Eigen::Index row, const Eigen::Vector3d& l1, const Eigen::Vector3d& l2)
{
    // (G l1)_r = sum_c G(r, c) l1(c) -> coefficient of g(3 r + c) is l1(c).
    const auto put = [&](Eigen::Index r, Eigen::Index comp, double factor) {
        for (Eigen::Index c = 0; c < 3; ++c) {
            a(r, 3 * comp + c) += factor * l1(c);
        }
    };
    // cross(l2, v) = (l2y vz - l2z vy, l2z vx - l2x vz, l2x vy - l2y vx)
    put(row, 2, l2(1));
    put(row, 1, -l2(2));
    put(row + 1, 0, l2(2));
    put(row + 1, 2, -l2(0));
    put(row + 2, 1, l2(0));
    put(row + 2, 0, -l2(1));
}

// Null vector of the stacked system as a 3x3 G, or DegenerateConfiguration.
Eigen::Matrix3d solve_line_map(std::span<const Eigen::Vector3d> l1, std::span<const Eigen::Vector3d> l2)
{
    const auto n = static_cast<Eigen::Index>(l1.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(std::max<Eigen::Index>(3 * n, 9), 9);
    for (Eigen::Index k = 0; k < n; ++k) {
        append_rows(a, 3 * k, l1[static_cast<std::size_t>(k)], l2[static_cast<std::size_t>(k)]);
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const Eigen::VectorXd sv = svd.singularValues();
    if (!(sv(0) > 0.0) || !(sv(7) > kDegenerateRatio * sv(0))) {
        throw DegenerateConfiguration("line configuration does not determine a homography");
    }
    const Eigen::VectorXd g = svd.matrixV().col(8);
    Eigen::Matrix3d G;
    G << g(0), g(1), g(2), g(3), g(4), g(5), g(6), g(7), g(8);
    return G;
}

Eigen::Vector3d unit(const Eigen::Vector3d& l)
{
    const double n = l.norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw DegenerateConfiguration("line has a zero or non-finite homogeneous vector");
    }
    return l / n;
}

Homography from_line_map(const Eigen::Matrix3d& G)
{
    const Eigen::FullPivLU<Eigen::Matrix3d> lu(G);
    if (!lu.isInvertible()) {
        throw DegenerateConfiguration("estimated line map is singular");
    }
    try {
        return Homography(Eigen::Matrix3d(lu.inverse().transpose()));
    } catch (const SingularHomography&) {
        throw DegenerateConfiguration("estimated homography is singular");
    }
}

// Similarity moving the points to zero mean and mean distance sqrt(2).
Eigen::Matrix3d hartley(std::span<const Point2> pts)
{
    double cx = 0.0;
    double cy = 0.0;
    for (const auto& p : pts) {
        cx += p.x, cy += p.y;
    }
    cx /= static_cast<double>(pts.size());
    cy /= static_cast<double>(pts.size());
    double spread = 0.0;
    for (const auto& p : pts) {
        spread += std::hypot(p.x - cx, p.y - cy);
    }
    spread /= static_cast<double>(pts.size());
    const double s = spread > 0.0 ? std::sqrt(2.0) / spread : 1.0;
    Eigen::Matrix3d t;
    t << s, 0, -s * cx, 0, s, -s * cy, 0, 0, 1;
    return t;
}

std::size_t required_iterations(std::size_t inliers, std::size_t total, double confidence)
{
    const double w = static_cast<double>(inliers) / static_cast<double>(total);
    const double all_good = std::pow(w, 4);
    if (all_good >= 1.0) {
        return 0;
    }
    if (all_good <= 0.0) {
        return std::numeric_limits<std::size_t>::max();
    }
    const double n = std::log(1.0 - confidence) / std::log(1.0 - all_good);
    if (!(n < 1e18)) {
        return std::numeric_limits<std::size_t>::max();
    }
    return static_cast<std::size_t>(std::ceil(n));
}

std::vector<std::size_t> count_inliers(const Homography& h, std::span<const SegmentPair> matches,
                                       const RansacParams& params)
{
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < matches.size(); ++k) {
        if (line_residual(h, matches[k], params.overlap_gate) <= params.inlier_threshold) {
            out.push_back(k);
        }
    }
    return out;
}

} // namespace

void RansacParams::validate() const
{
    if (max_iterations < 1) {
        throw InvalidArgument("max_iterations must be >= 1");
    }
    if (!(inlier_threshold > 0.0)) {
        throw InvalidArgument("inlier_threshold must be positive");
    }
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw InvalidArgument("confidence must lie in (0, 1)");
    }
}

Eigen::Vector3d supporting_line(const LineSegment& l)
{
    return Eigen::Vector3d(l.e1.x, l.e1.y, 1.0).cross(Eigen::Vector3d(l.e2.x, l.e2.y, 1.0));
}

Homography homography_from_homogeneous_lines(std::span<const Eigen::Vector3d> lines1,
                                             std::span<const Eigen::Vector3d> lines2)
{
    if (lines1.size() != lines2.size()) {
        throw SizeMismatch("line correspondence lists differ in length");
    }
    if (lines1.size() < 4) {
        throw InsufficientData("a homography needs at least 4 line correspondences");
    }
    std::vector<Eigen::Vector3d> a;
    std::vector<Eigen::Vector3d> b;
    for (std::size_t k = 0; k < lines1.size(); ++k) {
        a.push_back(unit(lines1[k]));
        b.push_back(unit(lines2[k]));
    }
    return from_line_map(solve_line_map(a, b));
}

Homography homography_from_lines(std::span<const SegmentPair> pairs)
{
    if (pairs.size() < 4) {
        throw InsufficientData("a homography needs at least 4 line correspondences");
    }
    std::vector<Point2> p1;
    std::vector<Point2> p2;
    for (const auto& [l1, l2] : pairs) {
        if (!(l1.length() > 0.0) || !(l2.length() > 0.0)) {
            throw DegenerateConfiguration("zero-length segment has no supporting line");
        }
        p1.insert(p1.end(), {l1.e1, l1.e2});
        p2.insert(p2.end(), {l2.e1, l2.e2});
    }
    const Eigen::Matrix3d t1 = hartley(p1);
    const Eigen::Matrix3d t2 = hartley(p2);
    // Lines transform contravariantly: l_n = T^-T l.
    const Eigen::Matrix3d t1_lines = t1.inverse().transpose();
    const Eigen::Matrix3d t2_lines = t2.inverse().transpose();
    std::vector<Eigen::Vector3d> a;
    std::vector<Eigen::Vector3d> b;
    for (const auto& [l1, l2] : pairs) {
        a.push_back(unit(t1_lines * supporting_line(l1)));
        b.push_back(unit(t2_lines * supporting_line(l2)));
    }
    const Homography hn = from_line_map(solve_line_map(a, b));
    try {
        return Homography(Eigen::Matrix3d(t2.inverse() * hn.matrix() * t1));
    } catch (const SingularHomography&) {
        throw DegenerateConfiguration("estimated homography is singular");
    }
}

Homography homography_from_4_lines(std::span<const SegmentPair> pairs)
{
    if (pairs.size() != 4) {
        throw InvalidArgument("the minimal solver takes exactly 4 correspondences");
    }
    return homography_from_lines(pairs);
}

double line_residual(const Homography& h, const SegmentPair& pair, bool overlap_gate)
{
    constexpr double kInf = std::numeric_limits<double>::infinity();
    try {
        const LineSegment w = warp_segment(pair.first, h);
        if (!(w.length() > 0.0) || !(pair.second.length() > 0.0)) {
            return kInf;
        }
        if (overlap_gate && segment_overlap(w, pair.second) < 0.5) {
            return kInf;
        }
        const double d = orthogonal_distance(w, pair.second);
        return std::isfinite(d) ? d : kInf;
    } catch (const Error&) {
        return kInf;
    }
}

RansacResult ransac_homography(std::span<const SegmentPair> matches, const RansacParams& params)
{
    params.validate();
    const std::size_t n = matches.size();
    if (n < 4) {
        throw InsufficientData("RANSAC needs at least 4 line matches");
    }
    std::mt19937_64 rng(params.seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);

    std::optional<Homography> best;
    std::vector<std::size_t> best_inliers;
    std::size_t bound = params.max_iterations;
    std::size_t it = 0;
    while (it < bound) {
        ++it;
        std::array<std::size_t, 4> idx{};
        for (std::size_t k = 0; k < 4; ++k) {
            std::size_t v = 0;
            do {
                v = pick(rng);
            } while (std::find(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), v) !=
                     idx.begin() + static_cast<std::ptrdiff_t>(k));
            idx[k] = v;
        }
        const std::array<SegmentPair, 4> sample{matches[idx[0]], matches[idx[1]], matches[idx[2]], matches[idx[3]]};
        Homography h;
        try {
            h = homography_from_4_lines(sample);
        } catch (const Error&) {
            continue;
        }
        auto inliers = count_inliers(h, matches, params);
        if (inliers.size() > best_inliers.size()) {
            best = h;
            best_inliers = std::move(inliers);
            bound = std::min(params.max_iterations, required_iterations(best_inliers.size(), n, params.confidence));
        }
    }
    if (!best || best_inliers.size() < 4) {
        throw EmptyResult("RANSAC found no model with at least 4 inliers");
    }

    RansacResult out{*best, best_inliers, it};
    // Refit on the consensus set until it stops growing.
    for (int round = 0; round < 10; ++round) {
        std::vector<SegmentPair> consensus;
        for (std::size_t k : out.inliers) {
            consensus.push_back(matches[k]);
        }
        Homography refit;
        try {
            refit = homography_from_lines(consensus);
        } catch (const Error&) {
            break;
        }
        auto inliers = count_inliers(refit, matches, params);
        if (inliers.size() < out.inliers.size()) {
            break;
        }
        const bool same = inliers == out.inliers;
        out.h = refit;
        out.inliers = std::move(inliers);
        if (same) {
            break;
        }
    }
    return out;
}

CornerAccuracy corner_accuracy(const Homography& h_est, const Homography& h_gt, std::size_t image_w,
                               std::size_t image_h)
{
    const double w = static_cast<double>(image_w) - 1.0;
    const double h = static_cast<double>(image_h) - 1.0;
    const Homography back = h_gt.inverse();
    double sum = 0.0;
    for (const Point2 c : {Point2{0, 0}, Point2{w, 0}, Point2{0, h}, Point2{w, h}}) {
        try {
            sum += distance(back.apply(h_est.apply(c)), c);
        } catch (const PointAtInfinity&) {
            return {std::numeric_limits<double>::infinity(), false};
        }
    }
    const double mean = sum / 4.0;
    return {mean, mean < kCornerThreshold};
}

} // namespace linekit

#include "linekit/geom.hpp"

#include <algorithm>
#include <limits>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "linekit/error.hpp"

namespace linekit {

namespace {

constexpr double kMinHomogeneousW = 1e-12;

Eigen::Matrix3d canonicalize(const Eigen::Matrix3d& m)
{
    const double fro = m.norm();
    if (!std::isfinite(fro) || fro == 0.0) {
        throw SingularHomography("homography matrix is zero or non-finite");
    }
    // Already-canonical input is kept bit-for-bit so that serialization round trips are exact.
    Eigen::Matrix3d out = std::abs(fro - 1.0) <= 4 * std::numeric_limits<double>::epsilon() ? m : Eigen::Matrix3d(m / fro);
    Eigen::Index r = 0;
    Eigen::Index c = 0;
    out.cwiseAbs().maxCoeff(&r, &c);
    if (out(r, c) < 0.0) {
        out = -out;
    }
    const Eigen::Vector3d sv = Eigen::JacobiSVD<Eigen::Matrix3d>(out).singularValues();
    if (!(sv(2) > 1e-14 * sv(0))) {
        throw SingularHomography("homography matrix is singular");
    }
    return out;
}

void require_length(const LineSegment& l, const char* what)
{
    if (!(l.length() > 0.0)) {
        throw DegenerateSegment(std::string(what) + ": zero-length segment");
    }
}

// Fraction of [0, 1] (parameterised along `base`) covered by `other`'s projection.
double one_sided_overlap(const LineSegment& base, const LineSegment& other)
{
    const double t1 = projection_parameter(other.e1, base);
    const double t2 = projection_parameter(other.e2, base);
    const double lo = std::max(0.0, std::min(t1, t2));
    const double hi = std::min(1.0, std::max(t1, t2));
    return std::max(0.0, hi - lo);
}

} // namespace

Homography::Homography()
    : m_(Eigen::Matrix3d::Identity() / std::sqrt(3.0))
{
}

Homography::Homography(const Eigen::Matrix3d& m)
    : m_(canonicalize(m))
{
}

Homography Homography::translation(double tx, double ty)
{
    Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
    m(0, 2) = tx;
    m(1, 2) = ty;
    return Homography(m);
}

Homography Homography::scaling(double s)
{
    Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
    m(0, 0) = s;
    m(1, 1) = s;
    return Homography(m);
}

Homography Homography::from_row_major(std::span<const double> values)
{
    if (values.size() != 9) {
        throw InvalidArgument("homography needs exactly 9 values");
    }
    Eigen::Matrix3d m;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            m(r, c) = values[static_cast<std::size_t>(3 * r + c)];
        }
    }
    return Homography(m);
}

std::array<double, 9> Homography::row_major() const
{
    std::array<double, 9> out{};
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            out[static_cast<std::size_t>(3 * r + c)] = m_(r, c);
        }
    }
    return out;
}

Point2 Homography::apply(Point2 p) const
{
    const double x = m_(0, 0) * p.x + m_(0, 1) * p.y + m_(0, 2);
    const double y = m_(1, 0) * p.x + m_(1, 1) * p.y + m_(1, 2);
    const double w = m_(2, 0) * p.x + m_(2, 1) * p.y + m_(2, 2);
    if (std::abs(w) < kMinHomogeneousW) {
        throw PointAtInfinity("point maps to infinity under homography");
    }
    return {x / w, y / w};
}

Homography Homography::inverse() const
{
    return Homography(m_.inverse());
}

Homography operator*(const Homography& a, const Homography& b)
{
    return Homography(a.m_ * b.m_);
}

double structural_distance(const LineSegment& l1, const LineSegment& l2)
{
    const double direct = distance(l1.e1, l2.e1) + distance(l1.e2, l2.e2);
    const double swapped = distance(l1.e1, l2.e2) + distance(l1.e2, l2.e1);
    return std::min(direct, swapped);
}

double point_line_distance(Point2 p, const LineSegment& l)
{
    require_length(l, "point_line_distance");
    const Point2 d = l.e2 - l.e1;
    return std::abs(cross(d, p - l.e1)) / norm(d);
}

double projection_parameter(Point2 p, const LineSegment& l)
{
    require_length(l, "projection_parameter");
    const Point2 d = l.e2 - l.e1;
    return dot(p - l.e1, d) / dot(d, d);
}

double orthogonal_distance(const LineSegment& l1, const LineSegment& l2)
{
    require_length(l1, "orthogonal_distance");
    require_length(l2, "orthogonal_distance");
    const double d12 = point_line_distance(l2.e1, l1) + point_line_distance(l2.e2, l1);
    const double d21 = point_line_distance(l1.e1, l2) + point_line_distance(l1.e2, l2);
    return 0.5 * (d12 + d21);
}

double segment_overlap(const LineSegment& l1, const LineSegment& l2)
{
    require_length(l1, "segment_overlap");
    const double forward = one_sided_overlap(l1, l2);
    if (!(l2.length() > 0.0)) {
        return forward;
    }
    return std::max(forward, one_sided_overlap(l2, l1));
}

LineSegment warp_segment(const LineSegment& l, const Homography& h)
{
    return {h.apply(l.e1), h.apply(l.e2)};
}

std::vector<LineSegment> warp_segments(std::span<const LineSegment> lines, const Homography& h)
{
    std::vector<LineSegment> out;
    out.reserve(lines.size());
    for (const auto& l : lines) {
        out.push_back(warp_segment(l, h));
    }
    return out;
}

} // namespace linekit

#pragma once

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace linekit {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
    friend bool operator==(const Point2&, const Point2&) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 p) { return std::hypot(p.x, p.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

/// Segment stored as an ordered endpoint pair. Distances below treat it as unordered.
struct LineSegment {
    Point2 e1;
    Point2 e2;

    double length() const { return distance(e1, e2); }
    LineSegment reversed() const { return {e2, e1}; }
    friend bool operator==(const LineSegment&, const LineSegment&) = default;
};

/// Planar projective map on homogeneous pixel coordinates.
///
/// The matrix is kept in canonical scale: unit Frobenius norm with the
/// largest-magnitude entry positive, so two homographies describing the same
/// map compare equal entry by entry.
class Homography {
public:
    Homography();
    /// Throws SingularHomography when the matrix is (numerically) singular.
    explicit Homography(const Eigen::Matrix3d& m);

    static Homography identity() { return Homography(); }
    static Homography translation(double tx, double ty);
    static Homography scaling(double s);
    /// Row-major 9 entries.
    static Homography from_row_major(std::span<const double> values);

    const Eigen::Matrix3d& matrix() const { return m_; }
    std::array<double, 9> row_major() const;

    /// Throws PointAtInfinity if the mapped homogeneous w is below 1e-12 in magnitude.
    Point2 apply(Point2 p) const;
    Homography inverse() const;

    /// (a * b)(p) == a(b(p)).
    friend Homography operator*(const Homography& a, const Homography& b);

private:
    Eigen::Matrix3d m_;
};

/// Minimum over the two endpoint pairings of the summed endpoint distances.
double structural_distance(const LineSegment& l1, const LineSegment& l2);

/// Distance from p to the infinite line supporting l. Throws DegenerateSegment for zero length.
double point_line_distance(Point2 p, const LineSegment& l);

/// Position of p's orthogonal projection along l: 0 at e1, 1 at e2.
double projection_parameter(Point2 p, const LineSegment& l);

/// Mean of the two asymmetric endpoint-to-supporting-line distances.
/// Throws DegenerateSegment if either segment has zero length.
double orthogonal_distance(const LineSegment& l1, const LineSegment& l2);

/// Fraction of l1 covered by the projection of l2 onto its supporting line,
/// symmetrised as the max over both directions. Range [0, 1].
///
/// Throws DegenerateSegment when l1 has zero length; a zero-length l2 only
/// contributes the one-sided value (which is 0).
double segment_overlap(const LineSegment& l1, const LineSegment& l2);

LineSegment warp_segment(const LineSegment& l, const Homography& h);
std::vector<LineSegment> warp_segments(std::span<const LineSegment> lines, const Homography& h);

} // namespace linekit

#include "linekit/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Core>

#include "linekit/error.hpp"

namespace linekit {

namespace {

using Rng = std::mt19937_64;

constexpr double kPi = std::numbers::pi;
constexpr double kBorderMargin = 4.0;
constexpr double kMinJunctionSeparation = 10.0;
constexpr double kMinJunctionToSegment = 6.0;
constexpr double kMinIncidentAngleDeg = 20.0;
constexpr std::uint64_t kDescriptorBankSeed = 0x50D2C0DEull;
// Std-dev of the code frequencies (rad / px): codes of points 8 px apart have similarity 1/2.
const double kDescriptorBandwidth = std::sqrt(2.0 * std::numbers::ln2) / 8.0;
constexpr std::size_t kCodePairs = kDescriptorDim / 2;
constexpr double kOccluderCodeOffset = 1.0e4;

double uniform(Rng& rng, double lo, double hi)
{
    if (!(hi > lo)) {
        return lo;
    }
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::size_t uniform_count(Rng& rng, std::size_t lo, std::size_t hi)
{
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

Point2 rounded(Point2 p)
{
    return {std::round(p.x), std::round(p.y)};
}

double point_segment_distance(Point2 p, const LineSegment& l)
{
    const Point2 d = l.e2 - l.e1;
    const double len2 = dot(d, d);
    if (len2 == 0.0) {
        return distance(p, l.e1);
    }
    const double t = std::clamp(dot(p - l.e1, d) / len2, 0.0, 1.0);
    return distance(p, l.e1 + t * d);
}

bool segments_intersect(const LineSegment& a, const LineSegment& b)
{
    const auto orient = [](Point2 p, Point2 q, Point2 r) { return cross(q - p, r - p); };
    const double d1 = orient(b.e1, b.e2, a.e1);
    const double d2 = orient(b.e1, b.e2, a.e2);
    const double d3 = orient(a.e1, a.e2, b.e1);
    const double d4 = orient(a.e1, a.e2, b.e2);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

double segment_segment_distance(const LineSegment& a, const LineSegment& b)
{
    if (segments_intersect(a, b)) {
        return 0.0;
    }
    return std::min({point_segment_distance(a.e1, b), point_segment_distance(a.e2, b),
                     point_segment_distance(b.e1, a), point_segment_distance(b.e2, a)});
}

struct Checks {
    bool chords = true;              // no two-edge path i-k-j whose chord i-j passes close to k
    bool disjoint_segments = false;  // segments without a shared endpoint keep apart
};

// Rejects geometry that would make the labels ambiguous at pixel scale.
bool well_formed(const std::vector<Point2>& junctions, const std::vector<LineSegment>& segments, std::size_t h,
                 std::size_t w, Checks checks)
{
    const double maxx = static_cast<double>(w) - 1.0 - kBorderMargin;
    const double maxy = static_cast<double>(h) - 1.0 - kBorderMargin;
    for (const auto& p : junctions) {
        if (p.x < kBorderMargin || p.y < kBorderMargin || p.x > maxx || p.y > maxy) {
            return false;
        }
    }
    for (std::size_t i = 0; i < junctions.size(); ++i) {
        for (std::size_t j = i + 1; j < junctions.size(); ++j) {
            if (distance(junctions[i], junctions[j]) < kMinJunctionSeparation) {
                return false;
            }
        }
    }
    const auto incident = [](const LineSegment& s, Point2 p) { return s.e1 == p || s.e2 == p; };
    for (const auto& p : junctions) {
        for (const auto& s : segments) {
            if (!incident(s, p) && point_segment_distance(p, s) < kMinJunctionToSegment) {
                return false;
            }
        }
    }
    const double min_cos = std::cos(kMinIncidentAngleDeg * kPi / 180.0);
    for (std::size_t i = 0; i < segments.size(); ++i) {
        for (std::size_t j = i + 1; j < segments.size(); ++j) {
            const auto& a = segments[i];
            const auto& b = segments[j];
            Point2 shared{};
            Point2 pa{};
            Point2 pb{};
            bool has_shared = true;
            if (a.e1 == b.e1) {
                shared = a.e1, pa = a.e2, pb = b.e2;
            } else if (a.e1 == b.e2) {
                shared = a.e1, pa = a.e2, pb = b.e1;
            } else if (a.e2 == b.e1) {
                shared = a.e2, pa = a.e1, pb = b.e2;
            } else if (a.e2 == b.e2) {
                shared = a.e2, pa = a.e1, pb = b.e1;
            } else {
                has_shared = false;
            }
            if (has_shared) {
                const Point2 u = pa - shared;
                const Point2 v = pb - shared;
                if (dot(u, v) / (norm(u) * norm(v)) > min_cos) {
                    return false;
                }
            } else if (checks.disjoint_segments && segment_segment_distance(a, b) < kMinJunctionToSegment) {
                return false;
            }
        }
    }
    if (checks.chords) {
        const auto connected = [&](Point2 a, Point2 b) {
            return std::any_of(segments.begin(), segments.end(), [&](const LineSegment& s) {
                return (s.e1 == a && s.e2 == b) || (s.e1 == b && s.e2 == a);
            });
        };
        for (std::size_t i = 0; i < junctions.size(); ++i) {
            for (std::size_t j = i + 1; j < junctions.size(); ++j) {
                const LineSegment chord{junctions[i], junctions[j]};
                for (std::size_t k = 0; k < junctions.size(); ++k) {
                    if (k == i || k == j || !connected(junctions[i], junctions[k]) ||
                        !connected(junctions[k], junctions[j])) {
                        continue;
                    }
                    const double t = projection_parameter(junctions[k], chord);
                    if (t > 0.0 && t < 1.0 && point_line_distance(junctions[k], chord) < kMinJunctionToSegment) {
                        return false;
                    }
                }
            }
        }
    }
    return true;
}

// Smooth value noise plus a brightness gradient, roughly in [0.15, 0.85].
TensorMap textured_background(Rng& rng, std::size_t h, std::size_t w)
{
    const std::size_t cells = uniform_count(rng, 3, 8);
    std::vector<double> lattice((cells + 1) * (cells + 1));
    for (auto& v : lattice) {
        v = uniform(rng, -1.0, 1.0);
    }
    const double base = uniform(rng, 0.3, 0.7);
    const double noise_amp = uniform(rng, 0.05, 0.15);
    const double gx = uniform(rng, -0.15, 0.15);
    const double gy = uniform(rng, -0.15, 0.15);
    TensorMap img(h, w, 1);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            const double u = static_cast<double>(x) / static_cast<double>(w) * static_cast<double>(cells);
            const double v = static_cast<double>(y) / static_cast<double>(h) * static_cast<double>(cells);
            const auto i0 = static_cast<std::size_t>(u);
            const auto j0 = static_cast<std::size_t>(v);
            const double fu = u - static_cast<double>(i0);
            const double fv = v - static_cast<double>(j0);
            const auto at = [&](std::size_t i, std::size_t j) { return lattice[j * (cells + 1) + i]; };
            const double n = (1 - fv) * ((1 - fu) * at(i0, j0) + fu * at(i0 + 1, j0)) +
                             fv * ((1 - fu) * at(i0, j0 + 1) + fu * at(i0 + 1, j0 + 1));
            const double ramp = gx * (u / static_cast<double>(cells) - 0.5) + gy * (v / static_cast<double>(cells) - 0.5);
            img.at(y, x) = static_cast<float>(std::clamp(base + noise_amp * n + ramp, 0.0, 1.0));
        }
    }
    return img;
}

double mean_value(const TensorMap& img)
{
    double sum = 0.0;
    for (float v : img.data()) {
        sum += v;
    }
    return img.empty() ? 0.0 : sum / static_cast<double>(img.size());
}

// A shade that stands out against the background mean.
double contrasting_shade(Rng& rng, double background)
{
    for (;;) {
        const double v = uniform(rng, 0.0, 1.0);
        if (std::abs(v - background) > 0.3) {
            return v;
        }
    }
}

bool inside_polygon(Point2 p, std::span<const Point2> poly)
{
    bool inside = false;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const Point2 a = poly[i];
        const Point2 b = poly[j];
        if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) {
            inside = !inside;
        }
    }
    return inside;
}

void fill_polygon(TensorMap& img, std::span<const Point2> poly, double shade)
{
    double minx = poly[0].x, maxx = poly[0].x, miny = poly[0].y, maxy = poly[0].y;
    for (const auto& p : poly) {
        minx = std::min(minx, p.x), maxx = std::max(maxx, p.x);
        miny = std::min(miny, p.y), maxy = std::max(maxy, p.y);
    }
    const auto x0 = static_cast<std::size_t>(std::max(0.0, std::floor(minx)));
    const auto y0 = static_cast<std::size_t>(std::max(0.0, std::floor(miny)));
    const auto x1 = std::min(img.width() - 1, static_cast<std::size_t>(std::max(0.0, std::ceil(maxx))));
    const auto y1 = std::min(img.height() - 1, static_cast<std::size_t>(std::max(0.0, std::ceil(maxy))));
    for (std::size_t y = y0; y <= y1; ++y) {
        for (std::size_t x = x0; x <= x1; ++x) {
            if (inside_polygon({static_cast<double>(x), static_cast<double>(y)}, poly)) {
                img.at(y, x) = static_cast<float>(shade);
            }
        }
    }
}

void draw_segment(TensorMap& img, const LineSegment& s, double thickness, double shade)
{
    const double r = 0.5 * thickness;
    const auto lo = [&](double v) { return static_cast<std::size_t>(std::max(0.0, std::floor(v - r))); };
    const auto hi = [&](double v, std::size_t n) {
        return std::min(n - 1, static_cast<std::size_t>(std::max(0.0, std::ceil(v + r))));
    };
    for (std::size_t y = lo(std::min(s.e1.y, s.e2.y)); y <= hi(std::max(s.e1.y, s.e2.y), img.height()); ++y) {
        for (std::size_t x = lo(std::min(s.e1.x, s.e2.x)); x <= hi(std::max(s.e1.x, s.e2.x), img.width()); ++x) {
            if (point_segment_distance({static_cast<double>(x), static_cast<double>(y)}, s) <= r) {
                img.at(y, x) = static_cast<float>(shade);
            }
        }
    }
}

std::vector<Point2> unique_endpoints(const std::vector<LineSegment>& segments)
{
    std::vector<Point2> out;
    for (const auto& s : segments) {
        for (const Point2 p : {s.e1, s.e2}) {
            if (std::find(out.begin(), out.end(), p) == out.end()) {
                out.push_back(p);
            }
        }
    }
    return out;
}

struct Geometry {
    std::vector<Point2> junctions;
    std::vector<LineSegment> segments;
    std::vector<std::size_t> structure;
    Checks checks;
};

Point2 random_center(Rng& rng, std::size_t h, std::size_t w, double radius)
{
    const double mx = std::min(radius + kBorderMargin, 0.5 * static_cast<double>(w));
    const double my = std::min(radius + kBorderMargin, 0.5 * static_cast<double>(h));
    return {uniform(rng, mx, static_cast<double>(w) - 1.0 - mx), uniform(rng, my, static_cast<double>(h) - 1.0 - my)};
}

std::vector<double> spaced_angles(Rng& rng, std::size_t n, double min_gap)
{
    for (;;) {
        std::vector<double> a(n);
        for (auto& v : a) {
            v = uniform(rng, 0.0, 2.0 * kPi);
        }
        std::sort(a.begin(), a.end());
        bool ok = true;
        for (std::size_t i = 0; i < n; ++i) {
            const double gap = i + 1 < n ? a[i + 1] - a[i] : a[0] + 2.0 * kPi - a[i];
            ok = ok && gap >= min_gap;
        }
        if (ok) {
            return a;
        }
    }
}

Geometry polygon_geometry(Rng& rng, std::size_t h, std::size_t w)
{
    Geometry g;
    const std::size_t n = uniform_count(rng, 3, 7);
    const double size = static_cast<double>(std::min(h, w));
    const double radius = uniform(rng, 0.25, 0.42) * size;
    const Point2 c = random_center(rng, h, w, radius);
    for (double a : spaced_angles(rng, n, 2.0 * kPi / static_cast<double>(n) * 0.5)) {
        const double r = radius * uniform(rng, 0.6, 1.0);
        g.junctions.push_back(rounded({c.x + r * std::cos(a), c.y + r * std::sin(a)}));
    }
    for (std::size_t i = 0; i < n; ++i) {
        g.segments.push_back({g.junctions[i], g.junctions[(i + 1) % n]});
    }
    g.structure = {n};
    return g;
}

Geometry star_geometry(Rng& rng, std::size_t h, std::size_t w)
{
    Geometry g;
    const std::size_t arms = uniform_count(rng, 3, 7);
    const double size = static_cast<double>(std::min(h, w));
    const double radius = uniform(rng, 0.25, 0.42) * size;
    const Point2 c = rounded(random_center(rng, h, w, radius));
    g.junctions.push_back(c);
    for (double a : spaced_angles(rng, arms, kPi / 6.0)) {
        const double r = radius * uniform(rng, 0.5, 1.0);
        const Point2 tip = rounded({c.x + r * std::cos(a), c.y + r * std::sin(a)});
        g.junctions.push_back(tip);
        g.segments.push_back({c, tip});
    }
    g.structure = {arms};
    return g;
}

Geometry lines_geometry(Rng& rng, std::size_t h, std::size_t w)
{
    Geometry g;
    const std::size_t count = uniform_count(rng, 1, 5);
    const double size = static_cast<double>(std::min(h, w));
    for (std::size_t i = 0; i < count; ++i) {
        Point2 a{};
        Point2 b{};
        do {
            a = rounded({uniform(rng, kBorderMargin, static_cast<double>(w) - 1 - kBorderMargin),
                         uniform(rng, kBorderMargin, static_cast<double>(h) - 1 - kBorderMargin)});
            b = rounded({uniform(rng, kBorderMargin, static_cast<double>(w) - 1 - kBorderMargin),
                         uniform(rng, kBorderMargin, static_cast<double>(h) - 1 - kBorderMargin)});
        } while (distance(a, b) < 0.2 * size);
        g.segments.push_back({a, b});
    }
    g.junctions = unique_endpoints(g.segments);
    g.structure = {count};
    g.checks.disjoint_segments = true;
    return g;
}

// Orthographic view of a rotated cube: 7 visible corners, 9 visible edges.
Geometry cube_geometry(Rng& rng, std::size_t h, std::size_t w, std::vector<std::vector<Point2>>* faces)
{
    static constexpr std::array<std::array<int, 4>, 6> kFaces = {{
        {0, 1, 3, 2}, {4, 5, 7, 6}, // x = -1, x = +1
        {0, 1, 5, 4}, {2, 3, 7, 6}, // y = -1, y = +1
        {0, 2, 6, 4}, {1, 3, 7, 5}, // z = -1, z = +1
    }};
    static constexpr std::array<std::array<double, 3>, 6> kNormals = {
        {{-1, 0, 0}, {1, 0, 0}, {0, -1, 0}, {0, 1, 0}, {0, 0, -1}, {0, 0, 1}}};

    Geometry g;
    Eigen::Matrix3d rot;
    std::vector<std::size_t> visible;
    for (;;) {
        // Uniform rotation from a random unit quaternion.
        Eigen::Vector4d q;
        for (int i = 0; i < 4; ++i) {
            q(i) = std::normal_distribution<double>(0.0, 1.0)(rng);
        }
        q.normalize();
        const double a = q(0), b = q(1), c = q(2), d = q(3);
        rot << a * a + b * b - c * c - d * d, 2 * (b * c - a * d), 2 * (b * d + a * c), //
            2 * (b * c + a * d), a * a - b * b + c * c - d * d, 2 * (c * d - a * b),    //
            2 * (b * d - a * c), 2 * (c * d + a * b), a * a - b * b - c * c + d * d;
        visible.clear();
        bool ok = true;
        for (std::size_t f = 0; f < kFaces.size(); ++f) {
            const double nz = (rot * Eigen::Vector3d(kNormals[f][0], kNormals[f][1], kNormals[f][2]))(2);
            if (nz < 0.0) {
                visible.push_back(f);
                ok = ok && nz < -0.3;
            }
        }
        if (ok && visible.size() == 3) {
            break;
        }
    }
    const double size = static_cast<double>(std::min(h, w));
    const double lo = std::max(0.12 * size, 10.0);
    const double hi = std::min(std::max(0.2 * size, lo), (0.5 * size - kBorderMargin) / std::sqrt(3.0));
    const double half = uniform(rng, lo, hi);
    const Point2 c = random_center(rng, h, w, half * std::sqrt(3.0));
    std::array<Point2, 8> corners{};
    for (int v = 0; v < 8; ++v) {
        const Eigen::Vector3d p = rot * Eigen::Vector3d((v & 4) ? 1 : -1, (v & 2) ? 1 : -1, (v & 1) ? 1 : -1);
        corners[static_cast<std::size_t>(v)] = rounded({c.x + half * p(0), c.y + half * p(1)});
    }
    std::vector<std::pair<int, int>> edges;
    for (std::size_t f : visible) {
        std::vector<Point2> poly;
        for (int k = 0; k < 4; ++k) {
            const int a = kFaces[f][static_cast<std::size_t>(k)];
            const int b = kFaces[f][static_cast<std::size_t>((k + 1) % 4)];
            poly.push_back(corners[static_cast<std::size_t>(a)]);
            const auto e = std::minmax(a, b);
            if (std::find(edges.begin(), edges.end(), std::pair<int, int>(e.first, e.second)) == edges.end()) {
                edges.emplace_back(e.first, e.second);
            }
        }
        if (faces != nullptr) {
            faces->push_back(std::move(poly));
        }
    }
    for (const auto& [a, b] : edges) {
        g.segments.push_back({corners[static_cast<std::size_t>(a)], corners[static_cast<std::size_t>(b)]});
    }
    g.junctions = unique_endpoints(g.segments);
    return g;
}

struct Lattice {
    std::size_t cols = 0;
    std::size_t rows = 0;
    std::vector<Point2> nodes; // (rows + 1) x (cols + 1), row-major
    Point2 node(std::size_t i, std::size_t j) const { return nodes[j * (cols + 1) + i]; }
};

Lattice random_lattice(Rng& rng, std::size_t h, std::size_t w, std::size_t cols, std::size_t rows, double min_cell,
                       double max_cell)
{
    const double size = static_cast<double>(std::min(h, w));
    for (int attempt = 0; attempt < 100; ++attempt) {
        const double sx = uniform(rng, min_cell, max_cell);
        const double sy = uniform(rng, min_cell, max_cell);
        const double theta = uniform(rng, -kPi, kPi);
        const double extent = 0.5 * std::hypot(sx * static_cast<double>(cols), sy * static_cast<double>(rows));
        if (extent + kBorderMargin > 0.5 * size) {
            continue;
        }
        const Point2 c = random_center(rng, h, w, extent);
        Lattice lat{cols, rows, {}};
        for (std::size_t j = 0; j <= rows; ++j) {
            for (std::size_t i = 0; i <= cols; ++i) {
                const double u = (static_cast<double>(i) - 0.5 * static_cast<double>(cols)) * sx;
                const double v = (static_cast<double>(j) - 0.5 * static_cast<double>(rows)) * sy;
                lat.nodes.push_back(rounded({c.x + u * std::cos(theta) - v * std::sin(theta),
                                             c.y + u * std::sin(theta) + v * std::cos(theta)}));
            }
        }
        return lat;
    }
    return {cols, rows, {}};
}

Geometry checkerboard_geometry(Rng& rng, std::size_t h, std::size_t w, Lattice& lat)
{
    Geometry g;
    const double size = static_cast<double>(std::min(h, w));
    // Cells of at least 14 px must fit along the diagonal.
    const auto fit = static_cast<std::size_t>((size - 2.0 * kBorderMargin) / (14.0 * std::sqrt(2.0)));
    const std::size_t most = std::clamp<std::size_t>(fit, 2, 5);
    const std::size_t cols = uniform_count(rng, 2, most);
    const std::size_t rows = uniform_count(rng, 2, most);
    const double max_cell = std::max(14.0, 0.8 * size / static_cast<double>(std::max(cols, rows)) / std::sqrt(2.0));
    lat = random_lattice(rng, h, w, cols, rows, 14.0, max_cell);
    if (lat.nodes.empty()) {
        return g;
    }
    g.junctions = lat.nodes;
    for (std::size_t j = 0; j <= rows; ++j) {
        for (std::size_t i = 0; i <= cols; ++i) {
            if (i < cols) {
                g.segments.push_back({lat.node(i, j), lat.node(i + 1, j)});
            }
            if (j < rows) {
                g.segments.push_back({lat.node(i, j), lat.node(i, j + 1)});
            }
        }
    }
    g.structure = {cols, rows};
    g.checks.chords = false;
    return g;
}

// A "ladder": parallel stripes whose ends are joined by two rows of caps.
Geometry stripes_geometry(Rng& rng, std::size_t h, std::size_t w, Lattice& lat)
{
    Geometry g;
    const double size = static_cast<double>(std::min(h, w));
    const std::size_t stripes = uniform_count(rng, 3, 6);
    // One-column lattice: column 0/1 are the two stripe ends, rows are stripe boundaries.
    lat = random_lattice(rng, h, w, 1, stripes - 1, 12.0, std::max(12.0, 0.45 * size));
    if (lat.nodes.empty()) {
        return g;
    }
    const double len = distance(lat.node(0, 0), lat.node(1, 0));
    const double gap = distance(lat.node(0, 0), lat.node(0, 1));
    if (len < 2.0 * gap) {
        // Keep stripes elongated; the caller retries with fresh draws.
        g.junctions.clear();
        return g;
    }
    g.junctions = lat.nodes;
    for (std::size_t j = 0; j < stripes; ++j) {
        g.segments.push_back({lat.node(0, j), lat.node(1, j)});
    }
    for (std::size_t j = 0; j + 1 < stripes; ++j) {
        g.segments.push_back({lat.node(0, j), lat.node(0, j + 1)});
        g.segments.push_back({lat.node(1, j), lat.node(1, j + 1)});
    }
    g.structure = {stripes};
    g.checks.chords = false;
    return g;
}

std::vector<Point2> cell_quad(const Lattice& lat, std::size_t i, std::size_t j)
{
    return {lat.node(i, j), lat.node(i + 1, j), lat.node(i + 1, j + 1), lat.node(i, j + 1)};
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(salt), static_cast<std::uint32_t>(salt >> 32)};
    std::array<std::uint64_t, 1> out{};
    seq.generate(reinterpret_cast<std::uint32_t*>(out.data()), reinterpret_cast<std::uint32_t*>(out.data()) + 2);
    return out[0];
}

} // namespace

std::string_view to_string(SceneKind kind)
{
    switch (kind) {
    case SceneKind::polygon: return "polygon";
    case SceneKind::cube: return "cube";
    case SceneKind::star: return "star";
    case SceneKind::lines: return "lines";
    case SceneKind::checkerboard: return "checkerboard";
    case SceneKind::stripes: return "stripes";
    }
    return "unknown";
}

std::optional<SceneKind> parse_scene_kind(std::string_view name)
{
    for (SceneKind k : kAllSceneKinds) {
        if (to_string(k) == name) {
            return k;
        }
    }
    return std::nullopt;
}

Homography sample_homography(std::uint64_t seed, const HomographyConfig& cfg, std::size_t height, std::size_t width)
{
    if (cfg.scale_sigma < 0 || cfg.rotation_range_deg < 0 || cfg.perspective_amplitude < 0) {
        throw InvalidArgument("homography config ranges must be non-negative");
    }
    Rng rng(seed);
    const double w = static_cast<double>(width);
    const double h = static_cast<double>(height);
    const double cx = 0.5 * (w - 1.0);
    const double cy = 0.5 * (h - 1.0);

    double scale = 1.0;
    if (cfg.scale_sigma > 0) {
        scale = std::normal_distribution<double>(1.0, cfg.scale_sigma)(rng);
        scale = std::clamp(scale, std::max(0.1, 1.0 - 3.0 * cfg.scale_sigma), 1.0 + 3.0 * cfg.scale_sigma);
    }
    const double range = cfg.rotation_range_deg * kPi / 180.0;
    const double angle = uniform(rng, -range, range);
    const double half_diag = 0.5 * std::hypot(w, h);
    const double px = uniform(rng, -cfg.perspective_amplitude, cfg.perspective_amplitude) / half_diag;
    const double py = uniform(rng, -cfg.perspective_amplitude, cfg.perspective_amplitude) / half_diag;
    double tx = 0.0;
    double ty = 0.0;
    if (cfg.translation) {
        tx = uniform(rng, -0.25 * w, 0.25 * w);
        ty = uniform(rng, -0.25 * h, 0.25 * h);
    }

    Eigen::Matrix3d to_center = Eigen::Matrix3d::Identity();
    to_center(0, 2) = -cx;
    to_center(1, 2) = -cy;
    Eigen::Matrix3d perspective = Eigen::Matrix3d::Identity();
    perspective(2, 0) = px;
    perspective(2, 1) = py;
    Eigen::Matrix3d similarity = Eigen::Matrix3d::Identity();
    similarity(0, 0) = scale * std::cos(angle);
    similarity(0, 1) = -scale * std::sin(angle);
    similarity(1, 0) = scale * std::sin(angle);
    similarity(1, 1) = scale * std::cos(angle);
    similarity(0, 2) = cx + tx;
    similarity(1, 2) = cy + ty;
    return Homography(similarity * perspective * to_center);
}

SceneLabel render_scene(SceneKind kind, std::uint64_t seed, std::size_t height, std::size_t width)
{
    if (height < 64 || width < 64) {
        throw InvalidArgument("scenes need at least 64x64 pixels");
    }
    Rng rng(seed);
    SceneLabel label;
    label.image = textured_background(rng, height, width);
    const double bg = mean_value(label.image);

    Geometry g;
    Lattice lattice;
    std::vector<std::vector<Point2>> faces;
    for (int attempt = 0;; ++attempt) {
        if (attempt > 100000) {
            throw Error("scene generator failed to find valid geometry");
        }
        faces.clear();
        switch (kind) {
        case SceneKind::polygon: g = polygon_geometry(rng, height, width); break;
        case SceneKind::cube: g = cube_geometry(rng, height, width, &faces); break;
        case SceneKind::star: g = star_geometry(rng, height, width); break;
        case SceneKind::lines: g = lines_geometry(rng, height, width); break;
        case SceneKind::checkerboard: g = checkerboard_geometry(rng, height, width, lattice); break;
        case SceneKind::stripes: g = stripes_geometry(rng, height, width, lattice); break;
        }
        if (!g.junctions.empty() && well_formed(g.junctions, g.segments, height, width, g.checks)) {
            break;
        }
    }

    switch (kind) {
    case SceneKind::polygon: fill_polygon(label.image, g.junctions, contrasting_shade(rng, bg)); break;
    case SceneKind::cube:
        for (const auto& face : faces) {
            fill_polygon(label.image, face, contrasting_shade(rng, bg));
        }
        break;
    case SceneKind::star:
    case SceneKind::lines: {
        const double shade = contrasting_shade(rng, bg);
        const double thickness = uniform(rng, 2.0, 3.0);
        for (const auto& s : g.segments) {
            draw_segment(label.image, s, thickness, shade);
        }
        break;
    }
    case SceneKind::checkerboard: {
        const double dark = uniform(rng, 0.0, 0.25);
        const double light = uniform(rng, 0.75, 1.0);
        for (std::size_t j = 0; j < lattice.rows; ++j) {
            for (std::size_t i = 0; i < lattice.cols; ++i) {
                fill_polygon(label.image, cell_quad(lattice, i, j), (i + j) % 2 == 0 ? dark : light);
            }
        }
        break;
    }
    case SceneKind::stripes: {
        const double a = contrasting_shade(rng, bg);
        const double b = contrasting_shade(rng, a);
        for (std::size_t j = 0; j < lattice.rows; ++j) {
            fill_polygon(label.image, cell_quad(lattice, 0, j), j % 2 == 0 ? a : b);
        }
        break;
    }
    }

    label.junctions = std::move(g.junctions);
    label.segments = std::move(g.segments);
    label.structure = std::move(g.structure);
    return label;
}

TensorMap rasterize_heatmap(std::span<const LineSegment> segments, std::size_t height, std::size_t width,
                            double thickness)
{
    if (!(thickness >= 1.0)) {
        throw InvalidArgument("heatmap thickness must be >= 1");
    }
    TensorMap out(height, width, 1);
    if (height == 0 || width == 0) {
        return out;
    }
    const double r = 0.5 * thickness;
    for (const auto& s : segments) {
        const double minx = std::max(0.0, std::ceil(std::min(s.e1.x, s.e2.x) - r));
        const double maxx = std::min(static_cast<double>(width - 1), std::floor(std::max(s.e1.x, s.e2.x) + r));
        const double miny = std::max(0.0, std::ceil(std::min(s.e1.y, s.e2.y) - r));
        const double maxy = std::min(static_cast<double>(height - 1), std::floor(std::max(s.e1.y, s.e2.y) + r));
        if (!(minx <= maxx && miny <= maxy)) {
            continue;
        }
        for (auto y = static_cast<std::size_t>(miny); y <= static_cast<std::size_t>(maxy); ++y) {
            for (auto x = static_cast<std::size_t>(minx); x <= static_cast<std::size_t>(maxx); ++x) {
                if (point_segment_distance({static_cast<double>(x), static_cast<double>(y)}, s) <= r) {
                    out.at(y, x) = 1.0f;
                }
            }
        }
    }
    return out;
}

TensorMap splat_junctions(std::span<const Point2> junctions, std::size_t height, std::size_t width)
{
    TensorMap out(height, width, 1);
    for (const auto& p : junctions) {
        const double fx = std::floor(p.x);
        const double fy = std::floor(p.y);
        const double ax = p.x - fx;
        const double ay = p.y - fy;
        for (int dy = 0; dy <= 1; ++dy) {
            for (int dx = 0; dx <= 1; ++dx) {
                const double x = fx + dx;
                const double y = fy + dy;
                if (x < 0 || y < 0 || x > static_cast<double>(width - 1) || y > static_cast<double>(height - 1)) {
                    continue;
                }
                const double weight = (dx != 0 ? ax : 1.0 - ax) * (dy != 0 ? ay : 1.0 - ay);
                float& cell = out.at(static_cast<std::size_t>(y), static_cast<std::size_t>(x));
                cell = std::max(cell, static_cast<float>(weight));
            }
        }
    }
    return out;
}

std::vector<float> positional_code(Point2 canonical)
{
    struct Bank {
        std::array<double, kCodePairs> fx{};
        std::array<double, kCodePairs> fy{};
        Bank()
        {
            Rng rng(kDescriptorBankSeed);
            std::normal_distribution<double> n(0.0, kDescriptorBandwidth);
            for (std::size_t k = 0; k < kCodePairs; ++k) {
                fx[k] = n(rng);
                fy[k] = n(rng);
            }
        }
    };
    static const Bank bank;
    const double scale = 1.0 / std::sqrt(static_cast<double>(kCodePairs));
    std::vector<float> code(kDescriptorDim);
    for (std::size_t k = 0; k < kCodePairs; ++k) {
        const double phase = bank.fx[k] * canonical.x + bank.fy[k] * canonical.y;
        code[2 * k] = static_cast<float>(scale * std::cos(phase));
        code[2 * k + 1] = static_cast<float>(scale * std::sin(phase));
    }
    return code;
}

TensorMap oracle_descriptor_map(const Homography& view, std::size_t height, std::size_t width,
                                std::span<const Ellipse> occluders)
{
    const std::size_t dh = height / kDescriptorStride;
    const std::size_t dw = width / kDescriptorStride;
    TensorMap out(dh, dw, kDescriptorDim);
    const Eigen::Matrix3d inv = view.inverse().matrix();
    const double stride = static_cast<double>(kDescriptorStride);
    for (std::size_t y = 0; y < dh; ++y) {
        for (std::size_t x = 0; x < dw; ++x) {
            const Point2 at{stride * static_cast<double>(x), stride * static_cast<double>(y)};
            Point2 canonical{};
            const auto hit = std::find_if(occluders.begin(), occluders.end(), [&](const Ellipse& e) { return e.contains(at); });
            if (hit != occluders.end()) {
                const auto k = static_cast<double>(hit - occluders.begin());
                canonical = {kOccluderCodeOffset * (k + 1.0) + at.x, -kOccluderCodeOffset * (k + 1.0) + at.y};
            } else {
                const Eigen::Vector3d p = inv * Eigen::Vector3d(at.x, at.y, 1.0);
                if (std::abs(p(2)) < 1e-12) {
                    continue;
                }
                canonical = {p(0) / p(2), p(1) / p(2)};
            }
            const auto code = positional_code(canonical);
            std::copy(code.begin(), code.end(), out.pixel(y, x).begin());
        }
    }
    l2_normalize_pixels(out);
    return out;
}

OracleMaps oracle_maps(const SceneLabel& label, const Homography& view)
{
    const std::size_t h = label.image.height();
    const std::size_t w = label.image.width();
    std::vector<Point2> junctions;
    junctions.reserve(label.junctions.size());
    for (const auto& p : label.junctions) {
        try {
            junctions.push_back(view.apply(p));
        } catch (const PointAtInfinity&) {
        }
    }
    std::vector<LineSegment> segments;
    segments.reserve(label.segments.size());
    for (const auto& s : label.segments) {
        try {
            segments.push_back(warp_segment(s, view));
        } catch (const PointAtInfinity&) {
        }
    }
    return {splat_junctions(junctions, h, w), rasterize_heatmap(segments, h, w), oracle_descriptor_map(view, h, w)};
}

std::vector<LineSegment> visible_segments(std::span<const LineSegment> segments, const Homography& view,
                                          std::size_t height, std::size_t width, double margin,
                                          std::vector<std::size_t>* kept)
{
    const auto inside = [&](Point2 p) {
        return p.x >= margin && p.y >= margin && p.x <= static_cast<double>(width) - 1.0 - margin &&
               p.y <= static_cast<double>(height) - 1.0 - margin;
    };
    std::vector<LineSegment> out;
    if (kept != nullptr) {
        kept->clear();
    }
    for (std::size_t i = 0; i < segments.size(); ++i) {
        LineSegment s{};
        try {
            s = warp_segment(segments[i], view);
        } catch (const PointAtInfinity&) {
            continue;
        }
        if (inside(s.e1) && inside(s.e2)) {
            out.push_back(s);
            if (kept != nullptr) {
                kept->push_back(i);
            }
        }
    }
    return out;
}

bool Ellipse::contains(Point2 p) const
{
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    const Point2 d = p - center;
    const double u = (c * d.x + s * d.y) / semi_major;
    const double v = (-s * d.x + c * d.y) / semi_minor;
    return u * u + v * v <= 1.0;
}

std::optional<std::pair<double, double>> Ellipse::intersect(const LineSegment& l) const
{
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    const Point2 o = l.e1 - center;
    const Point2 d = l.e2 - l.e1;
    // Ellipse frame, scaled to the unit circle.
    const double ou = (c * o.x + s * o.y) / semi_major;
    const double ov = (-s * o.x + c * o.y) / semi_minor;
    const double du = (c * d.x + s * d.y) / semi_major;
    const double dv = (-s * d.x + c * d.y) / semi_minor;
    const double a = du * du + dv * dv;
    const double b = 2.0 * (ou * du + ov * dv);
    const double cc = ou * ou + ov * ov - 1.0;
    if (a == 0.0) {
        return cc <= 0.0 ? std::optional(std::pair(0.0, 1.0)) : std::nullopt;
    }
    const double disc = b * b - 4.0 * a * cc;
    if (disc < 0.0) {
        return std::nullopt;
    }
    const double root = std::sqrt(disc);
    // Numerically stable pair of roots.
    const double q = -0.5 * (b + std::copysign(root, b));
    double t1 = q / a;
    double t2 = q != 0.0 ? cc / q : t1;
    if (t1 > t2) {
        std::swap(t1, t2);
    }
    return std::pair(t1, t2);
}

namespace {

// Union of the occluded parameter intervals of `l`, clipped to [0, 1], sorted and merged.
std::vector<std::pair<double, double>> hidden_intervals(const LineSegment& l, std::span<const Ellipse> occluders)
{
    std::vector<std::pair<double, double>> spans;
    for (const auto& e : occluders) {
        if (auto iv = e.intersect(l)) {
            const double lo = std::max(0.0, iv->first);
            const double hi = std::min(1.0, iv->second);
            if (hi > lo) {
                spans.emplace_back(lo, hi);
            }
        }
    }
    std::sort(spans.begin(), spans.end());
    std::vector<std::pair<double, double>> merged;
    for (const auto& s : spans) {
        if (!merged.empty() && s.first <= merged.back().second) {
            merged.back().second = std::max(merged.back().second, s.second);
        } else {
            merged.push_back(s);
        }
    }
    return merged;
}

void paint_occluder(TensorMap& img, const Ellipse& e, Rng& rng)
{
    const double base = uniform(rng, 0.1, 0.9);
    const double fx = uniform(rng, 0.2, 0.8);
    const double fy = uniform(rng, 0.2, 0.8);
    const double amp = uniform(rng, 0.05, 0.2);
    const double r = std::max(e.semi_major, e.semi_minor);
    const auto x0 = static_cast<std::size_t>(std::clamp(std::floor(e.center.x - r), 0.0, static_cast<double>(img.width() - 1)));
    const auto x1 = static_cast<std::size_t>(std::clamp(std::ceil(e.center.x + r), 0.0, static_cast<double>(img.width() - 1)));
    const auto y0 = static_cast<std::size_t>(std::clamp(std::floor(e.center.y - r), 0.0, static_cast<double>(img.height() - 1)));
    const auto y1 = static_cast<std::size_t>(std::clamp(std::ceil(e.center.y + r), 0.0, static_cast<double>(img.height() - 1)));
    for (std::size_t y = y0; y <= y1; ++y) {
        for (std::size_t x = x0; x <= x1; ++x) {
            const Point2 p{static_cast<double>(x), static_cast<double>(y)};
            if (e.contains(p)) {
                const double texture = amp * std::sin(fx * p.x) * std::cos(fy * p.y);
                img.at(y, x) = static_cast<float>(std::clamp(base + texture, 0.0, 1.0));
            }
        }
    }
}

} // namespace

double covered_fraction(std::span<const LineSegment> segments, std::span<const Ellipse> occluders)
{
    double total = 0.0;
    double hidden = 0.0;
    for (const auto& s : segments) {
        const double len = s.length();
        total += len;
        for (const auto& [lo, hi] : hidden_intervals(s, occluders)) {
            hidden += (hi - lo) * len;
        }
    }
    return total > 0.0 ? hidden / total : 0.0;
}

SceneLabel apply_occluders(const SceneLabel& label, std::span<const Ellipse> occluders, std::uint64_t texture_seed,
                           std::vector<std::size_t>* parents)
{
    if (parents != nullptr) {
        parents->clear();
    }
    if (occluders.empty()) {
        if (parents != nullptr) {
            for (std::size_t k = 0; k < label.segments.size(); ++k) {
                parents->push_back(k);
            }
        }
        return label;
    }
    SceneLabel out;
    out.image = label.image;
    out.structure = label.structure;
    Rng rng(texture_seed);
    for (const auto& e : occluders) {
        paint_occluder(out.image, e, rng);
    }
    for (std::size_t index = 0; index < label.segments.size(); ++index) {
        const LineSegment& s = label.segments[index];
        // Longest visible parameter interval.
        double best_lo = 0.0;
        double best_hi = 0.0;
        double cursor = 0.0;
        for (const auto& [lo, hi] : hidden_intervals(s, occluders)) {
            if (lo - cursor > best_hi - best_lo) {
                best_lo = cursor, best_hi = lo;
            }
            cursor = hi;
        }
        if (1.0 - cursor > best_hi - best_lo) {
            best_lo = cursor, best_hi = 1.0;
        }
        if ((best_hi - best_lo) * s.length() < kMinVisibleLength) {
            continue;
        }
        const Point2 d = s.e2 - s.e1;
        const Point2 a = best_lo == 0.0 ? s.e1 : s.e1 + best_lo * d;
        const Point2 b = best_hi == 1.0 ? s.e2 : s.e1 + best_hi * d;
        out.segments.push_back({a, b});
        if (parents != nullptr) {
            parents->push_back(index);
        }
    }
    for (const auto& p : label.junctions) {
        const bool hidden = std::any_of(occluders.begin(), occluders.end(), [&](const Ellipse& e) { return e.contains(p); });
        if (!hidden) {
            out.junctions.push_back(p);
        }
    }
    for (const auto& s : out.segments) {
        for (const Point2 p : {s.e1, s.e2}) {
            if (std::find(out.junctions.begin(), out.junctions.end(), p) == out.junctions.end()) {
                out.junctions.push_back(p);
            }
        }
    }
    return out;
}

SceneLabel synthesize_occlusions(const SceneLabel& label, double fraction, std::uint64_t seed,
                                 std::vector<Ellipse>* placed, std::vector<std::size_t>* parents)
{
    if (!(fraction >= 0.0 && fraction < 1.0)) {
        throw InvalidArgument("occlusion fraction must lie in [0, 1)");
    }
    Rng rng(seed);
    const double w = static_cast<double>(label.image.width());
    const double h = static_cast<double>(label.image.height());
    const double size = std::min(w, h);
    std::vector<Ellipse> occluders;
    while (occluders.size() < kMaxOccluders && covered_fraction(label.segments, occluders) < fraction) {
        Ellipse e;
        e.center = {uniform(rng, 0.0, w - 1.0), uniform(rng, 0.0, h - 1.0)};
        e.semi_major = uniform(rng, 0.05, 0.2) * size;
        e.semi_minor = e.semi_major * uniform(rng, 0.3, 1.0);
        e.angle = uniform(rng, 0.0, kPi);
        occluders.push_back(e);
    }
    if (placed != nullptr) {
        *placed = occluders;
    }
    return apply_occluders(label, occluders, mix_seed(seed, 0x0CC1), parents);
}

} // namespace linekit

#include "linekit/detect.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "linekit/error.hpp"
#include "linekit/parallel.hpp"

namespace linekit {

namespace {

bool lex_less(Point2 a, Point2 b)
{
    return std::tie(a.x, a.y) < std::tie(b.x, b.y);
}

bool segment_lex_less(const LineSegment& a, const LineSegment& b)
{
    return std::tie(a.e1.x, a.e1.y, a.e2.x, a.e2.y) < std::tie(b.e1.x, b.e1.y, b.e2.x, b.e2.y);
}

void require_single_channel(const TensorMap& m, const char* what)
{
    if (m.channels() != 1) {
        throw SizeMismatch(std::string(what) + " must have exactly one channel");
    }
}

double image_diagonal(const TensorMap& m)
{
    return std::hypot(static_cast<double>(m.height()), static_cast<double>(m.width()));
}

} // namespace

void DetectionParams::validate() const
{
    const auto unit = [](double v) { return v > 0.0 && v <= 1.0; };
    if (!unit(junction_threshold) || !unit(xi_avg) || !unit(xi_inlier)) {
        throw InvalidArgument("detection thresholds must lie in (0, 1]");
    }
    if (n_samples < 2) {
        throw InvalidArgument("n_samples must be >= 2");
    }
    if (!(junction_nms_radius > 0) || !(r_min > 0) || !(lambda_radius >= 0) || !(xi_cs > 0)) {
        throw InvalidArgument("detection radii must be positive");
    }
    if (!(min_length >= 0)) {
        throw InvalidArgument("min_length must be >= 0");
    }
}

std::vector<Point2> extract_junctions(const TensorMap& j, const DetectionParams& params)
{
    require_single_channel(j, "junction map");
    const float threshold = static_cast<float>(params.junction_threshold);
    struct Peak {
        float score;
        std::size_t index;
    };
    std::vector<Peak> peaks;
    const auto data = j.data();
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data[i] >= threshold) {
            peaks.push_back({data[i], i});
        }
    }
    std::stable_sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.score > b.score; });

    const std::size_t w = j.width();
    const std::size_t h = j.height();
    const double r = params.junction_nms_radius;
    const auto reach = static_cast<std::ptrdiff_t>(std::floor(r));
    std::vector<std::uint8_t> suppressed(data.size(), 0);
    std::vector<Point2> out;
    for (const auto& p : peaks) {
        if (suppressed[p.index] != 0) {
            continue;
        }
        const auto x = static_cast<std::ptrdiff_t>(p.index % w);
        const auto y = static_cast<std::ptrdiff_t>(p.index / w);
        out.push_back({static_cast<double>(x), static_cast<double>(y)});
        for (std::ptrdiff_t dy = -reach; dy <= reach; ++dy) {
            for (std::ptrdiff_t dx = -reach; dx <= reach; ++dx) {
                const std::ptrdiff_t nx = x + dx;
                const std::ptrdiff_t ny = y + dy;
                if (nx < 0 || ny < 0 || nx >= static_cast<std::ptrdiff_t>(w) || ny >= static_cast<std::ptrdiff_t>(h)) {
                    continue;
                }
                if (static_cast<double>(dx * dx + dy * dy) <= r * r) {
                    suppressed[static_cast<std::size_t>(ny) * w + static_cast<std::size_t>(nx)] = 1;
                }
            }
        }
    }
    return out;
}

std::vector<Point2> sample_line_points(Point2 e1, Point2 e2, std::size_t n)
{
    if (n < 2) {
        throw InvalidArgument("need at least 2 samples per line");
    }
    std::vector<Point2> out(n);
    const Point2 d = e2 - e1;
    const double step = 1.0 / static_cast<double>(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        out[k] = e1 + (static_cast<double>(k) * step) * d;
    }
    out[n - 1] = e2;
    return out;
}

double search_radius(double segment_length, double image_diag, const DetectionParams& params)
{
    if (!(image_diag > 0)) {
        throw InvalidArgument("image diagonal must be positive");
    }
    return params.r_min + params.lambda_radius * segment_length / image_diag;
}

double adaptive_local_max(const TensorMap& h, Point2 q, double segment_length, double image_diag,
                          const DetectionParams& params)
{
    double best = bilinear_sample_channel(h, q); // throws OutOfBounds
    const double r = search_radius(segment_length, image_diag, params);
    const double maxx = static_cast<double>(h.width() - 1);
    const double maxy = static_cast<double>(h.height() - 1);
    const auto x0 = static_cast<std::size_t>(std::clamp(std::ceil(q.x - r), 0.0, maxx));
    const auto x1 = static_cast<std::size_t>(std::clamp(std::floor(q.x + r), 0.0, maxx));
    const auto y0 = static_cast<std::size_t>(std::clamp(std::ceil(q.y - r), 0.0, maxy));
    const auto y1 = static_cast<std::size_t>(std::clamp(std::floor(q.y + r), 0.0, maxy));
    for (std::size_t y = y0; y <= y1; ++y) {
        const double dy = static_cast<double>(y) - q.y;
        for (std::size_t x = x0; x <= x1; ++x) {
            const double dx = static_cast<double>(x) - q.x;
            if (dx * dx + dy * dy <= r * r) {
                best = std::max(best, static_cast<double>(h.at(y, x)));
            }
        }
    }
    return best;
}

std::pair<double, double> score_line(const TensorMap& h, const LineSegment& s, const DetectionParams& params,
                                     ScoreMode mode)
{
    require_single_channel(h, "heatmap");
    const double len = s.length();
    const double diag = image_diagonal(h);
    double sum = 0.0;
    std::size_t inliers = 0;
    for (const Point2 q : sample_line_points(s.e1, s.e2, params.n_samples)) {
        const double v = mode == ScoreMode::local_max ? adaptive_local_max(h, q, len, diag, params)
                                                      : bilinear_sample_channel(h, q);
        sum += v;
        inliers += v >= params.xi_avg ? 1 : 0;
    }
    const double n = static_cast<double>(params.n_samples);
    return {sum / n, static_cast<double>(inliers) / n};
}

std::vector<LineSegment> candidate_selection(std::span<const Point2> junctions,
                                             std::span<const LineSegment> candidates, double xi_cs)
{
    std::vector<LineSegment> out;
    for (const auto& c : candidates) {
        if (!(c.length() > 0.0)) {
            continue;
        }
        const bool blocked = std::any_of(junctions.begin(), junctions.end(), [&](Point2 p) {
            if (p == c.e1 || p == c.e2) {
                return false;
            }
            const double t = projection_parameter(p, c);
            return t > 0.0 && t < 1.0 && point_line_distance(p, c) < xi_cs;
        });
        if (!blocked) {
            out.push_back(c);
        }
    }
    return out;
}

std::vector<LineSegment> enumerate_candidates(std::span<const Point2> junctions)
{
    std::vector<LineSegment> out;
    out.reserve(junctions.size() * (junctions.size() - (junctions.empty() ? 0 : 1)) / 2);
    for (std::size_t a = 0; a < junctions.size(); ++a) {
        for (std::size_t b = a + 1; b < junctions.size(); ++b) {
            Point2 p = junctions[a];
            Point2 q = junctions[b];
            if (p == q) {
                continue;
            }
            if (lex_less(q, p)) {
                std::swap(p, q);
            }
            out.push_back({p, q});
        }
    }
    return out;
}

std::vector<ScoredSegment> detect_segments_from_junctions(std::span<const Point2> junctions, const TensorMap& h,
                                                          const DetectionParams& params)
{
    params.validate();
    require_single_channel(h, "heatmap");
    std::vector<LineSegment> candidates = enumerate_candidates(junctions);
    if (params.use_candidate_selection) {
        candidates = candidate_selection(junctions, candidates, params.xi_cs);
    }
    std::vector<ScoredSegment> scored(candidates.size());
    std::vector<std::uint8_t> keep(candidates.size(), 0);
    parallel_for(candidates.size(), [&](std::size_t i) {
        const auto& c = candidates[i];
        if (c.length() < params.min_length) {
            return;
        }
        const auto [avg, inlier] = score_line(h, c, params, ScoreMode::local_max);
        if (avg >= params.xi_avg && inlier >= params.xi_inlier) {
            scored[i] = {c, avg, inlier};
            keep[i] = 1;
        }
    });
    std::vector<ScoredSegment> out;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (keep[i] != 0) {
            out.push_back(scored[i]);
        }
    }
    std::sort(out.begin(), out.end(), [](const ScoredSegment& a, const ScoredSegment& b) {
        if (a.avg_score != b.avg_score) {
            return a.avg_score > b.avg_score;
        }
        return segment_lex_less(a.segment, b.segment);
    });
    return out;
}

std::vector<ScoredSegment> detect_segments(const TensorMap& j, const TensorMap& h, const DetectionParams& params)
{
    if (!j.same_size(h)) {
        throw SizeMismatch("junction map and heatmap differ in size");
    }
    params.validate();
    return detect_segments_from_junctions(extract_junctions(j, params), h, params);
}

ScoredSegment refine_endpoints(const ScoredSegment& s, const TensorMap& h, const DetectionParams& params)
{
    static constexpr double kStep = 0.25;
    LineSegment current = s.segment;
    for (int which = 0; which < 2; ++which) {
        double best = score_line(h, current, params, ScoreMode::bilinear).first;
        LineSegment best_seg = current;
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0) {
                    continue;
                }
                LineSegment trial = current;
                Point2& e = which == 0 ? trial.e1 : trial.e2;
                e = e + Point2{kStep * dx, kStep * dy};
                if (!in_domain(h, e)) {
                    continue;
                }
                const double v = score_line(h, trial, params, ScoreMode::bilinear).first;
                if (v > best) {
                    best = v;
                    best_seg = trial;
                }
            }
        }
        current = best_seg;
    }
    const auto [avg, inlier] = score_line(h, current, params, ScoreMode::bilinear);
    return {current, avg, inlier};
}

} // namespace linekit

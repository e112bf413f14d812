#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <stdexcept>

#include "linekit/adapt.hpp"
#include "linekit/detect.hpp"
#include "linekit/error.hpp"
#include "linekit/eval.hpp"
#include "linekit/hest.hpp"
#include "linekit/maps.hpp"
#include "linekit/match.hpp"
#include "linekit/synth.hpp"

namespace py = pybind11;
using namespace linekit;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;
using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using Matrix3 = Eigen::Matrix<double, 3, 3, Eigen::RowMajor>;

// (h, w) or (h, w, c) array -> TensorMap.
TensorMap to_map(const FloatArray& a)
{
    if (a.ndim() != 2 && a.ndim() != 3) {
        throw InvalidArgument("expected a 2-D or 3-D array");
    }
    const auto h = static_cast<std::size_t>(a.shape(0));
    const auto w = static_cast<std::size_t>(a.shape(1));
    const auto c = a.ndim() == 3 ? static_cast<std::size_t>(a.shape(2)) : std::size_t{1};
    return TensorMap(h, w, c, std::vector<float>(a.data(), a.data() + a.size()));
}

py::array_t<float> from_map(const TensorMap& m, bool squeeze = true)
{
    std::vector<py::ssize_t> shape{static_cast<py::ssize_t>(m.height()), static_cast<py::ssize_t>(m.width())};
    if (!squeeze || m.channels() != 1) {
        shape.push_back(static_cast<py::ssize_t>(m.channels()));
    }
    py::array_t<float> out(shape);
    std::copy(m.data().begin(), m.data().end(), out.mutable_data());
    return out;
}

std::vector<LineSegment> to_segments(const DoubleArray& a)
{
    if (a.size() == 0) {
        return {};
    }
    if (a.ndim() != 2 || a.shape(1) != 4) {
        throw InvalidArgument("segments must be an (n, 4) array of x1, y1, x2, y2");
    }
    std::vector<LineSegment> out;
    const double* d = a.data();
    for (py::ssize_t k = 0; k < a.shape(0); ++k) {
        out.push_back({{d[4 * k], d[4 * k + 1]}, {d[4 * k + 2], d[4 * k + 3]}});
    }
    return out;
}

py::array_t<double> from_segments(std::span<const LineSegment> s)
{
    py::array_t<double> out({static_cast<py::ssize_t>(s.size()), py::ssize_t{4}});
    double* d = out.mutable_data();
    for (std::size_t k = 0; k < s.size(); ++k) {
        d[4 * k] = s[k].e1.x;
        d[4 * k + 1] = s[k].e1.y;
        d[4 * k + 2] = s[k].e2.x;
        d[4 * k + 3] = s[k].e2.y;
    }
    return out;
}

py::array_t<double> from_points(std::span<const Point2> p)
{
    py::array_t<double> out({static_cast<py::ssize_t>(p.size()), py::ssize_t{2}});
    double* d = out.mutable_data();
    for (std::size_t k = 0; k < p.size(); ++k) {
        d[2 * k] = p[k].x;
        d[2 * k + 1] = p[k].y;
    }
    return out;
}

LineSegment to_segment(const DoubleArray& a)
{
    if (a.size() != 4) {
        throw InvalidArgument("a segment is 4 numbers x1, y1, x2, y2");
    }
    return {{a.data()[0], a.data()[1]}, {a.data()[2], a.data()[3]}};
}

Homography to_h(const Matrix3& m)
{
    return Homography(Eigen::Matrix3d(m));
}

Matrix3 from_h(const Homography& h)
{
    return Matrix3(h.matrix());
}

py::tuple from_scored(const std::vector<ScoredSegment>& s)
{
    std::vector<LineSegment> segs;
    py::array_t<double> scores({static_cast<py::ssize_t>(s.size()), py::ssize_t{2}});
    double* d = scores.mutable_data();
    for (std::size_t k = 0; k < s.size(); ++k) {
        segs.push_back(s[k].segment);
        d[2 * k] = s[k].avg_score;
        d[2 * k + 1] = s[k].inlier_ratio;
    }
    return py::make_tuple(from_segments(segs), scores);
}

py::list from_matches(const LineMatchSet& m)
{
    py::list out;
    for (const auto& x : m.matches) {
        out.append(py::make_tuple(x.i, x.j, x.score));
    }
    return out;
}

LineDistance to_distance(const std::string& name)
{
    const auto d = parse_line_distance(name);
    if (!d) {
        throw InvalidArgument("distance must be structural or orthogonal");
    }
    return *d;
}

SceneKind to_kind(const std::string& name)
{
    const auto k = parse_scene_kind(name);
    if (!k) {
        throw InvalidArgument("unknown scene kind: " + name);
    }
    return *k;
}

} // namespace

PYBIND11_MODULE(_linekit, m)
{
    m.doc() = "Line segment detection, description and matching toolkit";

    static py::exception<Error> base(m, "LinekitError");
    py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
    py::register_exception<SizeMismatch>(m, "SizeMismatch", base.ptr());
    py::register_exception<FormatError>(m, "FormatError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());
    py::register_exception<DegenerateConfiguration>(m, "DegenerateConfiguration", base.ptr());
    py::register_exception<InsufficientData>(m, "InsufficientData", base.ptr());
    py::register_exception<EmptyResult>(m, "EmptyResult", base.ptr());
    py::register_exception<SingularHomography>(m, "SingularHomography", base.ptr());
    py::register_exception<DegenerateSegment>(m, "DegenerateSegment", base.ptr());
    py::register_exception<OutOfBounds>(m, "OutOfBounds", base.ptr());
    py::register_exception<PointAtInfinity>(m, "PointAtInfinity", base.ptr());

    // geometry
    m.def("structural_distance", [](const DoubleArray& a, const DoubleArray& b) {
        return structural_distance(to_segment(a), to_segment(b));
    });
    m.def("orthogonal_distance", [](const DoubleArray& a, const DoubleArray& b) {
        return orthogonal_distance(to_segment(a), to_segment(b));
    });
    m.def("segment_overlap", [](const DoubleArray& a, const DoubleArray& b) {
        return segment_overlap(to_segment(a), to_segment(b));
    });
    m.def("canonical_homography", [](const Matrix3& h) { return from_h(to_h(h)); });
    m.def("warp_segments", [](const DoubleArray& s, const Matrix3& h) {
        return from_segments(warp_segments(to_segments(s), to_h(h)));
    });

    // maps
    m.def("read_map", [](const std::string& path) { return from_map(read_map(path), false); });
    m.def("write_map", [](const FloatArray& a, const std::string& path) { write_map(to_map(a), path); });
    m.def("warp_map", [](const FloatArray& a, const Matrix3& h, std::size_t out_h, std::size_t out_w) {
        const TensorMap src = to_map(a);
        auto [warped, mask] = warp_map(src, to_h(h), out_h, out_w);
        py::array_t<bool> valid({static_cast<py::ssize_t>(out_h), static_cast<py::ssize_t>(out_w)});
        std::copy(mask.data.begin(), mask.data.end(), valid.mutable_data());
        return py::make_tuple(from_map(warped, a.ndim() == 2), valid);
    });

    // synthetic scenes
    py::class_<SceneLabel>(m, "Scene")
        .def_property_readonly("image", [](const SceneLabel& s) { return from_map(s.image); })
        .def_property_readonly("segments", [](const SceneLabel& s) { return from_segments(s.segments); })
        .def_property_readonly("junctions", [](const SceneLabel& s) { return from_points(s.junctions); })
        .def_readonly("structure", &SceneLabel::structure)
        .def(
            "oracle_maps",
            [](const SceneLabel& s, const Matrix3& view) {
                const OracleMaps o = oracle_maps(s, to_h(view));
                return py::make_tuple(from_map(o.junctions), from_map(o.heatmap), from_map(o.descriptors, false));
            },
            py::arg("view") = Matrix3::Identity())
        .def(
            "occluded",
            [](const SceneLabel& s, double fraction, std::uint64_t seed) {
                std::vector<std::size_t> parents;
                SceneLabel out = synthesize_occlusions(s, fraction, seed, nullptr, &parents);
                return py::make_tuple(out, parents);
            },
            py::arg("fraction"), py::arg("seed"));
    m.def(
        "render_scene",
        [](const std::string& kind, std::uint64_t seed, std::size_t height, std::size_t width) {
            return render_scene(to_kind(kind), seed, height, width);
        },
        py::arg("kind"), py::arg("seed"), py::arg("height"), py::arg("width"));
    m.def(
        "sample_homography",
        [](std::uint64_t seed, std::size_t height, std::size_t width, double scale_sigma, double rotation_range_deg,
           bool translation, double perspective) {
            const HomographyConfig cfg{scale_sigma, rotation_range_deg, translation, perspective};
            return from_h(sample_homography(seed, cfg, height, width));
        },
        py::arg("seed"), py::arg("height"), py::arg("width"), py::arg("scale_sigma") = 0.1,
        py::arg("rotation_range_deg") = 90.0, py::arg("translation") = true, py::arg("perspective") = 0.2);
    m.def("oracle_descriptor_map", [](const Matrix3& view, std::size_t height, std::size_t width) {
        return from_map(oracle_descriptor_map(to_h(view), height, width), false);
    });

    // detection
    py::class_<DetectionParams>(m, "DetectionParams")
        .def(py::init<>())
        .def_readwrite("junction_threshold", &DetectionParams::junction_threshold)
        .def_readwrite("junction_nms_radius", &DetectionParams::junction_nms_radius)
        .def_readwrite("n_samples", &DetectionParams::n_samples)
        .def_readwrite("xi_avg", &DetectionParams::xi_avg)
        .def_readwrite("xi_inlier", &DetectionParams::xi_inlier)
        .def_readwrite("lambda_radius", &DetectionParams::lambda_radius)
        .def_readwrite("r_min", &DetectionParams::r_min)
        .def_readwrite("use_candidate_selection", &DetectionParams::use_candidate_selection)
        .def_readwrite("xi_cs", &DetectionParams::xi_cs)
        .def_readwrite("min_length", &DetectionParams::min_length);
    m.def("extract_junctions", [](const FloatArray& j, const DetectionParams& p) {
        return from_points(extract_junctions(to_map(j), p));
    });
    m.def(
        "detect_segments",
        [](const FloatArray& j, const FloatArray& h, const DetectionParams& p, bool refine) {
            const TensorMap hm = to_map(h);
            auto out = detect_segments(to_map(j), hm, p);
            if (refine) {
                for (auto& s : out) {
                    s = refine_endpoints(s, hm, p);
                }
            }
            return from_scored(out);
        },
        py::arg("junctions"), py::arg("heatmap"), py::arg("params") = DetectionParams{}, py::arg("refine") = false);

    // adaptation
    m.def(
        "adapt_oracle",
        [](const SceneLabel& scene, std::size_t n_homographies, std::uint64_t seed, const DetectionParams& p) {
            AdaptationParams a;
            a.n_homographies = n_homographies;
            a.seed = seed;
            a.detection = p;
            return from_scored(generate_pseudo_labels(oracle_predictor(scene), scene.image, a));
        },
        py::arg("scene"), py::arg("n_homographies") = 100, py::arg("seed") = 0,
        py::arg("params") = DetectionParams{});

    // matching
    py::class_<MatchParams>(m, "MatchParams")
        .def(py::init<>())
        .def_readwrite("max_samples", &MatchParams::max_samples)
        .def_readwrite("min_spacing", &MatchParams::min_spacing)
        .def_readwrite("gap", &MatchParams::gap)
        .def_readwrite("top_k_prefilter", &MatchParams::top_k_prefilter)
        .def_readwrite("mutual_check", &MatchParams::mutual_check);
    m.def(
        "nw_best_score",
        [](const Eigen::MatrixXd& d1, const Eigen::MatrixXd& d2, double gap) {
            NwResult r = nw_best_score(d1, d2, gap);
            return py::make_tuple(r.score, r.matrix);
        },
        py::arg("d1"), py::arg("d2"), py::arg("gap") = 0.1);
    m.def(
        "match_lines",
        [](const DoubleArray& l1, const DoubleArray& l2, const FloatArray& d1, const FloatArray& d2,
           const MatchParams& p, const std::string& matcher) {
            const auto a = to_segments(l1);
            const auto b = to_segments(l2);
            const TensorMap m1 = to_map(d1);
            const TensorMap m2 = to_map(d2);
            if (matcher == "nw") {
                return from_matches(match_lines(a, b, m1, m2, p));
            }
            BaselineStrategy s{};
            if (matcher == "average") {
                s = BaselineStrategy::average_descriptor;
            } else if (matcher == "nn") {
                s = BaselineStrategy::nn_average;
            } else if (matcher == "endpoint") {
                s = BaselineStrategy::endpoint_only;
            } else {
                throw InvalidArgument("matcher must be nw, average, nn or endpoint");
            }
            return from_matches(match_lines_baseline(s, a, b, m1, m2, p));
        },
        py::arg("lines1"), py::arg("lines2"), py::arg("desc1"), py::arg("desc2"), py::arg("params") = MatchParams{},
        py::arg("matcher") = "nw");

    // evaluation
    m.def(
        "repeatability",
        [](const DoubleArray& l1, const DoubleArray& l2, const Matrix3& h, double epsilon, const std::string& d) {
            return repeatability({to_segments(l1), to_segments(l2), to_h(h), epsilon, to_distance(d)});
        },
        py::arg("lines1"), py::arg("lines2"), py::arg("h"), py::arg("epsilon") = 5.0,
        py::arg("distance") = "structural");
    m.def(
        "localization_error",
        [](const DoubleArray& l1, const DoubleArray& l2, const Matrix3& h, double epsilon, const std::string& d) {
            return localization_error({to_segments(l1), to_segments(l2), to_h(h), epsilon, to_distance(d)});
        },
        py::arg("lines1"), py::arg("lines2"), py::arg("h"), py::arg("epsilon") = 5.0,
        py::arg("distance") = "structural");
    m.def(
        "gt_correspondences",
        [](const DoubleArray& l1, const DoubleArray& l2, const Matrix3& h, double epsilon, const std::string& d) {
            return gt_correspondences({to_segments(l1), to_segments(l2), to_h(h), epsilon, to_distance(d)});
        },
        py::arg("lines1"), py::arg("lines2"), py::arg("h"), py::arg("epsilon") = 5.0,
        py::arg("distance") = "structural");

    // homography estimation
    m.def(
        "ransac_homography",
        [](const DoubleArray& l1, const DoubleArray& l2, double threshold, double confidence,
           std::size_t max_iterations, std::uint64_t seed) {
            const auto a = to_segments(l1);
            const auto b = to_segments(l2);
            if (a.size() != b.size()) {
                throw SizeMismatch("both segment arrays need one row per match");
            }
            std::vector<SegmentPair> pairs;
            for (std::size_t k = 0; k < a.size(); ++k) {
                pairs.emplace_back(a[k], b[k]);
            }
            RansacParams p;
            p.inlier_threshold = threshold;
            p.confidence = confidence;
            p.max_iterations = max_iterations;
            p.seed = seed;
            const RansacResult r = ransac_homography(pairs, p);
            return py::make_tuple(from_h(r.h), r.inliers);
        },
        py::arg("lines1"), py::arg("lines2"), py::arg("threshold") = 5.0, py::arg("confidence") = 0.9999,
        py::arg("max_iterations") = 1'000'000, py::arg("seed") = 0);
    m.def(
        "corner_accuracy",
        [](const Matrix3& est, const Matrix3& gt, std::size_t w, std::size_t h) {
            const CornerAccuracy c = corner_accuracy(to_h(est), to_h(gt), w, h);
            return py::make_tuple(c.mean_error, c.correct);
        },
        py::arg("h_est"), py::arg("h_gt"), py::arg("width"), py::arg("height"));
}

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "linekit/eval.hpp"
#include "linekit/match.hpp"
#include "linekit/synth.hpp"

namespace linekit::bench {

// Pinned acceptance thresholds.
inline constexpr double kNwTolerance = 1e-9;
inline constexpr double kNwMaxSeconds = 10.0;
inline constexpr double kDetectMinRep = 0.95;
inline constexpr double kDetectMaxLe = 1.0;
inline constexpr double kDetectMinPrecision = 0.95;
inline constexpr double kDetectMaxSeconds = 120.0;
inline constexpr double kMatchMinAccuracy = 0.95;
inline constexpr double kMatchOcclusion = 0.5;
inline constexpr std::size_t kMatchImageSize = 512;
inline constexpr double kMatchMaxSeconds = 180.0;
inline constexpr double kAdaptMinRep = 0.90;
inline constexpr double kRansacMaxMeanError = 1.0;
inline constexpr std::size_t kRansacMinSubPixel = 95;
inline constexpr std::size_t kRansacMinCorrect = 99;
inline constexpr double kRansacMaxSeconds = 60.0;
inline constexpr double kFixtureTolerance = 1e-9;
inline constexpr double kEvalEpsilon = 5.0;

struct Options {
    double scale = 1.0; // fraction of the full trial counts (>= 1 trial each)
    std::uint64_t seed = 0;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

CriterionResult nw_oracle_equivalence(const Options& opt);
CriterionResult detector_recovery(const Options& opt);
CriterionResult matching_end_to_end(const Options& opt);
CriterionResult adaptation_consistency(const Options& opt);
CriterionResult line_ransac(const Options& opt);
CriterionResult metric_fixtures(const Options& opt);
CriterionResult format_round_trips(const Options& opt);
CriterionResult parameter_defaults(const Options& opt);

std::vector<CriterionResult> run_all(const Options& opt);

/// "[PASS] C1 name: detail (1.23 s)"
std::string format_line(const CriterionResult& r);

/// A canonical scene and a warped view with one-to-one ground-truth lines.
struct ScenePair {
    SceneLabel scene;
    Homography view;
    std::vector<LineSegment> lines1;       // canonical frame
    std::vector<LineSegment> lines2;       // view frame, same order as lines1
    std::vector<std::size_t> source_index; // scene segment index of each line
};

/// Keeps the scene segments that stay entirely inside the view (4 px margin).
ScenePair make_scene_pair(SceneKind kind, std::uint64_t seed, std::size_t size, const HomographyConfig& cfg);

namespace detail {

/// Exhaustive maximum over every prefix pair and every monotone alignment inside it.
double nw_enumerate(const DescriptorSequence& d1, const DescriptorSequence& d2, double gap);

} // namespace detail

} // namespace linekit::bench

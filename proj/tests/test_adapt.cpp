#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "linekit/adapt.hpp"
#include "linekit/error.hpp"
#include "linekit/eval.hpp"

using namespace linekit;

namespace {

std::vector<LineSegment> plain(const std::vector<ScoredSegment>& s)
{
    std::vector<LineSegment> out;
    for (const auto& x : s) {
        out.push_back(x.segment);
    }
    return out;
}

double max_abs_diff(const TensorMap& a, const TensorMap& b)
{
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        d = std::max(d, std::abs(double(a.data()[k]) - double(b.data()[k])));
    }
    return d;
}

double rep_against_gt(const std::vector<ScoredSegment>& found, const SceneLabel& label)
{
    if (found.empty()) {
        return 0.0;
    }
    EvalPair p;
    p.segments1 = plain(found);
    p.segments2 = label.segments;
    return repeatability(p);
}

} // namespace

TEST_CASE("adaptation homographies start with the identity")
{
    AdaptationParams p;
    p.n_homographies = 7;
    p.seed = 3;
    const auto hs = adaptation_homographies(p, 100, 120);
    REQUIRE(hs.size() == 7);
    CHECK(hs[0].row_major() == Homography::identity().row_major());
    CHECK(hs[1].row_major() != hs[2].row_major());
    CHECK(adaptation_homographies(p, 100, 120)[4].row_major() == hs[4].row_major());
    p.n_homographies = 0;
    CHECK_THROWS_AS(adaptation_homographies(p, 100, 120), InvalidArgument);
}

TEST_CASE("single identity view reproduces the direct prediction")
{
    const auto label = render_scene(SceneKind::star, 9, 96, 96);
    const auto predictor = oracle_predictor(label);
    const auto direct = predictor(label.image, 0, Homography::identity());

    AdaptationParams p;
    p.n_homographies = 1;
    const auto agg = aggregate_maps(predictor, label.image, p);
    // the canonical identity is scaled, so the warp may round in the last bits
    CHECK(max_abs_diff(agg.junctions, direct.first) < 1e-6);
    CHECK(max_abs_diff(agg.heatmap, direct.second) < 1e-6);

    const std::vector<Homography> same(5, Homography::identity());
    const auto five = aggregate_maps(predictor, label.image, same);
    CHECK(max_abs_diff(five.heatmap, direct.second) < 1e-6);
    CHECK(max_abs_diff(five.junctions, direct.first) < 1e-6);
    CHECK(std::all_of(five.coverage.begin(), five.coverage.end(), [](auto c) { return c == 5; }));

    const auto labels = generate_pseudo_labels(predictor, label.image, p);
    CHECK(labels == detect_segments(direct.first, direct.second, p.detection));
}

TEST_CASE("constant predictions stay constant wherever covered")
{
    const TensorMap image(64, 80, 1, 0.3f);
    const Predictor constant = [](const TensorMap& img, std::size_t, const Homography&) {
        return std::pair{TensorMap(img.height(), img.width(), 1, 0.5f), TensorMap(img.height(), img.width(), 1, 0.5f)};
    };
    AdaptationParams p;
    p.n_homographies = 12;
    const auto agg = aggregate_maps(constant, image, p);
    for (std::size_t k = 0; k < agg.heatmap.size(); ++k) {
        REQUIRE(agg.coverage[k] >= 1);
        CHECK(agg.heatmap.data()[k] == doctest::Approx(0.5).epsilon(1e-6));
    }
    // some pixel is outside at least one warped view
    CHECK(std::any_of(agg.coverage.begin(), agg.coverage.end(), [](auto c) { return c < 12; }));
}

TEST_CASE("aggregation is order insensitive and bounded")
{
    const auto label = render_scene(SceneKind::checkerboard, 4, 96, 96);
    const auto predictor = noisy_oracle_predictor(label, 0.2, 8);
    AdaptationParams p;
    p.n_homographies = 9;
    p.seed = 77;
    auto views = adaptation_homographies(p, 96, 96);
    const auto clean = oracle_predictor(label);
    const auto a = aggregate_maps(clean, label.image, views);
    std::mt19937_64 rng(1);
    std::shuffle(views.begin(), views.end(), rng);
    const auto b = aggregate_maps(clean, label.image, views);
    CHECK(max_abs_diff(a.heatmap, b.heatmap) < 1e-6);
    CHECK(max_abs_diff(a.junctions, b.junctions) < 1e-6);

    const auto n = aggregate_maps(predictor, label.image, views);
    for (const float v : n.heatmap.data()) {
        CHECK((v >= 0.0f && v <= 1.0f));
    }
}

TEST_CASE("empty predictions give no pseudo labels")
{
    const TensorMap image(64, 64, 1, 0.5f);
    const Predictor zero = [](const TensorMap& img, std::size_t, const Homography&) {
        return std::pair{TensorMap(img.height(), img.width(), 1), TensorMap(img.height(), img.width(), 1)};
    };
    AdaptationParams p;
    p.n_homographies = 4;
    CHECK(generate_pseudo_labels(zero, image, p).empty());

    const Predictor wrong = [](const TensorMap&, std::size_t, const Homography&) {
        return std::pair{TensorMap(10, 10, 1), TensorMap(10, 10, 1)};
    };
    CHECK_THROWS_AS(aggregate_maps(wrong, image, p), SizeMismatch);
    CHECK_THROWS_AS(aggregate_maps(zero, image, std::span<const Homography>{}), InvalidArgument);
}

TEST_CASE("precomputed predictor")
{
    const TensorMap image(64, 64, 1);
    std::vector<std::pair<TensorMap, TensorMap>> maps;
    for (int k = 0; k < 3; ++k) {
        maps.emplace_back(TensorMap(64, 64, 1, 0.1f * float(k)), TensorMap(64, 64, 1, 0.2f * float(k)));
    }
    const auto predictor = precomputed_predictor(maps);
    CHECK(predictor(image, 2, Homography::identity()).second == maps[2].second);
    CHECK_THROWS_AS(predictor(image, 3, Homography::identity()), InvalidArgument);

    // identity views: the per-pixel mean of the three maps
    const std::vector<Homography> views(3, Homography::identity());
    const auto agg = aggregate_maps(predictor, image, views);
    CHECK(agg.heatmap.at(10, 10) == doctest::Approx(0.2).epsilon(1e-6));
    CHECK(agg.junctions.at(10, 10) == doctest::Approx(0.1).epsilon(1e-6));
}

TEST_CASE("oracle adaptation recovers the scene")
{
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const auto label = render_scene(kAllSceneKinds[seed], 900 + seed, 128, 128);
        AdaptationParams p;
        p.n_homographies = 20;
        p.seed = seed;
        p.detection.use_candidate_selection = true;
        const auto labels = generate_pseudo_labels(oracle_predictor(label), label.image, p);
        CHECK(rep_against_gt(labels, label) >= 0.9);
    }
}

TEST_CASE("more views do not hurt a noisy oracle")
{
    double rep1 = 0.0;
    double rep10 = 0.0;
    double rep50 = 0.0;
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const auto label = render_scene(kAllSceneKinds[seed], 1200 + seed, 128, 128);
        const auto predictor = noisy_oracle_predictor(label, 0.3, seed);
        AdaptationParams p;
        p.seed = seed;
        p.detection.use_candidate_selection = true;
        for (auto [n, acc] : {std::pair{1, &rep1}, std::pair{10, &rep10}, std::pair{50, &rep50}}) {
            p.n_homographies = std::size_t(n);
            *acc += rep_against_gt(generate_pseudo_labels(predictor, label.image, p), label);
        }
    }
    CHECK(rep10 >= rep1);
    CHECK(rep50 >= rep10);
}

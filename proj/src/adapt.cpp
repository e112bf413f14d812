#include "linekit/adapt.hpp"

#include <algorithm>
#include <array>
#include <memory>
#include <random>

#include "linekit/error.hpp"
#include "linekit/parallel.hpp"

namespace linekit {

namespace {

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

void check_prediction(const TensorMap& m, const TensorMap& image, const char* what)
{
    if (!m.same_size(image) || m.channels() != 1) {
        throw SizeMismatch(std::string("predicted ") + what + " must be a single-channel map of the image size");
    }
}

} // namespace

void AdaptationParams::validate() const
{
    if (n_homographies < 1) {
        throw InvalidArgument("n_homographies must be >= 1");
    }
    detection.validate();
}

std::vector<Homography> adaptation_homographies(const AdaptationParams& params, std::size_t height, std::size_t width)
{
    params.validate();
    std::vector<Homography> out;
    out.reserve(params.n_homographies);
    out.push_back(Homography::identity());
    for (std::size_t i = 1; i < params.n_homographies; ++i) {
        out.push_back(sample_homography(stream_seed(params.seed, i), params.homography_config, height, width));
    }
    return out;
}

AggregatedMaps aggregate_maps(const Predictor& predictor, const TensorMap& image, std::span<const Homography> views)
{
    if (views.empty()) {
        throw InvalidArgument("need at least one homography");
    }
    const std::size_t h = image.height();
    const std::size_t w = image.width();
    std::vector<double> sum_j(h * w, 0.0);
    std::vector<double> sum_h(h * w, 0.0);
    std::vector<std::uint32_t> coverage(h * w, 0);

    struct Unwarped {
        TensorMap j;
        TensorMap h;
        ValidMask mask;
    };
    // Views are predicted in parallel batches and reduced in index order.
    const std::size_t batch = std::max<std::size_t>(1, thread_count());
    for (std::size_t start = 0; start < views.size(); start += batch) {
        const std::size_t count = std::min(batch, views.size() - start);
        std::vector<Unwarped> results(count);
        parallel_for(count, [&](std::size_t k) {
            const std::size_t i = start + k;
            const Homography& view = views[i];
            const TensorMap warped = warp_map(image, view, h, w).first;
            auto [pj, ph] = predictor(warped, i, view);
            check_prediction(pj, image, "junction map");
            check_prediction(ph, image, "heatmap");
            const Homography back = view.inverse();
            auto [uj, mask] = warp_map(pj, back, h, w);
            auto uh = warp_map(ph, back, h, w).first;
            results[k] = {std::move(uj), std::move(uh), std::move(mask)};
        });
        for (const auto& r : results) {
            const auto dj = r.j.data();
            const auto dh = r.h.data();
            for (std::size_t p = 0; p < h * w; ++p) {
                if (r.mask.data[p] != 0) {
                    sum_j[p] += dj[p];
                    sum_h[p] += dh[p];
                    ++coverage[p];
                }
            }
        }
    }

    AggregatedMaps out{TensorMap(h, w, 1), TensorMap(h, w, 1), std::move(coverage)};
    auto oj = out.junctions.data();
    auto oh = out.heatmap.data();
    for (std::size_t p = 0; p < h * w; ++p) {
        if (out.coverage[p] > 0) {
            const double n = out.coverage[p];
            oj[p] = static_cast<float>(std::clamp(sum_j[p] / n, 0.0, 1.0));
            oh[p] = static_cast<float>(std::clamp(sum_h[p] / n, 0.0, 1.0));
        }
    }
    return out;
}

AggregatedMaps aggregate_maps(const Predictor& predictor, const TensorMap& image, const AdaptationParams& params)
{
    const auto views = adaptation_homographies(params, image.height(), image.width());
    return aggregate_maps(predictor, image, views);
}

std::vector<ScoredSegment> generate_pseudo_labels(const Predictor& predictor, const TensorMap& image,
                                                  const AdaptationParams& params)
{
    const auto maps = aggregate_maps(predictor, image, params);
    return detect_segments(maps.junctions, maps.heatmap, params.detection);
}

Predictor oracle_predictor(const SceneLabel& label)
{
    auto shared = std::make_shared<const SceneLabel>(label);
    return [shared](const TensorMap&, std::size_t, const Homography& view) {
        std::vector<Point2> junctions;
        for (const auto& p : shared->junctions) {
            try {
                junctions.push_back(view.apply(p));
            } catch (const PointAtInfinity&) {
            }
        }
        std::vector<LineSegment> segments;
        for (const auto& s : shared->segments) {
            try {
                segments.push_back(warp_segment(s, view));
            } catch (const PointAtInfinity&) {
            }
        }
        const std::size_t h = shared->image.height();
        const std::size_t w = shared->image.width();
        return std::pair{splat_junctions(junctions, h, w), rasterize_heatmap(segments, h, w)};
    };
}

Predictor noisy_oracle_predictor(const SceneLabel& label, double amplitude, std::uint64_t seed)
{
    if (!(amplitude >= 0.0)) {
        throw InvalidArgument("noise amplitude must be >= 0");
    }
    Predictor clean = oracle_predictor(label);
    return [clean, amplitude, seed](const TensorMap& image, std::size_t index, const Homography& view) {
        auto maps = clean(image, index, view);
        std::mt19937_64 rng(stream_seed(seed, index));
        std::uniform_real_distribution<double> noise(-amplitude, amplitude);
        for (float& v : maps.second.data()) {
            v = static_cast<float>(std::clamp(static_cast<double>(v) + noise(rng), 0.0, 1.0));
        }
        return maps;
    };
}

Predictor precomputed_predictor(std::vector<std::pair<TensorMap, TensorMap>> maps)
{
    auto shared = std::make_shared<const std::vector<std::pair<TensorMap, TensorMap>>>(std::move(maps));
    return [shared](const TensorMap&, std::size_t index, const Homography&) {
        if (index >= shared->size()) {
            throw InvalidArgument("no precomputed maps for homography index " + std::to_string(index));
        }
        return (*shared)[index];
    };
}

} // namespace linekit

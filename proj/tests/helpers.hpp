#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "linekit/geom.hpp"

namespace testutil {

inline linekit::Point2 random_point(std::mt19937_64& rng, double lo = -100.0, double hi = 100.0)
{
    std::uniform_real_distribution<double> u(lo, hi);
    return {u(rng), u(rng)};
}

inline linekit::LineSegment random_segment(std::mt19937_64& rng, double lo = -100.0, double hi = 100.0)
{
    for (;;) {
        const linekit::LineSegment s{random_point(rng, lo, hi), random_point(rng, lo, hi)};
        if (s.length() > 1.0) {
            return s;
        }
    }
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / ("linekit_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace testutil

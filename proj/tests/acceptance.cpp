#include <cstdlib>
#include <iostream>
#include <string>

#include "linekit/bench.hpp"

// One line per criterion; nonzero exit when any fails.
// Optional argument: fraction of the full trial counts (default 1).
int main(int argc, char** argv)
{
    linekit::bench::Options opt;
    if (argc > 1) {
        char* end = nullptr;
        opt.scale = std::strtod(argv[1], &end);
        if (end == argv[1] || *end != '\0' || !(opt.scale > 0.0)) {
            std::cerr << "usage: " << argv[0] << " [scale in (0, 1]]" << std::endl;
            return 2;
        }
    }
    bool ok = true;
    using Fn = linekit::bench::CriterionResult (*)(const linekit::bench::Options&);
    for (Fn f : {linekit::bench::nw_oracle_equivalence, linekit::bench::detector_recovery,
                 linekit::bench::matching_end_to_end, linekit::bench::adaptation_consistency,
                 linekit::bench::line_ransac, linekit::bench::metric_fixtures, linekit::bench::format_round_trips,
                 linekit::bench::parameter_defaults}) {
        const auto r = f(opt);
        ok = ok && r.passed;
        std::cout << linekit::bench::format_line(r) << std::endl;
    }
    return ok ? EXIT_SUCCESS : EXIT_FAILURE;
}

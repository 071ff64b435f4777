#pragma once

#include <algorithm>
#include <vector>

#include "petrocast/error.hpp"
#include "petrocast/snaive.hpp"

namespace petrocast::detail {

// Sorted, deduplicated, each in (0, 1); empty means the default pair.
inline std::vector<double> normalize_levels(std::vector<double> levels) {
    if (levels.empty())
        return kDefaultLevels;
    for (double l : levels)
        if (!(l > 0.0 && l < 1.0))
            throw Error(ErrorKind::InvalidArgument, "interval levels must lie in (0, 1)");
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    return levels;
}

}  // namespace petrocast::detail

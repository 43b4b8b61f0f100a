#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace texclass {

// Per-dimension min-max scaling learnt from training data.
struct Normalizer {
    std::vector<double> min;
    std::vector<double> max;

    std::size_t dims() const { return min.size(); }
    bool empty() const { return min.empty(); }

    /// (x - min) / (max - min), clamped to [0, 1]; constant dimensions map to 0.5.
    std::vector<double> apply(std::span<const double> x) const;

    bool operator==(const Normalizer&) const = default;
};

}  // namespace texclass

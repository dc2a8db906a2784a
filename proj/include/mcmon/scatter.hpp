#pragma once

#include "mcmon/tensor.hpp"

#include <span>

namespace mcmon {

struct ScalarScatter {
    double between = 0.0;
    double within = 0.0;
    double fisher = 0.0;
};

// Between/within-class scatter of M projected scalars and their Fisher ratio.
// Throws DegenerateError with fewer than two classes or samples, and
// InfiniteSeparationError when the within-class scatter is exactly zero.
ScalarScatter scatter_scalars(std::span<const double> y, std::span<const int> labels);

// Per-mode scatter matrices. Both members are d x d.
struct ScatterPair {
    Matrix between;
    Matrix within;

    Eigen::Index dim() const noexcept { return between.rows(); }
};

// `partials` holds one d-vector per sample as its columns (d x M).
ScatterPair mode_scatters(const Matrix& partials, std::span<const int> labels);

} // namespace mcmon

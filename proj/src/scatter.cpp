#include "mcmon/scatter.hpp"

#include "mcmon/error.hpp"

#include <map>
#include <string>

namespace mcmon {

namespace {

struct ClassStats {
    Vector sum;
    std::size_t count = 0;
};

std::map<int, ClassStats> class_sums(const Matrix& partials, std::span<const int> labels) {
    if (static_cast<std::size_t>(partials.cols()) != labels.size()) {
        throw DimensionError("scatter: " + std::to_string(partials.cols()) + " samples but " +
                             std::to_string(labels.size()) + " labels");
    }
    if (partials.cols() < 2) {
        throw DegenerateError("scatter needs at least two samples");
    }
    std::map<int, ClassStats> stats;
    for (Eigen::Index m = 0; m < partials.cols(); ++m) {
        auto& s = stats[labels[static_cast<std::size_t>(m)]];
        if (s.count == 0) {
            s.sum = Vector::Zero(partials.rows());
        }
        s.sum += partials.col(m);
        ++s.count;
    }
    if (stats.size() < 2) {
        throw DegenerateError("scatter needs at least two classes, got " + std::to_string(stats.size()));
    }
    return stats;
}

} // namespace

ScatterPair mode_scatters(const Matrix& partials, std::span<const int> labels) {
    const auto stats = class_sums(partials, labels);
    const Eigen::Index d = partials.rows();
    const Vector grand = partials.rowwise().mean();

    std::map<int, Vector> means;
    ScatterPair out{Matrix::Zero(d, d), Matrix::Zero(d, d)};
    for (const auto& [id, s] : stats) {
        Vector mean = s.sum / static_cast<double>(s.count);
        const Vector diff = mean - grand;
        out.between.noalias() += static_cast<double>(s.count) * diff * diff.transpose();
        means.emplace(id, std::move(mean));
    }
    Matrix centered(d, partials.cols());
    for (Eigen::Index m = 0; m < partials.cols(); ++m) {
        centered.col(m) = partials.col(m) - means.at(labels[static_cast<std::size_t>(m)]);
    }
    out.within.noalias() = centered * centered.transpose();
    return out;
}

ScalarScatter scatter_scalars(std::span<const double> y, std::span<const int> labels) {
    const Eigen::Map<const Eigen::RowVectorXd> row(y.data(), static_cast<Eigen::Index>(y.size()));
    const auto pair = mode_scatters(Matrix(row), labels);
    ScalarScatter out;
    out.between = pair.between(0, 0);
    out.within = pair.within(0, 0);
    if (out.within == 0.0) {
        throw InfiniteSeparationError("within-class scatter is zero; the Fisher ratio is unbounded");
    }
    out.fisher = out.between / out.within;
    return out;
}

} // namespace mcmon

#pragma once

#include "mcmon/tensor.hpp"
#include "mcmon/umlda.hpp"

#include <vector>

namespace mcmon::detail {

// Training samples with the batch mean removed.
struct CenteredBatch {
    Sample mean;
    std::vector<RowMatrix> data;

    explicit CenteredBatch(const TensorBatch& batch);

    Eigen::Index channels() const { return static_cast<Eigen::Index>(mean.channels()); }
    Eigen::Index points() const { return static_cast<Eigen::Index>(mean.points()); }
    Eigen::Index size() const { return static_cast<Eigen::Index>(data.size()); }

    // d x M matrix whose m-th column contracts sample m against `other`
    // (other has length K for Mode::Channel, length C for Mode::Point).
    Matrix partials(const Vector& other, Mode mode) const;

    // M-vector of scalar projections.
    Vector project(const Vector& channel_vec, const Vector& point_vec) const;
};

Vector initial_vector(Eigen::Index dim, EmpInit init);

// Moore-Penrose inverse of a small symmetric matrix.
Matrix symmetric_pinv(const Matrix& symmetric);

// Sample Pearson correlation of two equal-length vectors (0 if either is constant).
double correlation(const Vector& a, const Vector& b);

} // namespace mcmon::detail

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <vector>

namespace mcmon {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// One multi-channel record: C channels of K points each, stored channel-major.
class Sample {
public:
    Sample() = default;
    explicit Sample(RowMatrix values);
    Sample(std::size_t channels, std::size_t points);

    static Sample from_flat(std::size_t channels, std::size_t points, const std::vector<double>& flat);

    std::size_t channels() const noexcept { return static_cast<std::size_t>(values_.rows()); }
    std::size_t points() const noexcept { return static_cast<std::size_t>(values_.cols()); }
    const RowMatrix& values() const noexcept { return values_; }

    double operator()(std::size_t c, std::size_t k) const { return values_(c, k); }

    bool operator==(const Sample& other) const;

private:
    RowMatrix values_;
};

// M samples sharing one (C, K) shape, with optional class ids 0..n_classes-1.
class TensorBatch {
public:
    TensorBatch() = default;
    explicit TensorBatch(std::vector<Sample> samples, std::optional<std::vector<int>> labels = std::nullopt);

    std::size_t size() const noexcept { return samples_.size(); }
    bool empty() const noexcept { return samples_.empty(); }
    std::size_t channels() const noexcept { return channels_; }
    std::size_t points() const noexcept { return points_; }

    const std::vector<Sample>& samples() const noexcept { return samples_; }
    const Sample& operator[](std::size_t m) const { return samples_[m]; }

    bool has_labels() const noexcept { return labels_.has_value(); }
    const std::vector<int>& labels() const;
    int class_count() const;

    // Sub-batch of all samples carrying the given label.
    TensorBatch with_label(int label) const;

    // Element-wise mean of all samples.
    Sample mean_sample() const;

private:
    std::vector<Sample> samples_;
    std::optional<std::vector<int>> labels_;
    std::size_t channels_ = 0;
    std::size_t points_ = 0;
};

// Elementary multilinear projection: one unit vector per sample mode.
class Emp {
public:
    // Both vectors are renormalized; a zero or non-finite vector is rejected.
    Emp(Vector channel_vec, Vector point_vec);

    // Takes already-normalized vectors verbatim (norms must be 1 to 1e-10).
    static Emp restore(Vector channel_vec, Vector point_vec);

    const Vector& channel_vec() const noexcept { return v1_; }
    const Vector& point_vec() const noexcept { return v2_; }
    std::size_t channels() const noexcept { return static_cast<std::size_t>(v1_.size()); }
    std::size_t points() const noexcept { return static_cast<std::size_t>(v2_.size()); }

private:
    Emp() = default;

    Vector v1_;
    Vector v2_;
};

// Tensor-to-vector projection: an ordered list of EMPs with a common shape.
class Tvp {
public:
    Tvp() = default;
    explicit Tvp(std::vector<Emp> emps);

    std::size_t size() const noexcept { return emps_.size(); }
    const std::vector<Emp>& emps() const noexcept { return emps_; }
    const Emp& operator[](std::size_t l) const { return emps_[l]; }

private:
    std::vector<Emp> emps_;
};

enum class Mode { Channel = 1, Point = 2 };

// Contracts every mode except `mode` against `v`. Mode::Channel returns a
// C-vector (v has length K); Mode::Point returns a K-vector (v has length C).
Vector partial_project(const Sample& sample, const Vector& v, Mode mode);

double emp_project(const Sample& sample, const Emp& emp);

Vector tvp_project(const Sample& sample, const Tvp& tvp);

// Row m is sample m flattened channel-major: (c, k) -> column c*K + k.
Matrix unfold(const TensorBatch& batch);

TensorBatch refold(const Matrix& rows, std::size_t channels, std::size_t points);

// Flattened view of one sample, channel-major.
Vector flatten(const Sample& sample);

} // namespace mcmon

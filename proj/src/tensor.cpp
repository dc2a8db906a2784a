#include "mcmon/tensor.hpp"

#include "mcmon/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <string>

namespace mcmon {

namespace {

std::string shape(std::size_t rows, std::size_t cols) {
    std::ostringstream os;
    os << rows << "x" << cols;
    return os.str();
}

void require_same_shape(const Sample& sample, std::size_t channels, std::size_t points) {
    if (sample.channels() != channels || sample.points() != points) {
        throw DimensionError("shape mismatch: sample is " + shape(sample.channels(), sample.points()) +
                             ", projection expects " + shape(channels, points));
    }
}

Vector normalized(Vector v, const char* which) {
    if (v.size() == 0 || !v.allFinite()) {
        throw InvalidArgument(std::string("EMP ") + which + " vector must be non-empty and finite");
    }
    const double norm = v.norm();
    if (norm == 0.0) {
        throw InvalidArgument(std::string("EMP ") + which + " vector has zero norm");
    }
    return v / norm;
}

} // namespace

Sample::Sample(RowMatrix values) : values_(std::move(values)) {
    if (values_.rows() < 1 || values_.cols() < 1) {
        throw InvalidArgument("sample must have at least one channel and one point");
    }
    if (!values_.allFinite()) {
        throw InvalidArgument("sample contains non-finite values");
    }
}

Sample::Sample(std::size_t channels, std::size_t points)
    : Sample(RowMatrix::Zero(static_cast<Eigen::Index>(channels), static_cast<Eigen::Index>(points))) {}

Sample Sample::from_flat(std::size_t channels, std::size_t points, const std::vector<double>& flat) {
    if (flat.size() != channels * points) {
        throw DimensionError("flat sample has " + std::to_string(flat.size()) + " values, expected " +
                             std::to_string(channels * points));
    }
    RowMatrix values(static_cast<Eigen::Index>(channels), static_cast<Eigen::Index>(points));
    std::copy(flat.begin(), flat.end(), values.data());
    return Sample(std::move(values));
}

bool Sample::operator==(const Sample& other) const {
    return values_.rows() == other.values_.rows() && values_.cols() == other.values_.cols() &&
           values_ == other.values_;
}

TensorBatch::TensorBatch(std::vector<Sample> samples, std::optional<std::vector<int>> labels)
    : samples_(std::move(samples)), labels_(std::move(labels)) {
    if (!samples_.empty()) {
        channels_ = samples_.front().channels();
        points_ = samples_.front().points();
        for (const auto& s : samples_) {
            require_same_shape(s, channels_, points_);
        }
    }
    if (labels_) {
        if (labels_->size() != samples_.size()) {
            throw DimensionError("label count " + std::to_string(labels_->size()) + " does not match sample count " +
                                 std::to_string(samples_.size()));
        }
        std::set<int> ids(labels_->begin(), labels_->end());
        int expected = 0;
        for (int id : ids) {
            if (id != expected++) {
                throw InvalidArgument("class labels must be contiguous ids starting at 0");
            }
        }
    }
}

const std::vector<int>& TensorBatch::labels() const {
    if (!labels_) {
        throw InvalidArgument("batch has no class labels");
    }
    return *labels_;
}

int TensorBatch::class_count() const {
    if (!labels_ || labels_->empty()) {
        return 0;
    }
    return *std::max_element(labels_->begin(), labels_->end()) + 1;
}

TensorBatch TensorBatch::with_label(int label) const {
    const auto& ids = labels();
    std::vector<Sample> picked;
    for (std::size_t m = 0; m < samples_.size(); ++m) {
        if (ids[m] == label) {
            picked.push_back(samples_[m]);
        }
    }
    return TensorBatch(std::move(picked));
}

Sample TensorBatch::mean_sample() const {
    if (samples_.empty()) {
        throw InvalidArgument("mean of an empty batch");
    }
    RowMatrix acc = RowMatrix::Zero(static_cast<Eigen::Index>(channels_), static_cast<Eigen::Index>(points_));
    for (const auto& s : samples_) {
        acc += s.values();
    }
    acc /= static_cast<double>(samples_.size());
    return Sample(std::move(acc));
}

Emp::Emp(Vector channel_vec, Vector point_vec)
    : v1_(normalized(std::move(channel_vec), "channel")), v2_(normalized(std::move(point_vec), "point")) {}

Emp Emp::restore(Vector channel_vec, Vector point_vec) {
    for (const Vector* v : {&channel_vec, &point_vec}) {
        if (v->size() == 0 || !v->allFinite() || std::abs(v->norm() - 1.0) > 1e-10) {
            throw InvalidArgument("stored EMP vector is not unit-norm");
        }
    }
    Emp emp;
    emp.v1_ = std::move(channel_vec);
    emp.v2_ = std::move(point_vec);
    return emp;
}

Tvp::Tvp(std::vector<Emp> emps) : emps_(std::move(emps)) {
    if (emps_.empty()) {
        throw InvalidArgument("a TVP needs at least one EMP");
    }
    for (const auto& e : emps_) {
        if (e.channels() != emps_.front().channels() || e.points() != emps_.front().points()) {
            throw DimensionError("EMPs of a TVP must share one shape");
        }
    }
}

Vector partial_project(const Sample& sample, const Vector& v, Mode mode) {
    const auto expected = mode == Mode::Channel ? sample.points() : sample.channels();
    if (static_cast<std::size_t>(v.size()) != expected) {
        throw DimensionError("partial projection of a " + shape(sample.channels(), sample.points()) +
                             " sample over mode " + std::to_string(static_cast<int>(mode)) +
                             " needs a vector of length " + std::to_string(expected) + ", got " +
                             std::to_string(v.size()));
    }
    if (mode == Mode::Channel) {
        return sample.values() * v;
    }
    return sample.values().transpose() * v;
}

double emp_project(const Sample& sample, const Emp& emp) {
    require_same_shape(sample, emp.channels(), emp.points());
    return emp.channel_vec().dot(sample.values() * emp.point_vec());
}

Vector tvp_project(const Sample& sample, const Tvp& tvp) {
    Vector y(static_cast<Eigen::Index>(tvp.size()));
    for (std::size_t l = 0; l < tvp.size(); ++l) {
        y(static_cast<Eigen::Index>(l)) = emp_project(sample, tvp[l]);
    }
    return y;
}

Vector flatten(const Sample& sample) {
    return Eigen::Map<const Vector>(sample.values().data(), sample.values().size());
}

Matrix unfold(const TensorBatch& batch) {
    if (batch.empty()) {
        throw InvalidArgument("cannot unfold an empty batch");
    }
    const auto width = static_cast<Eigen::Index>(batch.channels() * batch.points());
    Matrix rows(static_cast<Eigen::Index>(batch.size()), width);
    for (std::size_t m = 0; m < batch.size(); ++m) {
        rows.row(static_cast<Eigen::Index>(m)) = flatten(batch[m]).transpose();
    }
    return rows;
}

TensorBatch refold(const Matrix& rows, std::size_t channels, std::size_t points) {
    if (static_cast<std::size_t>(rows.cols()) != channels * points) {
        throw DimensionError("refold: row width " + std::to_string(rows.cols()) + " does not match " +
                             shape(channels, points));
    }
    std::vector<Sample> samples;
    samples.reserve(static_cast<std::size_t>(rows.rows()));
    for (Eigen::Index m = 0; m < rows.rows(); ++m) {
        RowMatrix values(static_cast<Eigen::Index>(channels), static_cast<Eigen::Index>(points));
        Eigen::Map<Vector>(values.data(), values.size()) = rows.row(m).transpose();
        samples.emplace_back(std::move(values));
    }
    return TensorBatch(std::move(samples));
}

} // namespace mcmon

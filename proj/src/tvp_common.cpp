#include "tvp_common.hpp"

#include <cmath>

namespace mcmon::detail {

CenteredBatch::CenteredBatch(const TensorBatch& batch) : mean(batch.mean_sample()) {
    data.reserve(batch.size());
    for (const auto& s : batch.samples()) {
        data.push_back(s.values() - mean.values());
    }
}

Matrix CenteredBatch::partials(const Vector& other, Mode mode) const {
    const Eigen::Index d = mode == Mode::Channel ? channels() : points();
    Matrix out(d, size());
    for (Eigen::Index m = 0; m < size(); ++m) {
        const auto& x = data[static_cast<std::size_t>(m)];
        if (mode == Mode::Channel) {
            out.col(m).noalias() = x * other;
        } else {
            out.col(m).noalias() = x.transpose() * other;
        }
    }
    return out;
}

Vector CenteredBatch::project(const Vector& channel_vec, const Vector& point_vec) const {
    Vector y(size());
    for (Eigen::Index m = 0; m < size(); ++m) {
        y(m) = channel_vec.dot(data[static_cast<std::size_t>(m)] * point_vec);
    }
    return y;
}

Vector initial_vector(Eigen::Index dim, EmpInit init) {
    if (init == EmpInit::PseudoIdentity) {
        return Vector::Unit(dim, 0);
    }
    return Vector::Ones(dim) / std::sqrt(static_cast<double>(dim));
}

Matrix symmetric_pinv(const Matrix& symmetric) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (symmetric + symmetric.transpose()));
    const Vector& w = es.eigenvalues();
    const double cutoff = w.cwiseAbs().maxCoeff() * static_cast<double>(w.size()) * 1e-14;
    Vector inv(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        inv(i) = std::abs(w(i)) > cutoff ? 1.0 / w(i) : 0.0;
    }
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

double correlation(const Vector& a, const Vector& b) {
    const Vector ca = a.array() - a.mean();
    const Vector cb = b.array() - b.mean();
    const double denom = ca.norm() * cb.norm();
    return denom > 0.0 ? ca.dot(cb) / denom : 0.0;
}

} // namespace mcmon::detail

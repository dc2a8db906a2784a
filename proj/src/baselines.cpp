#include "mcmon/baselines.hpp"

#include "linalg.hpp"
#include "mcmon/error.hpp"
#include "tvp_common.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace mcmon {

namespace {

using detail::CenteredBatch;

void require_shape(const Sample& sample, std::size_t channels, std::size_t points, const char* method) {
    if (sample.channels() != channels || sample.points() != points) {
        throw DimensionError(std::string(method) + " model expects " + std::to_string(channels) + "x" +
                             std::to_string(points) + " samples, got " + std::to_string(sample.channels()) + "x" +
                             std::to_string(sample.points()));
    }
}

// Orthogonal projector onto the complement of span(u).
Matrix complement_projector(const Matrix& u) {
    const Eigen::Index d = u.rows();
    if (u.cols() == 0) {
        return Matrix::Identity(d, d);
    }
    Matrix p = Matrix::Identity(d, d) - u * detail::symmetric_pinv(u.transpose() * u) * u.transpose();
    return 0.5 * (p + p.transpose());
}

} // namespace

UmpcaModel umpca_train(const TensorBatch& batch, std::size_t features, const UmpcaParams& params) {
    if (batch.size() < 2) {
        throw InfeasibleError("UMPCA needs at least two samples");
    }
    const std::size_t cap = std::min({batch.channels(), batch.points(), batch.size() - 1});
    if (features < 1 || features > cap) {
        throw InfeasibleError("UMPCA feature count " + std::to_string(features) + " outside [1, " +
                              std::to_string(cap) + "] = [1, min(C, K, M - 1)]");
    }
    if (params.max_iters < 1 || params.tol < 0.0) {
        throw InvalidArgument("UMPCA parameters must satisfy max_iters >= 1, tol >= 0");
    }

    const CenteredBatch data(batch);
    UmpcaModel model;
    model.mean = data.mean;
    std::vector<Emp> emps;
    Matrix previous(data.size(), 0);

    for (std::size_t l = 0; l < features; ++l) {
        Vector v1 = detail::initial_vector(data.channels(), params.init);
        Vector v2 = detail::initial_vector(data.points(), params.init);
        double last = 0.0;
        bool converged = false;
        for (int it = 0; it < params.max_iters; ++it) {
            for (const Mode mode : {Mode::Channel, Mode::Point}) {
                const Vector& other = mode == Mode::Channel ? v2 : v1;
                const Matrix partials = data.partials(other, mode);
                const Matrix proj = complement_projector(partials * previous);
                const Matrix scatter = proj * (partials * partials.transpose()) * proj;
                Vector v = detail::top_eigenpairs(scatter, 1).vectors.col(0);
                (mode == Mode::Channel ? v1 : v2) = std::move(v);
            }
            const double captured = data.project(v1, v2).squaredNorm();
            if (it > 0 && captured - last <= params.tol * std::abs(last)) {
                converged = true;
                break;
            }
            last = captured;
        }
        Emp emp(std::move(v1), std::move(v2));
        Vector h = data.project(emp.channel_vec(), emp.point_vec());
        model.captured.push_back(h.squaredNorm());
        model.converged.push_back(converged);
        previous.conservativeResize(Eigen::NoChange, previous.cols() + 1);
        previous.col(previous.cols() - 1) = h;
        model.training_coords.push_back(std::move(h));
        emps.push_back(std::move(emp));
    }
    model.tvp = Tvp(std::move(emps));
    return model;
}

Vector umpca_extract(const UmpcaModel& model, const Sample& sample) {
    require_shape(sample, model.mean.channels(), model.mean.points(), "UMPCA");
    const RowMatrix centered = sample.values() - model.mean.values();
    Vector y(static_cast<Eigen::Index>(model.tvp.size()));
    for (std::size_t l = 0; l < model.tvp.size(); ++l) {
        const auto& emp = model.tvp[l];
        y(static_cast<Eigen::Index>(l)) = emp.channel_vec().dot(centered * emp.point_vec());
    }
    return y;
}

MpcaModel mpca_train(const TensorBatch& batch, std::size_t p1, std::size_t p2, std::size_t features) {
    if (batch.empty()) {
        throw InfeasibleError("MPCA needs a non-empty batch");
    }
    if (p1 < 1 || p1 > batch.channels() || p2 < 1 || p2 > batch.points()) {
        throw InfeasibleError("MPCA ranks (" + std::to_string(p1) + ", " + std::to_string(p2) +
                              ") must lie in [1, C] x [1, K] = [1, " + std::to_string(batch.channels()) +
                              "] x [1, " + std::to_string(batch.points()) + "]");
    }
    if (features < 1 || features > p1 * p2) {
        throw InfeasibleError("MPCA feature count " + std::to_string(features) + " outside [1, p1*p2] = [1, " +
                              std::to_string(p1 * p2) + "]");
    }
    const CenteredBatch data(batch);
    const auto c = data.channels();
    const auto k = data.points();
    const auto r1 = static_cast<Eigen::Index>(p1);
    const auto r2 = static_cast<Eigen::Index>(p2);

    // Full-projection start: each mode's eigenbasis with the other mode untouched.
    Matrix s1 = Matrix::Zero(c, c);
    Matrix s2 = Matrix::Zero(k, k);
    for (const auto& x : data.data) {
        s1.noalias() += x * x.transpose();
        s2.noalias() += x.transpose() * x;
    }
    Matrix u1 = detail::top_eigenpairs(s1, r1).vectors;
    Matrix u2 = detail::top_eigenpairs(s2, r2).vectors;

    constexpr int kPasses = 2;
    for (int pass = 0; pass < kPasses; ++pass) {
        s1.setZero();
        for (const auto& x : data.data) {
            const Matrix xu = x * u2;
            s1.noalias() += xu * xu.transpose();
        }
        u1 = detail::top_eigenpairs(s1, r1).vectors;
        s2.setZero();
        for (const auto& x : data.data) {
            const Matrix xu = x.transpose() * u1;
            s2.noalias() += xu * xu.transpose();
        }
        u2 = detail::top_eigenpairs(s2, r2).vectors;
    }

    Vector variance = Vector::Zero(r1 * r2);
    for (const auto& x : data.data) {
        const RowMatrix core = u1.transpose() * x * u2;
        variance += Eigen::Map<const Vector>(core.data(), core.size()).cwiseAbs2();
    }
    variance /= static_cast<double>(data.size());

    std::vector<Eigen::Index> order(static_cast<std::size_t>(variance.size()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return variance(a) > variance(b); });
    order.resize(features);

    return MpcaModel{std::move(u1), std::move(u2), std::move(order), data.mean};
}

Matrix mpca_core(const MpcaModel& model, const Sample& sample) {
    require_shape(sample, model.mean.channels(), model.mean.points(), "MPCA");
    return model.u1.transpose() * (sample.values() - model.mean.values()) * model.u2;
}

Vector mpca_extract(const MpcaModel& model, const Sample& sample) {
    const RowMatrix core = mpca_core(model, sample);
    Vector y(static_cast<Eigen::Index>(model.feature_index.size()));
    for (std::size_t j = 0; j < model.feature_index.size(); ++j) {
        y(static_cast<Eigen::Index>(j)) = core.data()[model.feature_index[j]];
    }
    return y;
}

VpcaModel vpca_train(const TensorBatch& batch, std::size_t features) {
    if (batch.size() < 2) {
        throw InfeasibleError("VPCA needs at least two samples");
    }
    const std::size_t cap = std::min(batch.channels() * batch.points(), batch.size() - 1);
    if (features < 1 || features > cap) {
        throw InfeasibleError("VPCA feature count " + std::to_string(features) + " outside [1, " +
                              std::to_string(cap) + "] = [1, min(C*K, M - 1)]");
    }
    const Matrix rows = unfold(batch);
    VpcaModel model;
    model.mean = rows.colwise().mean().transpose();
    const Matrix centered = rows.rowwise() - model.mean.transpose();
    const Matrix cov = centered.transpose() * centered / static_cast<double>(batch.size() - 1);
    auto pairs = detail::top_eigenpairs(cov, static_cast<Eigen::Index>(features));
    model.loadings = std::move(pairs.vectors);
    model.variances = std::move(pairs.values);
    model.channels = batch.channels();
    model.points = batch.points();
    return model;
}

Vector vpca_extract(const VpcaModel& model, const Sample& sample) {
    require_shape(sample, model.channels, model.points, "VPCA");
    return model.loadings.transpose() * (flatten(sample) - model.mean);
}

} // namespace mcmon

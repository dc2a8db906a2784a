#include "mcmon/umlda.hpp"

#include "linalg.hpp"
#include "mcmon/error.hpp"
#include "mcmon/scatter.hpp"
#include "tvp_common.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <string>

namespace mcmon {

namespace {

using detail::CenteredBatch;

constexpr Eigen::Index kMaxDiscriminantWidth = 2048;

struct ScalarRatio {
    double between;
    double within;
};

ScalarRatio scalar_scatter(const Vector& y, std::span<const int> labels) {
    const auto pair = mode_scatters(Matrix(y.transpose()), labels);
    return {pair.between(0, 0), pair.within(0, 0)};
}

// Inverse of the regularized within-class scatter, restricted so that the
// resulting direction keeps the new coordinate vector orthogonal to every
// column of `previous`.
Matrix constrained_inverse(const ScatterPair& sc, double regularizer, const Matrix& partials, const Matrix& previous) {
    const Eigen::Index d = sc.dim();
    const Matrix regularized = sc.within + regularizer * Matrix::Identity(d, d);
    Eigen::LLT<Matrix> llt(regularized);
    if (llt.info() != Eigen::Success) {
        throw SingularityError("regularized within-class scatter is not positive definite; increase gamma");
    }
    Matrix inv = llt.solve(Matrix::Identity(d, d));
    if (previous.cols() == 0) {
        return 0.5 * (inv + inv.transpose());
    }
    const Matrix u = partials * previous;  // d x (l-1)
    const Matrix inv_u = inv * u;
    const Matrix phi = u.transpose() * inv_u;
    Matrix p = inv - inv_u * detail::symmetric_pinv(phi) * inv_u.transpose();
    return 0.5 * (p + p.transpose());
}


struct Run {
    Vector v1;
    Vector v2;
    double objective = -std::numeric_limits<double>::infinity();
    bool converged = false;
    std::vector<double> trace;
};

// Alternating mode updates from (v1, v2); keeps the best iterate.
Run optimize_emp(const CenteredBatch& data, std::span<const int> labels, const Matrix& previous, double regularizer,
                 Vector v1, Vector v2, const UmldaParams& params) {
    Run run{v1, v2, -std::numeric_limits<double>::infinity(), false, {}};
    double previous_objective = 0.0;
    for (int it = 0; it < params.max_iters; ++it) {
        for (const Mode mode : {Mode::Channel, Mode::Point}) {
            const Vector& other = mode == Mode::Channel ? v2 : v1;
            const Matrix partials = data.partials(other, mode);
            const auto sc = mode_scatters(partials, labels);
            const Matrix inv = constrained_inverse(sc, regularizer, partials, previous);
            Vector v = detail::leading_eigenvector_psd_product(inv, sc.between);
            (mode == Mode::Channel ? v1 : v2) = std::move(v);
        }
        const auto ratio = scalar_scatter(data.project(v1, v2), labels);
        const double denom = ratio.within + regularizer;
        const double objective = denom > 0.0 ? ratio.between / denom : std::numeric_limits<double>::infinity();
        run.trace.push_back(objective);
        if (objective > run.objective) {
            run.objective = objective;
            run.v1 = v1;
            run.v2 = v2;
        }
        if (it > 0 && objective - previous_objective <= params.tol * std::abs(previous_objective)) {
            run.converged = true;
            break;
        }
        previous_objective = objective;
    }
    return run;
}

// Starts from the two leading rank-one parts of the vectorized discriminant
// direction (same zero-correlation constraint). None for wide samples.
std::vector<std::pair<Vector, Vector>> discriminant_starts(const CenteredBatch& data, std::span<const int> labels,
                                                            const Matrix& previous, double gamma) {
    const Eigen::Index c = data.channels();
    const Eigen::Index k = data.points();
    if (c == 1 || k == 1 || c * k > kMaxDiscriminantWidth) {
        return {};
    }
    Matrix z(c * k, data.size());
    for (Eigen::Index m = 0; m < data.size(); ++m) {
        z.col(m) = Eigen::Map<const Vector>(data.data[static_cast<std::size_t>(m)].data(), c * k);
    }
    const auto sc = mode_scatters(z, labels);
    const double regularizer = std::max(gamma, 1e-12) * std::max(detail::largest_eigenvalue(sc.within), 0.0);
    const Matrix inv = constrained_inverse(sc, regularizer, z, previous);
    const Vector w = detail::leading_eigenvector_psd_product(inv, sc.between);
    const Matrix shaped = Eigen::Map<const RowMatrix>(w.data(), c, k);
    Eigen::JacobiSVD<Matrix> svd(shaped, Eigen::ComputeThinU | Eigen::ComputeThinV);
    std::vector<std::pair<Vector, Vector>> starts;
    for (Eigen::Index i = 0; i < std::min<Eigen::Index>(2, svd.singularValues().size()); ++i) {
        starts.emplace_back(svd.matrixU().col(i), svd.matrixV().col(i));
    }
    return starts;
}

} // namespace

std::size_t umlda_feature_cap(std::size_t channels, std::size_t points, std::size_t samples, int classes) {
    const auto cls = static_cast<std::size_t>(std::max(classes, 0));
    const std::size_t by_samples = samples > cls ? samples - cls : 0;
    return std::min({channels, points, by_samples});
}

UmldaModel umlda_train(const TensorBatch& batch, std::size_t features, const UmldaParams& params) {
    if (!batch.has_labels()) {
        throw InvalidArgument("UMLDA training requires class labels");
    }
    const int classes = batch.class_count();
    if (classes < 2) {
        throw DegenerateError("UMLDA training needs at least two classes, got " + std::to_string(classes));
    }
    const auto cap = umlda_feature_cap(batch.channels(), batch.points(), batch.size(), classes);
    if (features < 1 || features > cap) {
        throw InfeasibleError("UMLDA feature count " + std::to_string(features) + " outside [1, " +
                              std::to_string(cap) + "] = [1, min(C, K, M - classes)]");
    }
    if (params.gamma < 0.0 || params.max_iters < 1 || params.tol < 0.0) {
        throw InvalidArgument("UMLDA parameters must satisfy gamma >= 0, max_iters >= 1, tol >= 0");
    }

    const CenteredBatch data(batch);
    const std::span<const int> labels(batch.labels());
    const Eigen::Index m_count = data.size();

    UmldaModel model;
    model.mean = data.mean;
    model.gamma = params.gamma;
    model.class_count = classes;

    std::vector<Emp> emps;
    Matrix previous(m_count, 0);

    for (std::size_t l = 0; l < features; ++l) {
        const Vector u1 = detail::initial_vector(data.channels(), params.init);
        const Vector u2 = detail::initial_vector(data.points(), params.init);
        const auto start = mode_scatters(data.partials(u2, Mode::Channel), labels);
        const double regularizer = params.gamma * std::max(detail::largest_eigenvalue(start.within), 0.0);

        Run best = optimize_emp(data, labels, previous, regularizer, u1, u2, params);
        if (params.discriminant_start) {
            for (const auto& [a, b] : discriminant_starts(data, labels, previous, params.gamma)) {
                Run other = optimize_emp(data, labels, previous, regularizer, a, b, params);
                if (other.objective > best.objective) {
                    best = std::move(other);
                }
            }
        }
        Vector best_v1 = std::move(best.v1);
        Vector best_v2 = std::move(best.v2);
        const bool converged = best.converged;
        std::vector<double> trace = std::move(best.trace);

        Emp emp(std::move(best_v1), std::move(best_v2));
        Vector h = data.project(emp.channel_vec(), emp.point_vec());
        const auto ratio = scalar_scatter(h, labels);
        model.fisher_ratios.push_back(ratio.within > 0.0 ? ratio.between / ratio.within
                                                         : std::numeric_limits<double>::infinity());
        model.regularizers.push_back(regularizer);
        model.converged.push_back(converged);
        model.objective_trace.push_back(std::move(trace));

        previous.conservativeResize(Eigen::NoChange, previous.cols() + 1);
        previous.col(previous.cols() - 1) = h;
        model.training_coords.push_back(std::move(h));
        emps.push_back(std::move(emp));
    }
    model.tvp = Tvp(std::move(emps));
    return model;
}

Vector umlda_extract(const UmldaModel& model, const Sample& sample) {
    if (sample.channels() != model.mean.channels() || sample.points() != model.mean.points()) {
        throw DimensionError("UMLDA model expects " + std::to_string(model.mean.channels()) + "x" +
                             std::to_string(model.mean.points()) + " samples, got " +
                             std::to_string(sample.channels()) + "x" + std::to_string(sample.points()));
    }
    const RowMatrix centered = sample.values() - model.mean.values();
    Vector y(static_cast<Eigen::Index>(model.tvp.size()));
    for (std::size_t l = 0; l < model.tvp.size(); ++l) {
        const auto& emp = model.tvp[l];
        y(static_cast<Eigen::Index>(l)) = emp.channel_vec().dot(centered * emp.point_vec());
    }
    return y;
}

} // namespace mcmon

#include "mcmon/chart.hpp"

#include "mcmon/error.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>

#include <cmath>
#include <string>

namespace mcmon {

namespace {

constexpr double kMaxConditionNumber = 1e12;

void require_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidArgument("alpha must lie in (0, 1), got " + std::to_string(alpha));
    }
}

Matrix guarded_inverse(const Matrix& covariance) {
    if (covariance.rows() != covariance.cols() || covariance.rows() == 0) {
        throw DimensionError("covariance must be a non-empty square matrix");
    }
    if (!covariance.allFinite()) {
        throw SingularityError("covariance contains non-finite entries");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (covariance + covariance.transpose()));
    const Vector& w = es.eigenvalues();
    const double largest = w.maxCoeff();
    const double smallest = w.minCoeff();
    if (!(largest > 0.0) || !(smallest > 0.0) || largest / smallest > kMaxConditionNumber) {
        throw SingularityError("feature covariance is singular or ill-conditioned (eigenvalues in [" +
                               std::to_string(smallest) + ", " + std::to_string(largest) + "])");
    }
    Matrix inv = es.eigenvectors() * w.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
    return 0.5 * (inv + inv.transpose());
}

} // namespace

double f_quantile(double p, double d1, double d2) {
    if (!(p > 0.0 && p < 1.0)) {
        throw InvalidArgument("F quantile probability must lie in (0, 1)");
    }
    if (!(d1 >= 1.0) || !(d2 >= 1.0)) {
        throw InvalidArgument("F degrees of freedom must be >= 1");
    }
    return boost::math::quantile(boost::math::fisher_f_distribution<double>(d1, d2), p);
}

double chi_square_quantile(double p, double dof) {
    if (!(p > 0.0 && p < 1.0)) {
        throw InvalidArgument("chi-square quantile probability must lie in (0, 1)");
    }
    if (!(dof >= 1.0)) {
        throw InvalidArgument("chi-square degrees of freedom must be >= 1");
    }
    return boost::math::quantile(boost::math::chi_squared_distribution<double>(dof), p);
}

std::string to_string(LimitConvention convention) {
    switch (convention) {
    case LimitConvention::ScaledF: return "scaled";
    case LimitConvention::RawF: return "raw";
    case LimitConvention::ChiSquare: return "chi2";
    }
    return "unknown";
}

LimitConvention parse_limit_convention(std::string_view name) {
    if (name == "scaled") return LimitConvention::ScaledF;
    if (name == "raw") return LimitConvention::RawF;
    if (name == "chi2") return LimitConvention::ChiSquare;
    throw InvalidArgument("unknown limit convention '" + std::string(name) + "' (expected scaled, raw or chi2)");
}

double control_limit(double alpha, std::size_t j, std::size_t m, LimitConvention convention) {
    require_alpha(alpha);
    if (j < 1) {
        throw InvalidArgument("chart dimension must be >= 1");
    }
    if (convention == LimitConvention::ChiSquare) {
        return chi_square_quantile(1.0 - alpha, static_cast<double>(j));
    }
    if (m <= j) {
        throw InsufficientDataError("control limit needs more Phase-I points than features (M = " +
                                    std::to_string(m) + ", J = " + std::to_string(j) + ")");
    }
    const auto jd = static_cast<double>(j);
    const auto md = static_cast<double>(m);
    const double f = f_quantile(1.0 - alpha, jd, md - jd);
    if (convention == LimitConvention::RawF) {
        return f;
    }
    return jd * (md + 1.0) * (md - 1.0) / (md * (md - jd)) * f;
}

T2Chart::T2Chart(Vector mean, const Matrix& covariance, double alpha, std::size_t m_train, LimitConvention convention)
    : mean_(std::move(mean)), cov_inv_(guarded_inverse(covariance)), alpha_(alpha), m_train_(m_train),
      convention_(convention) {
    if (covariance.rows() != mean_.size()) {
        throw DimensionError("chart mean has length " + std::to_string(mean_.size()) + " but covariance is " +
                             std::to_string(covariance.rows()) + "x" + std::to_string(covariance.cols()));
    }
    ucl_ = control_limit(alpha, dimension(), m_train, convention);
    validate();
}

T2Chart T2Chart::from_parts(Vector mean, Matrix cov_inv, double ucl, double alpha, std::size_t m_train,
                            LimitConvention convention) {
    T2Chart chart;
    chart.mean_ = std::move(mean);
    chart.cov_inv_ = std::move(cov_inv);
    chart.ucl_ = ucl;
    chart.alpha_ = alpha;
    chart.m_train_ = m_train;
    chart.convention_ = convention;
    chart.validate();
    return chart;
}

void T2Chart::validate() const {
    require_alpha(alpha_);
    if (mean_.size() < 1 || cov_inv_.rows() != mean_.size() || cov_inv_.cols() != mean_.size()) {
        throw DimensionError("chart mean and inverse covariance disagree in size");
    }
    if (!(ucl_ > 0.0) || !std::isfinite(ucl_)) {
        throw InvalidArgument("control limit must be positive and finite");
    }
    if (convention_ != LimitConvention::ChiSquare && m_train_ <= dimension()) {
        throw InvalidArgument("chart needs m_train > J");
    }
    if ((cov_inv_ - cov_inv_.transpose()).cwiseAbs().maxCoeff() > 1e-10 * cov_inv_.cwiseAbs().maxCoeff()) {
        throw InvalidArgument("inverse covariance is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(cov_inv_, Eigen::EigenvaluesOnly);
    if (!(es.eigenvalues().minCoeff() > 0.0)) {
        throw InvalidArgument("inverse covariance is not positive definite");
    }
}

double t2_statistic(const T2Chart& chart, const Vector& g) {
    if (g.size() != chart.mean().size()) {
        throw DimensionError("feature vector has length " + std::to_string(g.size()) + ", chart expects " +
                             std::to_string(chart.mean().size()));
    }
    const Vector d = g - chart.mean();
    return std::max(0.0, d.dot(chart.cov_inv() * d));
}

Matrix stack_rows(const std::vector<Vector>& rows) {
    if (rows.empty()) {
        return Matrix(0, 0);
    }
    Matrix out(static_cast<Eigen::Index>(rows.size()), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != out.cols()) {
            throw DimensionError("feature rows have inconsistent lengths");
        }
        out.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    }
    return out;
}

Phase1Result phase1_fit_detailed(const Matrix& features, double alpha, LimitConvention convention) {
    require_alpha(alpha);
    const auto m = static_cast<std::size_t>(features.rows());
    const auto j = static_cast<std::size_t>(features.cols());
    if (j < 1) {
        throw InvalidArgument("Phase I needs at least one feature");
    }
    if (m <= j + 1) {
        throw InsufficientDataError("Phase I needs M > J + 1 points (M = " + std::to_string(m) +
                                    ", J = " + std::to_string(j) + ")");
    }
    if (!features.allFinite()) {
        throw InvalidArgument("Phase-I features contain non-finite values");
    }

    std::vector<std::size_t> retained(m);
    for (std::size_t i = 0; i < m; ++i) {
        retained[i] = i;
    }
    std::vector<std::vector<std::size_t>> purged;

    while (true) {
        if (retained.size() < j + 2) {
            throw InsufficientDataError("Phase-I purging left " + std::to_string(retained.size()) +
                                        " points; need at least J + 2 = " + std::to_string(j + 2));
        }
        Matrix subset(static_cast<Eigen::Index>(retained.size()), features.cols());
        for (std::size_t i = 0; i < retained.size(); ++i) {
            subset.row(static_cast<Eigen::Index>(i)) = features.row(static_cast<Eigen::Index>(retained[i]));
        }
        Vector mean = subset.colwise().mean().transpose();
        const Matrix centered = subset.rowwise() - mean.transpose();
        const Matrix cov = centered.transpose() * centered / static_cast<double>(retained.size() - 1);
        T2Chart chart(std::move(mean), cov, alpha, retained.size(), convention);

        std::vector<std::size_t> keep;
        std::vector<std::size_t> drop;
        for (std::size_t i = 0; i < retained.size(); ++i) {
            const Vector row = subset.row(static_cast<Eigen::Index>(i)).transpose();
            (t2_statistic(chart, row) > chart.ucl() ? drop : keep).push_back(retained[i]);
        }
        if (drop.empty()) {
            return Phase1Result{std::move(chart), std::move(retained), std::move(purged)};
        }
        purged.push_back(std::move(drop));
        retained = std::move(keep);
    }
}

T2Chart phase1_fit(const Matrix& features, double alpha, LimitConvention convention) {
    return phase1_fit_detailed(features, alpha, convention).chart;
}

std::string to_string(Status status) {
    return status == Status::OutOfControl ? "OutOfControl" : "InControl";
}

MonitorVerdict verdict_for(const T2Chart& chart, const Vector& features) {
    MonitorVerdict v;
    v.t2 = t2_statistic(chart, features);
    v.ucl = chart.ucl();
    v.status = v.t2 > v.ucl ? Status::OutOfControl : Status::InControl;
    v.action = v.status == Status::OutOfControl ? Action::Stop : Action::Continue;
    return v;
}

MonitorVerdict monitor_sample(const T2Chart& chart, const Extractor& extractor, const Sample& sample) {
    return verdict_for(chart, extractor.extract(sample));
}

} // namespace mcmon

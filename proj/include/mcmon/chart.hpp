#pragma once

#include "mcmon/extractor.hpp"
#include "mcmon/tensor.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace mcmon {

// Quantile of the F(d1, d2) distribution: x with P(F <= x) = p.
double f_quantile(double p, double d1, double d2);

// Quantile of the chi-square distribution with `dof` degrees of freedom.
double chi_square_quantile(double p, double dof);

enum class LimitConvention {
    ScaledF,   // J(M+1)(M-1) / (M(M-J)) * F_{1-a}(J, M-J); parameters estimated from M points
    RawF,      // F_{1-a}(J, M-J) used directly as the limit
    ChiSquare, // chi2_{1-a}(J); parameters treated as known
};

std::string to_string(LimitConvention convention);
LimitConvention parse_limit_convention(std::string_view name);

// Upper control limit. `m` is the number of Phase-I points (ignored for ChiSquare).
double control_limit(double alpha, std::size_t j, std::size_t m, LimitConvention convention);

class T2Chart {
public:
    // Inverts `covariance` with a condition-number guard (max 1e12).
    T2Chart(Vector mean, const Matrix& covariance, double alpha, std::size_t m_train, LimitConvention convention);

    // Restores a chart from stored parts; no refitting or re-inversion.
    static T2Chart from_parts(Vector mean, Matrix cov_inv, double ucl, double alpha, std::size_t m_train,
                              LimitConvention convention);

    const Vector& mean() const noexcept { return mean_; }
    const Matrix& cov_inv() const noexcept { return cov_inv_; }
    double ucl() const noexcept { return ucl_; }
    double alpha() const noexcept { return alpha_; }
    std::size_t m_train() const noexcept { return m_train_; }
    std::size_t dimension() const noexcept { return static_cast<std::size_t>(mean_.size()); }
    LimitConvention convention() const noexcept { return convention_; }

private:
    T2Chart() = default;
    void validate() const;

    Vector mean_;
    Matrix cov_inv_;
    double ucl_ = 0.0;
    double alpha_ = 0.0;
    std::size_t m_train_ = 0;
    LimitConvention convention_ = LimitConvention::ScaledF;
};

// (g - mean)^T S^-1 (g - mean)
double t2_statistic(const T2Chart& chart, const Vector& g);

struct Phase1Result {
    T2Chart chart;
    // Indices into the original feature list, in ascending order.
    std::vector<std::size_t> retained;
    // Original indices removed in each purge pass (empty list for the final pass is not recorded).
    std::vector<std::vector<std::size_t>> purged;
};

// Fits mean and covariance, drops every point above the limit, and refits
// until no training point is out of control. Features are the rows of `features`.
Phase1Result phase1_fit_detailed(const Matrix& features, double alpha,
                                 LimitConvention convention = LimitConvention::ScaledF);

T2Chart phase1_fit(const Matrix& features, double alpha, LimitConvention convention = LimitConvention::ScaledF);

// Stacks one feature vector per row.
Matrix stack_rows(const std::vector<Vector>& rows);

enum class Status { InControl, OutOfControl };
enum class Action { Continue, Stop };

struct MonitorVerdict {
    double t2 = 0.0;
    double ucl = 0.0;
    Status status = Status::InControl;
    Action action = Action::Continue;
};

std::string to_string(Status status);

// Strictly above the limit is out of control.
MonitorVerdict verdict_for(const T2Chart& chart, const Vector& features);

MonitorVerdict monitor_sample(const T2Chart& chart, const Extractor& extractor, const Sample& sample);

} // namespace mcmon

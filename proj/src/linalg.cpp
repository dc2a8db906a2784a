#include "linalg.hpp"

#include "mcmon/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace mcmon::detail {

namespace {

constexpr int kPowerIterations = 2000;
constexpr double kPowerTolerance = 1e-10;

Vector symmetric_route(const Matrix& left, const Matrix& right) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(right);
    const Vector w = es.eigenvalues().cwiseMax(0.0);
    const Matrix root = es.eigenvectors() * w.cwiseSqrt().asDiagonal();
    const Matrix reduced = root.transpose() * left * root;
    Eigen::SelfAdjointEigenSolver<Matrix> red(0.5 * (reduced + reduced.transpose()));
    const Eigen::Index top = red.eigenvalues().size() - 1;
    Vector v = left * root * red.eigenvectors().col(top);
    if (v.norm() == 0.0) {
        // product is identically zero; any direction in range(left) is optimal
        Eigen::SelfAdjointEigenSolver<Matrix> fallback(left);
        v = fallback.eigenvectors().col(fallback.eigenvalues().size() - 1);
    }
    v.normalize();
    fix_sign(v);
    return v;
}

} // namespace

void fix_sign(Vector& v) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < v.size(); ++i) {
        if (std::abs(v(i)) > std::abs(v(best))) {
            best = i;
        }
    }
    if (v.size() > 0 && v(best) < 0.0) {
        v = -v;
    }
}

EigenPairs top_eigenpairs(const Matrix& symmetric, Eigen::Index count) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (symmetric + symmetric.transpose()));
    if (es.info() != Eigen::Success) {
        throw SingularityError("symmetric eigendecomposition failed");
    }
    const Eigen::Index n = symmetric.rows();
    // SelfAdjointEigenSolver sorts ascending; stable reverse keeps ties in index order.
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return es.eigenvalues()(a) > es.eigenvalues()(b); });
    EigenPairs out{Vector(count), Matrix(n, count)};
    for (Eigen::Index i = 0; i < count; ++i) {
        const auto src = order[static_cast<std::size_t>(i)];
        out.values(i) = es.eigenvalues()(src);
        Vector v = es.eigenvectors().col(src);
        fix_sign(v);
        out.vectors.col(i) = v;
    }
    return out;
}

double largest_eigenvalue(const Matrix& symmetric) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (symmetric + symmetric.transpose()), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(es.eigenvalues().size() - 1);
}

Vector leading_eigenvector_psd_product(const Matrix& left, const Matrix& right) {
    const Matrix product = left * right;
    Vector x = Vector::Ones(product.cols()) / std::sqrt(static_cast<double>(product.cols()));
    for (int it = 0; it < kPowerIterations; ++it) {
        Vector next = product * x;
        const double norm = next.norm();
        if (!(norm > 0.0) || !std::isfinite(norm)) {
            return symmetric_route(left, right);
        }
        next /= norm;
        fix_sign(next);
        if ((next - x).norm() < kPowerTolerance) {
            return next;
        }
        x = std::move(next);
    }
    return symmetric_route(left, right);
}

} // namespace mcmon::detail

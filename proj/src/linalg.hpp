#pragma once

#include "mcmon/tensor.hpp"

namespace mcmon::detail {

// Flips v so its largest-magnitude entry is positive (first such entry on ties).
void fix_sign(Vector& v);

struct EigenPairs {
    Vector values;  // descending
    Matrix vectors; // columns match values, sign-fixed
};

// Leading `count` eigenpairs of a symmetric matrix, largest first.
EigenPairs top_eigenpairs(const Matrix& symmetric, Eigen::Index count);

// Largest eigenvalue of a symmetric matrix.
double largest_eigenvalue(const Matrix& symmetric);

// Unit leading eigenvector of the product `left * right` where both factors
// are symmetric positive semi-definite. Power iteration from the all-ones
// vector, stopping once successive iterates differ by < 1e-10. If the
// iteration stalls, the symmetric reduction right = R R^T, R^T left R is
// used instead. Result is sign-fixed.
Vector leading_eigenvector_psd_product(const Matrix& left, const Matrix& right);

} // namespace mcmon::detail

#pragma once

#include "mcmon/tensor.hpp"

#include <vector>

namespace mcmon {

// Starting point of each EMP's alternating optimization.
enum class EmpInit {
    Uniform,       // normalized all-ones vector per mode
    PseudoIdentity // first basis vector per mode
};

struct UmldaParams {
    // Regularizer scale: the within-class scatter is augmented by
    // gamma * lambda_max(S_W) * I, with lambda_max taken at the EMP's
    // starting point and held fixed while that EMP is optimized.
    double gamma = 1e-3;
    int max_iters = 20;
    // Stop once the regularized Fisher ratio improves by less than
    // tol * (its previous value).
    double tol = 1e-6;
    EmpInit init = EmpInit::Uniform;
    // Also optimize from the dominant rank-one part of the vectorized
    // discriminant direction and keep whichever run scores higher.
    bool discriminant_start = true;
};

struct UmldaModel {
    Tvp tvp;
    Sample mean;
    double gamma = 0.0;
    int class_count = 0;
    // h_l: projections of the centered training samples, one per EMP.
    std::vector<Vector> training_coords;
    // Unregularized Fisher ratio of each h_l.
    std::vector<double> fisher_ratios;
    // Regularizer actually applied to each EMP (absolute, not relative).
    std::vector<double> regularizers;
    std::vector<bool> converged;
    // Regularized Fisher ratio after each full alternation pass, per EMP.
    std::vector<std::vector<double>> objective_trace;
};

// Largest L accepted by umlda_train: min(C, K, M - class_count).
std::size_t umlda_feature_cap(std::size_t channels, std::size_t points, std::size_t samples, int classes);

// Sequentially extracts L EMPs maximizing the Fisher ratio of the projected
// scalars, each uncorrelated with all earlier ones over the training set.
UmldaModel umlda_train(const TensorBatch& batch, std::size_t features, const UmldaParams& params = {});

Vector umlda_extract(const UmldaModel& model, const Sample& sample);

} // namespace mcmon

#pragma once

#include "mcmon/tensor.hpp"
#include "mcmon/umlda.hpp"

#include <vector>

namespace mcmon {

// --- UMPCA: variance-maximizing EMPs with uncorrelated coordinate vectors ---

struct UmpcaParams {
    int max_iters = 20;
    double tol = 1e-6;
    EmpInit init = EmpInit::Uniform;
};

struct UmpcaModel {
    Tvp tvp;
    Sample mean;
    std::vector<Vector> training_coords;
    // Sum of squared projections of the centered training set, per EMP.
    std::vector<double> captured;
    std::vector<bool> converged;
};

UmpcaModel umpca_train(const TensorBatch& batch, std::size_t features, const UmpcaParams& params = {});
Vector umpca_extract(const UmpcaModel& model, const Sample& sample);

// --- MPCA: per-mode orthonormal bases, features read from the projected core ---

struct MpcaModel {
    Matrix u1;                           // C x p1
    Matrix u2;                           // K x p2
    std::vector<Eigen::Index> feature_index; // flat core positions i * p2 + j
    Sample mean;
};

MpcaModel mpca_train(const TensorBatch& batch, std::size_t p1, std::size_t p2, std::size_t features);
Vector mpca_extract(const MpcaModel& model, const Sample& sample);

// Full p1 x p2 core of a sample, before feature selection.
Matrix mpca_core(const MpcaModel& model, const Sample& sample);

// --- VPCA: ordinary PCA of channel-major flattened samples ---

struct VpcaModel {
    Vector mean;     // length C*K
    Matrix loadings; // (C*K) x J, orthonormal columns
    Vector variances;
    std::size_t channels = 0;
    std::size_t points = 0;
};

VpcaModel vpca_train(const TensorBatch& batch, std::size_t features);
Vector vpca_extract(const VpcaModel& model, const Sample& sample);

} // namespace mcmon

#include "mcmon/baselines.hpp"
#include "mcmon/error.hpp"
#include "mcmon/extractor.hpp"
#include "mcmon/scatter.hpp"
#include "mcmon/umlda.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <map>
#include <numbers>

using namespace mcmon;
using testing_support::labeled_gaussian;
using testing_support::pearson;
using testing_support::random_sample;
using testing_support::random_unit;

namespace {

double fisher_oracle(const std::vector<double>& y, const std::vector<int>& labels) {
    std::map<int, std::pair<double, int>> acc;
    double total = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        acc[labels[i]].first += y[i];
        acc[labels[i]].second += 1;
        total += y[i];
    }
    const double mean = total / static_cast<double>(y.size());
    double sb = 0.0;
    for (const auto& [_, p] : acc) {
        const double mc = p.first / p.second;
        sb += p.second * (mc - mean) * (mc - mean);
    }
    double sw = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const auto& p = acc[labels[i]];
        const double mc = p.first / p.second;
        sw += (y[i] - mc) * (y[i] - mc);
    }
    return sb / sw;
}

// Plain covariance eigenvectors of the flattened data, via Eigen directly.
Eigen::SelfAdjointEigenSolver<Matrix> pca_oracle(const TensorBatch& batch) {
    Matrix rows = unfold(batch);
    rows.rowwise() -= rows.colwise().mean();
    const Matrix cov = rows.transpose() * rows / static_cast<double>(rows.rows() - 1);
    return Eigen::SelfAdjointEigenSolver<Matrix>(cov);
}

} // namespace

// --- scatter ---

TEST(ScatterScalars, TwoClassExample) {
    const std::vector<double> y{0.9, 1.1, -0.9, -1.1};
    const std::vector<int> l{0, 0, 1, 1};
    const auto s = scatter_scalars(y, l);
    EXPECT_NEAR(s.between, 4.0, 1e-12);
    EXPECT_NEAR(s.within, 0.04, 1e-12);
    EXPECT_NEAR(s.fisher, 100.0, 1e-9);
}

TEST(ScatterScalars, ZeroSpreadAndSingleClass) {
    const std::vector<double> y{1, 1, -1, -1};
    EXPECT_THROW(scatter_scalars(y, std::vector<int>{0, 0, 1, 1}), InfiniteSeparationError);
    EXPECT_THROW(scatter_scalars(y, std::vector<int>{0, 0, 0, 0}), DegenerateError);
}

TEST(ModeScatters, ScalarSpecialisation) {
    const std::vector<double> y{0.3, 1.2, -0.4, 2.0, 0.1};
    const std::vector<int> l{0, 1, 0, 1, 0};
    Matrix u(1, 5);
    for (int i = 0; i < 5; ++i) {
        u(0, i) = y[static_cast<std::size_t>(i)];
    }
    const auto sp = mode_scatters(u, l);
    const auto ss = scatter_scalars(y, l);
    EXPECT_NEAR(sp.between(0, 0), ss.between, 1e-14);
    EXPECT_NEAR(sp.within(0, 0), ss.within, 1e-14);
}

TEST(ModeScatters, SeparatedPoints) {
    Matrix u = Matrix::Zero(2, 4);
    u(0, 0) = u(0, 1) = 1.0;
    u(0, 2) = u(0, 3) = -1.0;
    const auto sp = mode_scatters(u, std::vector<int>{0, 0, 1, 1});
    EXPECT_NEAR(sp.between(0, 0), 4.0, 1e-14);
    EXPECT_NEAR(sp.between.cwiseAbs().sum(), 4.0, 1e-14);
    EXPECT_NEAR(sp.within.cwiseAbs().sum(), 0.0, 1e-14);
}

TEST(ModeScatters, TracesSumToTotalScatter) {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> n;
    Matrix u(3, 30);
    std::vector<int> l;
    for (int m = 0; m < 30; ++m) {
        for (int d = 0; d < 3; ++d) {
            u(d, m) = n(rng) + (m % 3);
        }
        l.push_back(m % 3);
    }
    const auto sp = mode_scatters(u, l);
    const Vector mean = u.rowwise().mean();
    double total = 0.0;
    for (int m = 0; m < 30; ++m) {
        total += (u.col(m) - mean).squaredNorm();
    }
    EXPECT_NEAR(sp.between.trace() + sp.within.trace(), total, 1e-10);
    EXPECT_LT((sp.between - sp.between.transpose()).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<Matrix>(sp.within).eigenvalues().minCoeff(), -1e-8);
}

// --- UMLDA ---

TEST(Umlda, RecoversRankOneStructure) {
    std::mt19937_64 rng(4);
    const Vector u = random_unit(rng, 4);
    const Vector w = random_unit(rng, 16);
    const Matrix outer = u * w.transpose();
    std::uniform_real_distribution<double> jitter(-0.5, 0.5);
    std::vector<Sample> samples;
    std::vector<int> labels;
    std::vector<double> ys;
    for (int m = 0; m < 40; ++m) {
        const double y = (m < 20 ? 5.0 : -5.0) + jitter(rng);
        ys.push_back(y);
        samples.emplace_back(RowMatrix(y * outer));
        labels.push_back(m < 20 ? 0 : 1);
    }
    const TensorBatch batch(samples, labels);
    const auto model = umlda_train(batch, 1);
    const Emp& e = model.tvp[0];
    EXPECT_NEAR(std::abs(e.channel_vec().dot(u)), 1.0, 1e-6);
    EXPECT_NEAR(std::abs(e.point_vec().dot(w)), 1.0, 1e-6);

    const Vector h = model.training_coords[0];
    double mean_y = 0.0;
    for (double y : ys) {
        mean_y += y / 40.0;
    }
    const double sign = h(0) * (ys[0] - mean_y) > 0 ? 1.0 : -1.0;
    for (int m = 0; m < 40; ++m) {
        EXPECT_NEAR(sign * h(m), ys[static_cast<std::size_t>(m)] - mean_y, 1e-6);
    }
}

TEST(Umlda, BeatsAngleGridOnTwoByTwo) {
    std::mt19937_64 rng(77);
    const TensorBatch batch = labeled_gaussian(rng, 2, 2, 3, 20, 1.5);
    const auto model = umlda_train(batch, 1);

    double best = 0.0;
    const int steps = 360;
    const auto& labels = batch.labels();
    std::vector<double> y(batch.size());
    for (int i = 0; i < steps; ++i) {
        const double a = std::numbers::pi * i / steps;
        for (int j = 0; j < steps; ++j) {
            const double b = std::numbers::pi * j / steps;
            for (std::size_t m = 0; m < batch.size(); ++m) {
                const auto& s = batch[m];
                y[m] = std::cos(a) * (s(0, 0) * std::cos(b) + s(0, 1) * std::sin(b)) +
                       std::sin(a) * (s(1, 0) * std::cos(b) + s(1, 1) * std::sin(b));
            }
            best = std::max(best, fisher_oracle(y, labels));
        }
    }
    EXPECT_GE(model.fisher_ratios[0], 0.999 * best);
}

TEST(Umlda, ExtraStartsNeverScoreLower) {
    UmldaParams uniform_only;
    uniform_only.discriminant_start = false;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        std::mt19937_64 rng(seed);
        const TensorBatch batch = labeled_gaussian(rng, 3, 5, 3, 15, 1.0);
        const auto plain = umlda_train(batch, 1, uniform_only);
        const auto multi = umlda_train(batch, 1);
        EXPECT_GE(multi.objective_trace[0].back(), plain.objective_trace[0].back() * (1.0 - 1e-12)) << seed;
    }
}

TEST(Umlda, CoordinatesUncorrelatedAndCentered) {
    std::mt19937_64 rng(9);
    const TensorBatch batch = labeled_gaussian(rng, 4, 12, 4, 25, 0.8);
    const std::size_t cap = umlda_feature_cap(4, 12, batch.size(), 4);
    ASSERT_EQ(cap, 4u);
    const auto model = umlda_train(batch, cap);
    ASSERT_EQ(model.training_coords.size(), cap);
    for (std::size_t l = 0; l < cap; ++l) {
        EXPECT_NEAR(model.training_coords[l].mean(), 0.0, 1e-8);
        for (std::size_t j = 0; j < l; ++j) {
            EXPECT_LE(std::abs(pearson(model.training_coords[l], model.training_coords[j])), 1e-6);
        }
    }
}

TEST(Umlda, FisherRatiosMatchCoordinates) {
    std::mt19937_64 rng(10);
    const TensorBatch batch = labeled_gaussian(rng, 3, 8, 3, 15, 1.0);
    const auto model = umlda_train(batch, 2);
    for (std::size_t l = 0; l < 2; ++l) {
        const Vector& h = model.training_coords[l];
        EXPECT_NEAR(model.fisher_ratios[l],
                    fisher_oracle(std::vector<double>(h.data(), h.data() + h.size()), batch.labels()),
                    1e-9 * model.fisher_ratios[l]);
    }
}

TEST(Umlda, InfeasibleFeatureCountNamesCap) {
    std::mt19937_64 rng(12);
    const TensorBatch batch = labeled_gaussian(rng, 3, 8, 2, 10, 1.0);
    try {
        umlda_train(batch, 4);
        FAIL();
    } catch (const InfeasibleError& e) {
        EXPECT_NE(std::string(e.what()).find("3"), std::string::npos);
    }
}

TEST(Umlda, RequiresTwoClasses) {
    std::mt19937_64 rng(13);
    const TensorBatch batch = labeled_gaussian(rng, 3, 8, 1, 10, 1.0);
    EXPECT_ANY_THROW(umlda_train(batch, 1));
}

TEST(Umlda, ObjectiveTraceNonDecreasing) {
    std::mt19937_64 rng(14);
    const TensorBatch batch = labeled_gaussian(rng, 4, 20, 3, 30, 0.5);
    const auto model = umlda_train(batch, 3);
    for (const auto& trace : model.objective_trace) {
        for (std::size_t i = 1; i < trace.size(); ++i) {
            EXPECT_GE(trace[i], trace[i - 1] * (1.0 - 1e-9));
        }
    }
}

// --- UMPCA ---

TEST(Umpca, AlignsWithDominantComponent) {
    std::mt19937_64 rng(15);
    const Vector u = random_unit(rng, 4);
    const Vector w = random_unit(rng, 10);
    std::normal_distribution<double> n;
    std::vector<Sample> samples;
    for (int m = 0; m < 80; ++m) {
        const auto noise = random_sample(rng, 4, 10, 0.05);
        samples.emplace_back(RowMatrix(noise.values() + 3.0 * n(rng) * u * w.transpose()));
    }
    const TensorBatch batch(samples);
    const auto model = umpca_train(batch, 1);
    const auto es = pca_oracle(batch);
    const Vector top = es.eigenvectors().col(es.eigenvectors().cols() - 1);
    const Emp& e = model.tvp[0];
    const Vector emp_flat = flatten(Sample(RowMatrix(e.channel_vec() * e.point_vec().transpose())));
    EXPECT_GE(std::abs(emp_flat.dot(top)), 0.99);
}

TEST(Umpca, BeatsEveryAxisEmp) {
    std::mt19937_64 rng(16);
    std::vector<Sample> samples;
    for (int m = 0; m < 50; ++m) {
        samples.push_back(random_sample(rng, 3, 6));
    }
    const TensorBatch batch(samples);
    const auto model = umpca_train(batch, 1);
    const Sample mean = batch.mean_sample();
    double best_axis = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
        for (std::size_t k = 0; k < 6; ++k) {
            double acc = 0.0;
            for (const auto& s : samples) {
                const double d = s(c, k) - mean(c, k);
                acc += d * d;
            }
            best_axis = std::max(best_axis, acc);
        }
    }
    EXPECT_GE(model.captured[0], best_axis * (1.0 - 1e-12));
}

TEST(Umpca, CoordinatesUncorrelatedAndCentered) {
    std::mt19937_64 rng(17);
    std::vector<Sample> samples;
    for (int m = 0; m < 60; ++m) {
        samples.push_back(random_sample(rng, 4, 9));
    }
    const TensorBatch batch(samples);
    const auto model = umpca_train(batch, 4);
    for (std::size_t l = 0; l < 4; ++l) {
        EXPECT_NEAR(model.training_coords[l].mean(), 0.0, 1e-8);
        for (std::size_t j = 0; j < l; ++j) {
            EXPECT_LE(std::abs(pearson(model.training_coords[l], model.training_coords[j])), 1e-6);
        }
    }
    EXPECT_THROW(umpca_train(batch, 5), InfeasibleError);
}

// --- MPCA ---

TEST(Mpca, FullRankIsLossless) {
    std::mt19937_64 rng(18);
    std::vector<Sample> samples;
    for (int m = 0; m < 30; ++m) {
        samples.push_back(random_sample(rng, 4, 7));
    }
    const TensorBatch batch(samples);
    const auto model = mpca_train(batch, 4, 7, 5);
    const Sample mean = batch.mean_sample();
    for (const auto& s : samples) {
        const Matrix core = mpca_core(model, s);
        const Matrix back = model.u1 * core * model.u2.transpose();
        EXPECT_LT((back - Matrix(s.values() - mean.values())).cwiseAbs().maxCoeff(), 1e-8);
    }
}

TEST(Mpca, SingleChannelMatchesPca) {
    std::mt19937_64 rng(19);
    std::vector<Sample> samples;
    const Vector scale = Vector::LinSpaced(6, 3.0, 0.5);
    for (int m = 0; m < 40; ++m) {
        auto s = random_sample(rng, 1, 6);
        samples.emplace_back(RowMatrix(s.values().array() * scale.transpose().array()));
    }
    const TensorBatch batch(samples);
    const auto mpca = mpca_train(batch, 1, 3, 3);
    const auto vpca = vpca_train(batch, 3);
    for (int j = 0; j < 3; ++j) {
        EXPECT_NEAR(std::abs(mpca.u2.col(j).dot(vpca.loadings.col(j))), 1.0, 1e-8);
    }
}

TEST(Mpca, CapturedVarianceGrowsWithRank) {
    std::mt19937_64 rng(20);
    std::vector<Sample> samples;
    for (int m = 0; m < 25; ++m) {
        samples.push_back(random_sample(rng, 3, 8));
    }
    const TensorBatch batch(samples);
    double prev = 0.0;
    for (std::size_t p2 = 1; p2 <= 8; ++p2) {
        const auto model = mpca_train(batch, 2, p2, 1);
        double captured = 0.0;
        for (const auto& s : samples) {
            captured += mpca_core(model, s).squaredNorm();
        }
        EXPECT_GE(captured, prev - 1e-9);
        prev = captured;
    }
}

// --- VPCA ---

TEST(Vpca, SingleDirection) {
    std::mt19937_64 rng(22);
    const Vector d = random_unit(rng, 8);
    std::normal_distribution<double> n;
    std::vector<Sample> samples;
    for (int m = 0; m < 20; ++m) {
        samples.push_back(Sample::from_flat(2, 4, [&] {
            const Vector v = n(rng) * d;
            return std::vector<double>(v.data(), v.data() + v.size());
        }()));
    }
    const auto model = vpca_train(TensorBatch(samples), 1);
    EXPECT_NEAR(std::abs(model.loadings.col(0).dot(d)), 1.0, 1e-10);
}

TEST(Vpca, OrthonormalAndOrdered) {
    std::mt19937_64 rng(23);
    std::vector<Sample> samples;
    for (int m = 0; m < 30; ++m) {
        samples.push_back(random_sample(rng, 2, 5));
    }
    const TensorBatch batch(samples);
    const auto two = vpca_train(batch, 2);
    EXPECT_LT((two.loadings.transpose() * two.loadings - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-8);
    const auto one = vpca_train(batch, 1);
    EXPECT_GE(two.variances.sum(), one.variances.sum());
}

TEST(Vpca, SingleChannelEqualsPca) {
    std::mt19937_64 rng(24);
    std::vector<Sample> samples;
    for (int m = 0; m < 50; ++m) {
        samples.push_back(random_sample(rng, 1, 7));
    }
    const TensorBatch batch(samples);
    const auto model = vpca_train(batch, 3);
    const auto es = pca_oracle(batch);
    for (int j = 0; j < 3; ++j) {
        const Vector ref = es.eigenvectors().col(6 - j);
        EXPECT_NEAR(std::abs(model.loadings.col(j).dot(ref)), 1.0, 1e-8);
        EXPECT_NEAR(model.variances(j), es.eigenvalues()(6 - j), 1e-10);
    }
}

// --- extractor ---

class ExtractorAll : public ::testing::TestWithParam<Method> {};

TEST_P(ExtractorAll, MeanMapsToZero) {
    std::mt19937_64 rng(25);
    const TensorBatch batch = labeled_gaussian(rng, 4, 10, 3, 20, 1.0);
    const Extractor ex = train_extractor(batch, GetParam(), 3);
    EXPECT_EQ(ex.feature_count(), 3u);
    EXPECT_LT(ex.extract(batch.mean_sample()).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT(ex.extract(ex.mean_sample()).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_THROW(ex.extract(Sample(3, 10)), DimensionError);
}

TEST_P(ExtractorAll, AffineAlongMean) {
    std::mt19937_64 rng(26);
    const TensorBatch batch = labeled_gaussian(rng, 3, 6, 2, 20, 1.0);
    const Extractor ex = train_extractor(batch, GetParam(), 2);
    const Sample mean = ex.mean_sample();
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int t = 0; t < 5; ++t) {
        const Sample x = random_sample(rng, 3, 6);
        const double a = u(rng);
        const Sample mix(RowMatrix(a * x.values() + (1.0 - a) * mean.values()));
        EXPECT_LT((ex.extract(mix) - a * ex.extract(x)).cwiseAbs().maxCoeff(), 1e-9);
    }
}

INSTANTIATE_TEST_SUITE_P(Methods, ExtractorAll,
                         ::testing::Values(Method::Umlda, Method::Umpca, Method::Mpca, Method::Vpca),
                         [](const auto& info) { return to_string(info.param); });

TEST(Extractor, UmldaFeaturesAreTrainingCoordinates) {
    std::mt19937_64 rng(27);
    const TensorBatch batch = labeled_gaussian(rng, 4, 10, 3, 20, 1.0);
    const Extractor ex = train_extractor(batch, Method::Umlda, 3);
    const auto& model = std::get<UmldaModel>(ex.model());
    for (std::size_t m = 0; m < batch.size(); ++m) {
        const Vector f = ex.extract(batch[m]);
        for (std::size_t l = 0; l < 3; ++l) {
            EXPECT_NEAR(f(static_cast<Eigen::Index>(l)), model.training_coords[l](static_cast<Eigen::Index>(m)),
                        1e-12);
        }
    }
}

TEST(Extractor, MethodNames) {
    for (const Method m : {Method::Umlda, Method::Umpca, Method::Mpca, Method::Vpca}) {
        EXPECT_EQ(parse_method(to_string(m)), m);
    }
    EXPECT_THROW(parse_method("lda"), InvalidArgument);
}

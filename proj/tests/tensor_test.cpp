#include "mcmon/error.hpp"
#include "mcmon/tensor.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace mcmon;
using testing_support::random_sample;
using testing_support::random_unit;

namespace {

Sample two_by_two() {
    RowMatrix v(2, 2);
    v << 1, 2, 3, 4;
    return Sample(v);
}

} // namespace

TEST(Sample, RejectsEmptyAndNonFinite) {
    EXPECT_THROW(Sample(RowMatrix(0, 3)), InvalidArgument);
    RowMatrix v = RowMatrix::Zero(2, 2);
    v(1, 1) = std::nan("");
    EXPECT_THROW(Sample{v}, InvalidArgument);
}

TEST(TensorBatch, LabelsMustBeContiguous) {
    std::vector<Sample> s(3, Sample(2, 2));
    EXPECT_NO_THROW(TensorBatch(s, std::vector<int>{0, 1, 1}));
    EXPECT_THROW(TensorBatch(s, std::vector<int>{0, 2, 2}), InvalidArgument);
    EXPECT_THROW(TensorBatch(s, std::vector<int>{0, 1}), DimensionError);
}

TEST(TensorBatch, RejectsMixedShapes) {
    std::vector<Sample> s{Sample(2, 2), Sample(2, 3)};
    EXPECT_THROW(TensorBatch{s}, DimensionError);
}

TEST(Emp, VectorsAreUnitNorm) {
    Vector a(3);
    a << 3, 0, 4;
    Vector b(2);
    b << 1, 1;
    const Emp e(a, b);
    EXPECT_NEAR(e.channel_vec().norm(), 1.0, 1e-10);
    EXPECT_NEAR(e.point_vec().norm(), 1.0, 1e-10);
    EXPECT_THROW(Emp(Vector::Zero(3), b), InvalidArgument);
}

TEST(PartialProject, BasisSelection) {
    const Sample s = two_by_two();
    const Vector m1 = partial_project(s, Vector::Unit(2, 0), Mode::Channel);
    EXPECT_DOUBLE_EQ(m1(0), 1.0);
    EXPECT_DOUBLE_EQ(m1(1), 3.0);
    const Vector m2 = partial_project(s, Vector::Unit(2, 1), Mode::Point);
    EXPECT_DOUBLE_EQ(m2(0), 3.0);
    EXPECT_DOUBLE_EQ(m2(1), 4.0);
}

TEST(PartialProject, UniformTensor) {
    const Sample ones(RowMatrix::Ones(4, 128));
    const Vector v = Vector::Constant(128, 1.0 / std::sqrt(128.0));
    const Vector r = partial_project(ones, v, Mode::Channel);
    ASSERT_EQ(r.size(), 4);
    for (int c = 0; c < 4; ++c) {
        EXPECT_NEAR(r(c), std::sqrt(128.0), 1e-12);
    }
}

TEST(PartialProject, MismatchNamesBothShapes) {
    try {
        partial_project(two_by_two(), Vector::Ones(5), Mode::Channel);
        FAIL();
    } catch (const DimensionError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("2x2"), std::string::npos);
        EXPECT_NE(msg.find("5"), std::string::npos);
    }
}

TEST(EmpProject, UniformClosedForm) {
    const Sample ones(RowMatrix::Ones(4, 128));
    const Emp e(Vector::Constant(4, 0.5), Vector::Constant(128, 1.0 / std::sqrt(128.0)));
    EXPECT_NEAR(emp_project(ones, e), std::sqrt(512.0), 1e-12);
}

TEST(EmpProject, BasisPicksEntry) {
    std::mt19937_64 rng(3);
    const Sample s = random_sample(rng, 3, 5);
    for (int c = 0; c < 3; ++c) {
        for (int k = 0; k < 5; ++k) {
            EXPECT_EQ(emp_project(s, Emp(Vector::Unit(3, c), Vector::Unit(5, k))), s(c, k));
        }
    }
}

TEST(EmpProject, MatchesDoubleSum) {
    std::mt19937_64 rng(11);
    const Sample s = random_sample(rng, 3, 5);
    const Emp e(random_unit(rng, 3), random_unit(rng, 5));
    double expected = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
        for (std::size_t k = 0; k < 5; ++k) {
            expected += s(c, k) * e.channel_vec()(c) * e.point_vec()(k);
        }
    }
    EXPECT_NEAR(emp_project(s, e), expected, 1e-12);
}

TEST(TvpProject, EntryPerEmp) {
    std::mt19937_64 rng(5);
    const Sample s = random_sample(rng, 3, 4);
    const Emp a(random_unit(rng, 3), random_unit(rng, 4));
    const Emp b(random_unit(rng, 3), random_unit(rng, 4));
    const Emp c(random_unit(rng, 3), random_unit(rng, 4));

    EXPECT_EQ(tvp_project(s, Tvp({a}))(0), emp_project(s, a));
    const Vector dup = tvp_project(s, Tvp({a, a}));
    EXPECT_EQ(dup(0), dup(1));
    const Vector y = tvp_project(s, Tvp({a, b, c}));
    EXPECT_EQ(y(0), emp_project(s, a));
    EXPECT_EQ(y(1), emp_project(s, b));
    EXPECT_EQ(y(2), emp_project(s, c));
    EXPECT_THROW(tvp_project(random_sample(rng, 2, 4), Tvp({a})), DimensionError);
}

TEST(Unfold, ChannelMajorLayout) {
    const Matrix rows = unfold(TensorBatch({two_by_two()}));
    ASSERT_EQ(rows.rows(), 1);
    EXPECT_EQ(rows(0, 0), 1);
    EXPECT_EQ(rows(0, 1), 2);
    EXPECT_EQ(rows(0, 2), 3);
    EXPECT_EQ(rows(0, 3), 4);

    const Matrix twice = unfold(TensorBatch({two_by_two(), two_by_two()}));
    EXPECT_EQ(twice.row(0), twice.row(1));
}

TEST(Unfold, RefoldRoundTrip) {
    std::mt19937_64 rng(8);
    std::vector<Sample> samples;
    for (int i = 0; i < 4; ++i) {
        samples.push_back(random_sample(rng, 3, 7));
    }
    const TensorBatch batch(samples);
    const TensorBatch back = refold(unfold(batch), 3, 7);
    for (std::size_t m = 0; m < batch.size(); ++m) {
        EXPECT_TRUE(back[m] == batch[m]);
    }
}

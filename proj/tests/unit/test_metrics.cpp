#include <kronfilter/metrics.hpp>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <random>

namespace kronfilter {
namespace {

Matrix gaussian(Index rows, Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i)
            m(i, j) = g(rng);
    return m;
}

TEST(Misalignment, Examples) {
    const Matrix h = Matrix::Identity(2, 2);
    EXPECT_DOUBLE_EQ(misalignment_db(Matrix::Zero(2, 2), h), 0.0);
    EXPECT_NEAR(misalignment_db(0.9 * h, h), -20.0, 1e-12);
    EXPECT_EQ(misalignment_db(h, h), kMisalignmentFloorDb);
    EXPECT_NEAR(misalignment_db(2.0 * h, h), 0.0, 1e-12);
}

TEST(Misalignment, ScaleInvariant) {
    std::mt19937_64 rng(1);
    const Matrix h = gaussian(3, 4, rng), w = gaussian(3, 4, rng);
    EXPECT_NEAR(misalignment_db(5.0 * w, 5.0 * h), misalignment_db(w, h), 1e-12);
}

TEST(Misalignment, Errors) {
    EXPECT_THROW(misalignment_db(Matrix::Zero(2, 3), Matrix::Identity(2, 2)), DimensionError);
    EXPECT_THROW(misalignment_db(Matrix::Zero(2, 2), Matrix::Zero(2, 2)), std::invalid_argument);
}

TEST(RankEstimate, Examples) {
    EXPECT_EQ(rank_estimate(Matrix::Zero(3, 4)), 0);
    EXPECT_EQ(rank_estimate(Matrix::Identity(3, 3)), 3);
    Matrix d = Matrix::Zero(3, 3);
    d.diagonal() << 1.0, 1e-3, 1e-9;
    EXPECT_EQ(rank_estimate(d), 2);
    EXPECT_EQ(rank_estimate(d, 1e-2), 1);
    EXPECT_EQ(rank_estimate(d, 1e-12), 3);
}

TEST(RankEstimate, ProductRank) {
    std::mt19937_64 rng(2);
    for (Index r = 1; r <= 4; ++r)
        EXPECT_EQ(rank_estimate(gaussian(6, r, rng) * gaussian(5, r, rng).transpose()), r);
}

TEST(NuclearNorm, Examples) {
    EXPECT_DOUBLE_EQ(nuclear_norm(Matrix::Identity(3, 3)), 3.0);
    EXPECT_DOUBLE_EQ(nuclear_norm(Matrix::Zero(2, 5)), 0.0);
    Matrix a(2, 2);
    a << 0, -4, 3, 0;
    EXPECT_NEAR(nuclear_norm(a), 7.0, 1e-12);
}

TEST(NuclearNorm, MatchesGramEigenvalues) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix w = gaussian(4, 6, rng);
        const Eigen::SelfAdjointEigenSolver<Matrix> eig(w * w.transpose());
        const double expected = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
        EXPECT_NEAR(nuclear_norm(w), expected, 1e-10 * expected);
        // Triangle inequality and absolute homogeneity.
        const Matrix v = gaussian(4, 6, rng);
        EXPECT_LE(nuclear_norm(w + v), nuclear_norm(w) + nuclear_norm(v) + 1e-12);
        EXPECT_NEAR(nuclear_norm(-2.5 * w), 2.5 * nuclear_norm(w), 1e-10 * expected);
    }
}

} // namespace
} // namespace kronfilter

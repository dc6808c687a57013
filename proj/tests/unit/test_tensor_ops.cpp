#include <kronfilter/tensor_ops.hpp>

#include <Eigen/QR>
#include <Eigen/SVD>
#include <gtest/gtest.h>
#include <unsupported/Eigen/KroneckerProduct>

#include <random>

namespace kronfilter {
namespace {

Matrix random_matrix(Index rows, Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i)
            m(i, j) = g(rng);
    return m;
}

FactorPair random_pair(const KroneckerShape& s, std::mt19937_64& rng) {
    return {random_matrix(s.m1, s.r, rng), random_matrix(s.m2, s.r, rng)};
}

// vec(U1 U2^T) evaluated entry by entry.
Vector naive_w(const FactorPair& fp) {
    const Index m1 = fp.u1.rows(), m2 = fp.u2.rows();
    Vector w = Vector::Zero(m1 * m2);
    for (Index i2 = 0; i2 < m2; ++i2)
        for (Index i1 = 0; i1 < m1; ++i1)
            for (Index t = 0; t < fp.u1.cols(); ++t)
                w(i1 + m1 * i2) += fp.u1(i1, t) * fp.u2(i2, t);
    return w;
}

TEST(Vec, ColumnMajor) {
    Matrix w(2, 2);
    w << 1, 3, 2, 4;
    EXPECT_EQ(vec(w), (Vector(4) << 1, 2, 3, 4).finished());
    EXPECT_EQ(vec(Matrix::Zero(3, 2)), Vector::Zero(6));
}

TEST(Vec, MatInvertsVec) {
    std::mt19937_64 rng(1);
    const Matrix w = random_matrix(4, 5, rng);
    EXPECT_EQ(mat(vec(w), 4, 5), w);
    const Vector v = vec(w);
    EXPECT_EQ(vec(mat(v, 5, 4)), v);
}

TEST(Mat, Examples) {
    Matrix expected(2, 2);
    expected << 1, 3, 2, 4;
    EXPECT_EQ(mat((Vector(4) << 1, 2, 3, 4).finished(), 2, 2), expected);

    Matrix e(2, 2);
    e << 1, 0, 0, 0;
    EXPECT_EQ(mat(Vector::Unit(4, 0), 2, 2), e);
}

TEST(Mat, RejectsNonConformingLength) {
    EXPECT_THROW(mat(Vector::Zero(6), 4), DimensionError);
    EXPECT_THROW(mat(Vector::Zero(6), 4, 2), DimensionError);
    EXPECT_NO_THROW(mat(Vector::Zero(6), 3));
}

TEST(Kron, Definition) {
    EXPECT_EQ(kron(Vector{{1.0, 2.0}}, Vector{{3.0, 4.0}}), (Vector(4) << 3, 4, 6, 8).finished());
    EXPECT_EQ(kron(Vector::Unit(2, 1), Vector::Unit(2, 0)), Vector::Unit(4, 2));
    EXPECT_EQ(kron(Vector{{1.0, -2.0, 5.0}}, Vector::Zero(3)), Vector::Zero(9));
}

TEST(Kron, Bilinear) {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        const Vector a = random_matrix(3, 1, rng), b = random_matrix(4, 1, rng);
        const double lambda = std::normal_distribution<double>{}(rng);
        const Vector ref = lambda * kron(a, b);
        EXPECT_LE((kron(lambda * a, b) - ref).norm(), 1e-14 * (1.0 + ref.norm()));
        EXPECT_LE((kron(a, lambda * b) - ref).norm(), 1e-14 * (1.0 + ref.norm()));
    }
}

TEST(FactorMatrix, RankOneExamples) {
    const KroneckerShape shape{2, 2, 1};
    FactorPair fp{Matrix::Constant(2, 1, 7.0), Vector::Unit(2, 0)};
    Matrix a1(4, 2);
    a1 << 1, 0, 0, 1, 0, 0, 0, 0;
    EXPECT_EQ(build_factor_matrix(Side::one, fp, shape).a, a1);

    fp = FactorPair{Vector::Unit(2, 0), Matrix::Constant(2, 1, 7.0)};
    Matrix a2(4, 2);
    a2 << 1, 0, 0, 0, 0, 1, 0, 0;
    EXPECT_EQ(build_factor_matrix(Side::two, fp, shape).a, a2);
}

TEST(FactorMatrix, MatchesKroneckerBlocks) {
    std::mt19937_64 rng(3);
    const KroneckerShape shape{3, 4, 2};
    const FactorPair fp = random_pair(shape, rng);
    const Matrix a1 = build_factor_matrix(Side::one, fp, shape).a;
    const Matrix a2 = build_factor_matrix(Side::two, fp, shape).a;
    for (Index t = 0; t < shape.r; ++t) {
        const Matrix b1 = Eigen::kroneckerProduct(Matrix(fp.u2.col(t)), Matrix::Identity(3, 3)).eval();
        const Matrix b2 = Eigen::kroneckerProduct(Matrix::Identity(4, 4), Matrix(fp.u1.col(t))).eval();
        EXPECT_EQ(a1.middleCols(t * 3, 3), b1);
        EXPECT_EQ(a2.middleCols(t * 4, 4), b2);
    }
    const Vector w = naive_w(fp);
    EXPECT_LE((a1 * vec(fp.u1) - w).norm(), 1e-12 * w.norm());
    EXPECT_LE((a2 * vec(fp.u2) - w).norm(), 1e-12 * w.norm());
}

TEST(FactorMatrix, RejectsShapeMismatch) {
    const KroneckerShape shape{3, 4, 2};
    FactorPair fp{Matrix::Zero(3, 2), Matrix::Zero(5, 2)};
    EXPECT_THROW(build_factor_matrix(Side::one, fp, shape), DimensionError);
    fp = FactorPair{Matrix::Zero(3, 2), Matrix::Zero(4, 1)};
    EXPECT_THROW(build_factor_matrix(Side::two, fp, shape), DimensionError);
    EXPECT_THROW(KroneckerShape(3, 4, 4), DimensionError);
    EXPECT_THROW(KroneckerShape(0, 4, 1), DimensionError);
}

TEST(ConcatFactorMatrix, ScalarCase) {
    const KroneckerShape shape{1, 1, 1};
    const double a = 3.0, b = -2.0;
    const FactorPair fp{Matrix::Constant(1, 1, a), Matrix::Constant(1, 1, b)};
    const Matrix hat = build_concat_factor_matrix(fp, shape);
    EXPECT_EQ(hat, (Matrix(1, 2) << b, a).finished());
    EXPECT_DOUBLE_EQ((hat * Vector{{a, b}})(0), 2 * a * b);
}

TEST(ConcatFactorMatrix, TwiceTheFilter) {
    std::mt19937_64 rng(4);
    const KroneckerShape shape{3, 4, 2};
    const FactorPair fp = random_pair(shape, rng);
    const Vector w = naive_w(fp);
    EXPECT_LE((build_concat_factor_matrix(fp, shape) * stack_factors(fp) - 2 * w).norm(),
              1e-12 * w.norm());
}

TEST(ConcatFactorMatrix, ZeroFactorsGiveZeroMatrix) {
    const KroneckerShape shape{3, 4, 2};
    const Matrix hat = build_concat_factor_matrix(FactorPair::zeros(shape), shape);
    EXPECT_EQ(hat.rows(), 12);
    EXPECT_EQ(hat.cols(), 14);
    EXPECT_TRUE(hat.isZero(0.0));
}

TEST(ConcatFactorMatrix, RejectsWrongSides) {
    const KroneckerShape shape{2, 2, 1};
    const FactorPair fp = FactorPair::zeros(shape);
    const auto a1 = build_factor_matrix(Side::one, fp, shape);
    const auto a2 = build_factor_matrix(Side::two, fp, shape);
    EXPECT_THROW(concat_factor_matrices(a2, a1), DimensionError);
    EXPECT_THROW(concat_factor_matrices(a1, a1), DimensionError);
}

TEST(Reconstruct, OuterProduct) {
    const FactorPair fp{Vector::Unit(2, 0), Vector::Unit(2, 1)};
    const FilterEstimate est = reconstruct(fp);
    EXPECT_EQ(est.w_mat, (Matrix(2, 2) << 0, 1, 0, 0).finished());
    EXPECT_EQ(est.w, vec(est.w_mat));
}

TEST(Reconstruct, RankBoundedByConstructionRank) {
    std::mt19937_64 rng(5);
    const KroneckerShape shape{5, 6, 3};
    const Matrix w = reconstruct(random_pair(shape, rng)).w_mat;
    const Vector s = Eigen::JacobiSVD<Matrix>(w).singularValues();
    EXPECT_GT(s(2), 1e-8 * s(0));
    EXPECT_LT(s(3), 1e-12 * s(0));
}

TEST(Reconstruct, ScaledOrthonormalFactorsHaveNuclearNormSum) {
    std::mt19937_64 rng(6);
    const Matrix q = random_matrix(5, 3, rng).householderQr().householderQ() * Matrix::Identity(5, 3);
    const Matrix v = random_matrix(4, 3, rng).householderQr().householderQ() * Matrix::Identity(4, 3);
    const Vector s{{3.0, 1.5, 0.25}};
    const FactorPair fp{q * s.cwiseSqrt().asDiagonal(), v * s.cwiseSqrt().asDiagonal()};
    const Vector sv = Eigen::JacobiSVD<Matrix>(reconstruct(fp).w_mat).singularValues();
    EXPECT_NEAR(sv.sum(), s.sum(), 1e-12);
}

TEST(FastPath, TransposeProductsMatchDense) {
    std::mt19937_64 rng(7);
    const KroneckerShape shape{4, 3, 2};
    const FactorPair fp = random_pair(shape, rng);
    const Matrix x = random_matrix(12, 9, rng);
    const Matrix hat = build_concat_factor_matrix(fp, shape);
    EXPECT_LE((apply_concat_transpose(fp, shape, x) - hat.transpose() * x).norm(),
              1e-12 * (hat.transpose() * x).norm());
    for (Side s : {Side::one, Side::two}) {
        const Vector dense = build_factor_matrix(s, fp, shape).a.transpose() * x.col(0);
        EXPECT_LE((apply_factor_transpose(s, fp, shape, x.col(0)) - dense).norm(), 1e-12 * dense.norm());
    }
}

// Identity A1 vec(U1) = A2 vec(U2) = vec(U1 U2^T) over random shapes.
TEST(FactorMatrix, IdentityHoldsForRandomShapes) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        const Index m1 = 1 + static_cast<Index>(rng() % 8);
        const Index m2 = 1 + static_cast<Index>(rng() % 8);
        const Index r = 1 + static_cast<Index>(rng() % static_cast<std::uint64_t>(std::min(m1, m2)));
        const KroneckerShape shape{m1, m2, r};
        const FactorPair fp = random_pair(shape, rng);
        const Vector w = naive_w(fp);
        const double tol = 1e-12 * std::max(1.0, w.norm());
        EXPECT_LE((build_factor_matrix(Side::one, fp, shape).a * vec(fp.u1) - w).norm(), tol);
        EXPECT_LE((build_factor_matrix(Side::two, fp, shape).a * vec(fp.u2) - w).norm(), tol);
    }
}

} // namespace
} // namespace kronfilter

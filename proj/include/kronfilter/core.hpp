#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace kronfilter {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Shapes or lengths that do not conform to each other.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A factorization or solve that produced a non-usable result.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A leave-one-out leverage reached 1, so the closed-form correction is undefined.
class LeverageError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Malformed configuration or input file.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Which factor of the bilinear model a quantity refers to.
enum class Side { one, two };

inline const char* to_string(Side s) { return s == Side::one ? "one" : "two"; }

/// Dimensions of the Kronecker factorization: the filter of length m1*m2 is
/// viewed as an m1 x m2 matrix parameterized by r rank-one terms.
struct KroneckerShape {
    Index m1 = 1;
    Index m2 = 1;
    Index r = 1;

    KroneckerShape() = default;
    KroneckerShape(Index m1_, Index m2_, Index r_) : m1{m1_}, m2{m2_}, r{r_} { validate(); }

    Index m() const { return m1 * m2; }
    Index side_length(Side s) const { return s == Side::one ? m1 : m2; }
    /// Number of parameters in both factors, (m1 + m2) r.
    Index parameters() const { return (m1 + m2) * r; }

    void validate() const {
        if (m1 < 1 || m2 < 1)
            throw DimensionError("KroneckerShape: m1 and m2 must be positive");
        if (r < 1 || r > std::min(m1, m2))
            throw DimensionError("KroneckerShape: r must lie in [1, min(m1, m2)], got " +
                                 std::to_string(r));
    }

    friend bool operator==(const KroneckerShape&, const KroneckerShape&) = default;
};

/// The two factors U1 (m1 x r) and U2 (m2 x r); the filter matrix is U1 * U2^T.
struct FactorPair {
    Matrix u1;
    Matrix u2;

    Index rank() const { return u1.cols(); }

    const Matrix& factor(Side s) const { return s == Side::one ? u1 : u2; }
    Matrix& factor(Side s) { return s == Side::one ? u1 : u2; }

    void validate() const {
        if (u1.cols() != u2.cols())
            throw DimensionError("FactorPair: u1 and u2 must have the same number of columns");
        if (!u1.allFinite() || !u2.allFinite())
            throw NumericalError("FactorPair: non-finite entries");
    }

    void validate(const KroneckerShape& shape) const {
        validate();
        if (u1.rows() != shape.m1 || u2.rows() != shape.m2 || u1.cols() != shape.r)
            throw DimensionError("FactorPair does not conform to shape (" +
                                 std::to_string(shape.m1) + ", " + std::to_string(shape.m2) +
                                 ", " + std::to_string(shape.r) + ")");
    }

    static FactorPair zeros(const KroneckerShape& shape) {
        return {Matrix::Zero(shape.m1, shape.r), Matrix::Zero(shape.m2, shape.r)};
    }
};

/// Input columns x_n (m x N) and outputs y (N).
struct DataSet {
    Matrix x;
    Vector y;

    DataSet() = default;
    DataSet(Matrix x_, Vector y_) : x{std::move(x_)}, y{std::move(y_)} { validate(); }

    Index samples() const { return x.cols(); }
    Index dim() const { return x.rows(); }

    void validate() const {
        if (x.cols() < 1)
            throw DimensionError("DataSet: at least one sample is required");
        if (x.cols() != y.size())
            throw DimensionError("DataSet: x has " + std::to_string(x.cols()) +
                                 " columns but y has " + std::to_string(y.size()) + " entries");
        if (!x.allFinite() || !y.allFinite())
            throw NumericalError("DataSet: non-finite entries");
    }

    /// Copy with sample n removed.
    DataSet without(Index n) const {
        const Index count = samples();
        Matrix xr(dim(), count - 1);
        Vector yr(count - 1);
        for (Index i = 0, j = 0; i < count; ++i) {
            if (i == n)
                continue;
            xr.col(j) = x.col(i);
            yr(j) = y(i);
            ++j;
        }
        return {std::move(xr), std::move(yr)};
    }
};

/// Reconstructed filter W (m1 x m2), w = vec(W), and the regularization that produced it.
struct FilterEstimate {
    Matrix w_mat;
    Vector w;
    double alpha = 0.0;
};

} // namespace kronfilter

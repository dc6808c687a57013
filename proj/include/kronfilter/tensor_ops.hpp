#pragma once

// Vectorization, Kronecker products and the structured matrices that make the
// bilinear model w = vec(U1 U2^T) linear in one factor at a time.
//
// Vectorization is column-major everywhere: vec(W)(i1 + m1*i2) = W(i1, i2).

#include <kronfilter/core.hpp>

namespace kronfilter {

inline Vector vec(const Eigen::Ref<const Matrix>& w) {
    return w.reshaped();
}

inline Matrix mat(const Eigen::Ref<const Vector>& w, Index k, Index l) {
    if (k < 1 || l < 1 || w.size() != k * l)
        throw DimensionError("mat: length " + std::to_string(w.size()) +
                             " not divisible as k·l with k=" + std::to_string(k) +
                             ", l=" + std::to_string(l));
    return w.reshaped(k, l);
}

/// mat with only the row count given; l is inferred.
inline Matrix mat(const Eigen::Ref<const Vector>& w, Index k) {
    if (k < 1 || w.size() % k != 0)
        throw DimensionError("mat: length " + std::to_string(w.size()) +
                             " not divisible as k·l with k=" + std::to_string(k));
    return mat(w, k, w.size() / k);
}

/// (a ⊗ b)(i*Q + j) = a(i) b(j), zero-based.
inline Vector kron(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) {
    Vector out(a.size() * b.size());
    for (Index i = 0; i < a.size(); ++i)
        out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

/// Dense A^(k): w = A^(k) vec(U^(k)). Columns are grouped by rank term.
struct StructuredFactorMatrix {
    Matrix a;
    Side side = Side::one;
};

/// A^(1) = [u_r^(2) ⊗ I_m1]_r (built from U2) or A^(2) = [I_m2 ⊗ u_r^(1)]_r (built from U1).
inline StructuredFactorMatrix build_factor_matrix(Side side, const FactorPair& fp,
                                                  const KroneckerShape& shape) {
    fp.validate(shape);
    const Index m1 = shape.m1, m2 = shape.m2, r = shape.r;
    StructuredFactorMatrix out;
    out.side = side;
    if (side == Side::one) {
        out.a = Matrix::Zero(m1 * m2, m1 * r);
        for (Index t = 0; t < r; ++t)
            for (Index i2 = 0; i2 < m2; ++i2)
                for (Index i1 = 0; i1 < m1; ++i1)
                    out.a(i1 + m1 * i2, i1 + m1 * t) = fp.u2(i2, t);
    } else {
        out.a = Matrix::Zero(m1 * m2, m2 * r);
        for (Index t = 0; t < r; ++t)
            for (Index i2 = 0; i2 < m2; ++i2)
                out.a.block(m1 * i2, i2 + m2 * t, m1, 1) = fp.u1.col(t);
    }
    return out;
}

/// Â = [A^(1) A^(2)], so Â [vec U1; vec U2] = 2 vec(U1 U2^T).
inline Matrix concat_factor_matrices(const StructuredFactorMatrix& a1,
                                     const StructuredFactorMatrix& a2) {
    if (a1.side != Side::one || a2.side != Side::two)
        throw DimensionError("concat_factor_matrices: expected sides (one, two)");
    if (a1.a.rows() != a2.a.rows())
        throw DimensionError("concat_factor_matrices: row counts differ");
    Matrix out(a1.a.rows(), a1.a.cols() + a2.a.cols());
    out << a1.a, a2.a;
    return out;
}

inline Matrix build_concat_factor_matrix(const FactorPair& fp, const KroneckerShape& shape) {
    return concat_factor_matrices(build_factor_matrix(Side::one, fp, shape),
                                  build_factor_matrix(Side::two, fp, shape));
}

/// [vec U1; vec U2].
inline Vector stack_factors(const FactorPair& fp) {
    Vector out(fp.u1.size() + fp.u2.size());
    out << fp.u1.reshaped(), fp.u2.reshaped();
    return out;
}

/// W = U1 U2^T and w = vec(W).
inline FilterEstimate reconstruct(const FactorPair& fp) {
    fp.validate();
    FilterEstimate out;
    out.w_mat = fp.u1 * fp.u2.transpose();
    out.w = out.w_mat.reshaped();
    return out;
}

/// (A^(k))^T x without forming A^(k): mat(A1^T x) = X U2, mat(A2^T x) = X^T U1 with X = mat(x).
inline Vector apply_factor_transpose(Side side, const FactorPair& fp, const KroneckerShape& shape,
                                     const Eigen::Ref<const Vector>& x) {
    const Matrix xm = mat(x, shape.m1, shape.m2);
    if (side == Side::one)
        return (xm * fp.u2).reshaped();
    return (xm.transpose() * fp.u1).reshaped();
}

/// Â^T X for all columns of X at once; rows [0, m1 r) belong to U1, the rest to U2.
inline Matrix apply_concat_transpose(const FactorPair& fp, const KroneckerShape& shape,
                                     const Eigen::Ref<const Matrix>& x) {
    if (x.rows() != shape.m())
        throw DimensionError("apply_concat_transpose: x has wrong row count");
    const Index p1 = shape.m1 * shape.r;
    Matrix out(shape.parameters(), x.cols());
    for (Index n = 0; n < x.cols(); ++n) {
        const Vector col = x.col(n);
        out.col(n).head(p1) = apply_factor_transpose(Side::one, fp, shape, col);
        out.col(n).tail(out.rows() - p1) = apply_factor_transpose(Side::two, fp, shape, col);
    }
    return out;
}

} // namespace kronfilter

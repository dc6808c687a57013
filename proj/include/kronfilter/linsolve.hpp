#pragma once

#include <kronfilter/core.hpp>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <limits>
#include <optional>

namespace kronfilter::detail {

/// Solve S x = b for symmetric S. Cholesky first; a fully pivoted LU takes over
/// when Cholesky fails or is numerically singular. Returns nullopt if S is singular.
inline std::optional<Matrix> solve_symmetric(const Eigen::Ref<const Matrix>& s,
                                             const Eigen::Ref<const Matrix>& b) {
    const double eps = std::numeric_limits<double>::epsilon();
    Eigen::LLT<Matrix> llt(s);
    if (llt.info() == Eigen::Success && llt.rcond() > eps * static_cast<double>(s.rows())) {
        Matrix x = llt.solve(b);
        if (x.allFinite())
            return x;
    }
    Eigen::FullPivLU<Matrix> lu(s);
    if (!lu.isInvertible())
        return std::nullopt;
    Matrix x = lu.solve(b);
    if (!x.allFinite())
        return std::nullopt;
    return x;
}

} // namespace kronfilter::detail

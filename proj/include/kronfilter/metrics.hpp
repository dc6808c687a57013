#pragma once

#include <kronfilter/core.hpp>

#include <Eigen/SVD>

#include <cmath>

namespace kronfilter {

/// Reported in place of -inf when the estimate matches the reference exactly.
inline constexpr double kMisalignmentFloorDb = -300.0;

/// 10 log10(||W - H||_F^2 / ||H||_F^2) in dB; the zero estimate gives 0 dB.
inline double misalignment_db(const Eigen::Ref<const Matrix>& w_hat,
                              const Eigen::Ref<const Matrix>& h) {
    if (w_hat.rows() != h.rows() || w_hat.cols() != h.cols())
        throw DimensionError("misalignment: estimate and reference differ in shape");
    const double ref = h.squaredNorm();
    if (!(ref > 0.0))
        throw std::invalid_argument("misalignment: reference filter is zero");
    const double err = (w_hat - h).squaredNorm();
    if (err == 0.0)
        return kMisalignmentFloorDb;
    return std::max(kMisalignmentFloorDb, 10.0 * std::log10(err / ref));
}

inline Vector singular_values(const Eigen::Ref<const Matrix>& w) {
    if (w.size() == 0)
        return Vector{};
    return Eigen::JacobiSVD<Matrix>(w).singularValues();
}

/// Number of singular values above rel_tol * sigma_1.
inline int rank_estimate(const Eigen::Ref<const Matrix>& w, double rel_tol = 1e-6) {
    const Vector s = singular_values(w);
    if (s.size() == 0 || s(0) == 0.0)
        return 0;
    return static_cast<int>((s.array() > rel_tol * s(0)).count());
}

inline double nuclear_norm(const Eigen::Ref<const Matrix>& w) {
    return singular_values(w).sum();
}

} // namespace kronfilter

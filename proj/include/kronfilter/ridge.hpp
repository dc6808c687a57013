#pragma once

// Full-rank ridge baseline: time-averaged moments, the regularized normal
// equations, and exact leave-one-out (PRESS) selection of alpha.

#include <kronfilter/core.hpp>
#include <kronfilter/golden_section.hpp>
#include <kronfilter/linsolve.hpp>

#include <cmath>
#include <sstream>
#include <utility>

namespace kronfilter {

/// Rx = X X^T / N and rxy = X y / N.
struct Moments {
    Matrix rxx;
    Vector rxy;
    Index samples = 0;
};

inline Moments empirical_moments(const DataSet& d) {
    const double inv_n = 1.0 / static_cast<double>(d.samples());
    Moments m;
    m.rxx = Matrix::Zero(d.dim(), d.dim());
    m.rxx.selfadjointView<Eigen::Lower>().rankUpdate(d.x, inv_n);
    m.rxx.triangularView<Eigen::StrictlyUpper>() = m.rxx.transpose();
    m.rxy = inv_n * (d.x * d.y);
    m.samples = d.samples();
    return m;
}

/// (Rx + alpha I)^{-1} rxy, via Cholesky with a pivoted fallback.
inline Vector ridge_solve(const Moments& m, double alpha) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("ridge_solve: alpha must be finite and nonnegative");
    Matrix s = m.rxx;
    s.diagonal().array() += alpha;
    auto w = detail::solve_symmetric(s, m.rxy);
    if (!w) {
        if (alpha == 0.0)
            throw NumericalError("ridge_solve: covariance singular; supply alpha > 0");
        throw NumericalError("ridge_solve: singular system at alpha=" + std::to_string(alpha));
    }
    return w->col(0);
}

/// Mean squared PRESS residual (1/N) sum_n [(y_n - x_n^T w) / (1 - h_n)]^2 with
/// h_n = x_n^T (X X^T + N alpha I)^{-1} x_n. This is the exact leave-one-out
/// error of the ridge problem whose penalty stays N alpha ||w||^2 on N-1 samples.
inline double press_loocv(const DataSet& d, double alpha) {
    if (!(alpha > 0.0))
        throw std::invalid_argument("press_loocv: alpha must be positive");
    const Index n = d.samples();
    const double nd = static_cast<double>(n);

    Matrix gram = Matrix::Zero(d.dim(), d.dim());
    gram.selfadjointView<Eigen::Lower>().rankUpdate(d.x);
    gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
    gram.diagonal().array() += nd * alpha;

    Eigen::LLT<Matrix> llt(gram);
    if (llt.info() != Eigen::Success)
        throw NumericalError("press_loocv: regularized Gram matrix is not positive definite");
    const Vector w = llt.solve(d.x * d.y);
    const Matrix whitened = llt.matrixL().solve(d.x);
    const Vector leverage = whitened.colwise().squaredNorm().transpose();
    const Vector residual = d.y - d.x.transpose() * w;

    double acc = 0.0;
    for (Index i = 0; i < n; ++i) {
        if (!(leverage(i) < 1.0))
            throw LeverageError("press_loocv: degenerate leverage at sample " + std::to_string(i));
        const double e = residual(i) / (1.0 - leverage(i));
        acc += e * e;
    }
    return acc / nd;
}

struct AlphaSelection {
    double alpha = 0.0;
    double score = 0.0;
    std::vector<SearchPoint> visited; // x is log10(alpha)
};

/// Golden-section minimization of press_loocv over log10(alpha) in [lo, hi].
inline AlphaSelection select_alpha_ridge(const DataSet& d, std::pair<double, double> bracket,
                                         double log_width_tol = 1e-3) {
    const auto [lo, hi] = bracket;
    if (!(lo > 0.0) || !(lo < hi))
        throw std::invalid_argument("select_alpha_ridge: bracket must satisfy 0 < lo < hi");
    auto objective = [&](double log_alpha) {
        const double alpha = std::pow(10.0, log_alpha);
        const double v = press_loocv(d, alpha);
        if (!std::isfinite(v)) {
            std::ostringstream os;
            os << "select_alpha_ridge: non-finite PRESS at alpha=" << alpha;
            throw NumericalError(os.str());
        }
        return v;
    };
    auto res = golden_section_minimize(objective, std::log10(lo), std::log10(hi), log_width_tol);
    return {std::clamp(std::pow(10.0, res.x), lo, hi), res.value, std::move(res.visited)};
}

} // namespace kronfilter

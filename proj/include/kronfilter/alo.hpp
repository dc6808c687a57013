#pragma once

// Approximate leave-one-out (ALO) validation for the factored ridge problem,
// the exact leave-one-out reference, and the search for alpha.
//
// The ALO error replaces each leave-one-out fit by one Gauss-Newton step from
// the full-data solution. With Â = [A^(1) A^(2)] (the Jacobian of w in the
// stacked factors) and F = Â^T X X^T Â + N alpha I:
//
//   z_n   = x_n^T Â F^{-1} Â^T x_n
//   J_ALO = (1/N) sum_n [(y_n - x_n^T w) / (1 - z_n)]^2

#include <kronfilter/als.hpp>
#include <kronfilter/golden_section.hpp>
#include <kronfilter/tensor_ops.hpp>

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <sstream>
#include <utility>
#include <vector>

namespace kronfilter {

struct AloEvaluation {
    double alpha = 0.0;
    double j_alo = 0.0;
    Vector leverages;
    Vector residuals;
};

/// F = (Â^T X)(Â^T X)^T + N alpha I.
inline Matrix build_hessian_approx(const DataSet& d, const Eigen::Ref<const Matrix>& a_hat,
                                   double alpha) {
    if (!(alpha > 0.0))
        throw std::invalid_argument("build_hessian_approx: alpha must be positive");
    if (a_hat.rows() != d.dim())
        throw DimensionError("build_hessian_approx: Â row count does not match data");
    const Matrix g = a_hat.transpose() * d.x;
    Matrix f = Matrix::Zero(g.rows(), g.rows());
    f.selfadjointView<Eigen::Lower>().rankUpdate(g);
    f.triangularView<Eigen::StrictlyUpper>() = f.transpose();
    f.diagonal().array() += static_cast<double>(d.samples()) * alpha;
    if (!f.allFinite())
        throw NumericalError("build_hessian_approx: non-finite entries");
    return f;
}

/// ALO evaluation for a fitted w whose Jacobian in the parameters is `jacobian`
/// (m x p) and whose penalty is alpha ||params||^2.
inline AloEvaluation alo_from_jacobian(const DataSet& d, const Eigen::Ref<const Matrix>& jacobian,
                                       const Eigen::Ref<const Vector>& w, double alpha) {
    if (w.size() != d.dim())
        throw DimensionError("alo: w length does not match data dimension");
    const Matrix f = build_hessian_approx(d, jacobian, alpha);
    Eigen::LLT<Matrix> llt(f);
    if (llt.info() != Eigen::Success)
        throw NumericalError("alo: approximate Hessian is not positive definite");

    AloEvaluation out;
    out.alpha = alpha;
    const Matrix whitened = llt.matrixL().solve(jacobian.transpose() * d.x);
    out.leverages = whitened.colwise().squaredNorm().transpose();
    out.residuals = d.y - d.x.transpose() * w;

    double acc = 0.0;
    for (Index n = 0; n < d.samples(); ++n) {
        if (!(out.leverages(n) < 1.0)) {
            std::ostringstream os;
            os << "leverage ≥ 1: α too small or N too small for shape (sample " << n
               << ", alpha=" << alpha << ")";
            throw LeverageError(os.str());
        }
        const double e = out.residuals(n) / (1.0 - out.leverages(n));
        acc += e * e;
    }
    out.j_alo = acc / static_cast<double>(d.samples());
    return out;
}

/// ALO metric at an ALS solution; Â is built from the converged factors.
inline AloEvaluation alo_metric(const DataSet& d, const KroneckerShape& shape,
                                const AlsResult& result) {
    const Matrix a_hat = build_concat_factor_matrix(result.factors, shape);
    const Vector w = (result.factors.u1 * result.factors.u2.transpose()).reshaped();
    return alo_from_jacobian(d, a_hat, w, result.alpha);
}

inline AloEvaluation alo_metric(const DataSet& d, const AlsResult& result) {
    const FactorPair& f = result.factors;
    return alo_metric(d, KroneckerShape{f.u1.rows(), f.u2.rows(), f.u1.cols()}, result);
}

/// Exact leave-one-out error: N full ALS solves, each warm-started from the
/// full-data solution. The left-out problem keeps the 1/N data normalization,
/// so on N-1 samples the solver sees alpha N / (N - 1).
inline double exact_lo_metric(const DataSet& d, const KroneckerShape& shape, double alpha,
                              const AlsConfig& cfg) {
    const Index n = d.samples();
    if (n < 2)
        throw std::invalid_argument("exact_lo_metric: at least two samples are required");
    const AlsResult full = als_run(d, shape, alpha, cfg);
    const double scaled_alpha = alpha * static_cast<double>(n) / static_cast<double>(n - 1);
    // Zero is a fixed point of ALS, so a zero full solution is no use as a warm start.
    std::optional<FactorPair> init;
    if (!full.zero_solution)
        init = full.factors;

    double acc = 0.0;
    for (Index i = 0; i < n; ++i) {
        const DataSet rest = d.without(i);
        const AlsResult loo = als_run(rest, shape, scaled_alpha, cfg, init);
        const Vector w = (loo.factors.u1 * loo.factors.u2.transpose()).reshaped();
        const double e = d.y(i) - d.x.col(i).dot(w);
        acc += e * e;
    }
    return acc / static_cast<double>(n);
}

enum class SearchMode { golden, grid };

struct AloSearchOptions {
    SearchMode mode = SearchMode::golden;
    double log_width_tol = 1e-3;
    int grid_points = 25;
    bool warm_start = true;
};

struct AlphaSearchResult {
    double alpha_hat = 0.0;
    double j_alo_at_min = std::numeric_limits<double>::infinity();
    std::vector<AloEvaluation> evaluations;
    AlsResult final_solution;
    int failed_evaluations = 0;
};

/// Minimize J_ALO over log10(alpha) in [lo, hi]. Each candidate runs ALS
/// (warm-started from the nearest evaluated alpha when enabled) and then the
/// ALO metric; candidates whose leverage reaches 1 count as +inf.
inline AlphaSearchResult select_alpha_alo(const DataSet& d, const KroneckerShape& shape,
                                          const AlsConfig& cfg, std::pair<double, double> bracket,
                                          const AloSearchOptions& opts = {}) {
    const auto [lo, hi] = bracket;
    if (!(lo > 0.0) || !(lo < hi))
        throw std::invalid_argument("select_alpha_alo: bracket must satisfy 0 < lo < hi");
    const Moments moments = empirical_moments(d);

    AlphaSearchResult out;
    struct Visited {
        double log_alpha;
        FactorPair factors;
    };
    std::vector<Visited> visited;

    auto evaluate = [&](double log_alpha) {
        const double alpha = std::clamp(std::pow(10.0, log_alpha), lo, hi);
        std::optional<FactorPair> init;
        if (opts.warm_start && !visited.empty()) {
            const Visited* nearest = &visited.front();
            for (const auto& v : visited)
                if (std::abs(v.log_alpha - log_alpha) < std::abs(nearest->log_alpha - log_alpha))
                    nearest = &v;
            // A zero solution is a fixed point of ALS, so never start from one.
            if (nearest->factors.u1.squaredNorm() > 0.0 && nearest->factors.u2.squaredNorm() > 0.0)
                init = nearest->factors;
        }
        AlsResult sol = als_run(d, moments, shape, std::max(alpha, kMinAlsAlpha), cfg, init);
        visited.push_back({log_alpha, sol.factors});
        try {
            AloEvaluation ev = alo_metric(d, shape, sol);
            const double j = ev.j_alo;
            out.evaluations.push_back(std::move(ev));
            // Ties go to the larger alpha.
            if (j < out.j_alo_at_min || (j == out.j_alo_at_min && alpha > out.alpha_hat)) {
                out.j_alo_at_min = j;
                out.alpha_hat = alpha;
                out.final_solution = std::move(sol);
            }
            return j;
        } catch (const LeverageError&) {
            ++out.failed_evaluations;
            return std::numeric_limits<double>::infinity();
        }
    };

    const double a = std::log10(lo), b = std::log10(hi);
    if (opts.mode == SearchMode::golden) {
        golden_section_minimize(evaluate, a, b, opts.log_width_tol);
    } else {
        for (double x : linspace(a, b, opts.grid_points))
            evaluate(x);
    }

    if (out.evaluations.empty()) {
        std::ostringstream os;
        os << "select_alpha_alo: every evaluation failed in bracket [" << lo << ", " << hi << "]";
        throw LeverageError(os.str());
    }
    return out;
}

} // namespace kronfilter

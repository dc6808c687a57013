#pragma once

// Alternating least squares for
//   min (1/N) ||y - X^T vec(U1 U2^T)||^2 + alpha (||U1||_F^2 + ||U2||_F^2).

#include <kronfilter/core.hpp>
#include <kronfilter/linsolve.hpp>
#include <kronfilter/ridge.hpp>
#include <kronfilter/tensor_ops.hpp>

#include <Eigen/SVD>

#include <optional>
#include <sstream>
#include <vector>

namespace kronfilter {

struct AlsConfig {
    int iterations = 20;
    double rel_tol = 1e-8;
    bool record_trace = false;

    void validate() const {
        if (iterations < 1)
            throw std::invalid_argument("AlsConfig: iterations must be at least 1");
        if (!(rel_tol >= 0.0))
            throw std::invalid_argument("AlsConfig: rel_tol must be nonnegative");
    }
};

/// Smallest alpha accepted by the solver; the subproblems need alpha > 0.
inline constexpr double kMinAlsAlpha = 1e-12;

struct AlsResult {
    FactorPair factors;
    double alpha = 0.0;
    bool converged = false;
    /// Objective after each half-iteration (only when AlsConfig::record_trace).
    std::vector<double> objective_trace;
    double initial_objective = 0.0;
    double final_objective = 0.0;
    int subproblem_solves = 0;
    /// Set when the zero filter was certified optimal and no iterations ran.
    bool zero_solution = false;
};

/// Objective with separate penalties on the two factors.
inline double objective(const DataSet& d, const FactorPair& fp, double alpha1, double alpha2) {
    const Vector w = (fp.u1 * fp.u2.transpose()).reshaped();
    if (w.size() != d.dim())
        throw DimensionError("objective: factor pair does not match data dimension");
    const double fit = (d.y - d.x.transpose() * w).squaredNorm() / static_cast<double>(d.samples());
    return fit + alpha1 * fp.u1.squaredNorm() + alpha2 * fp.u2.squaredNorm();
}

inline double objective(const DataSet& d, const FactorPair& fp, double alpha) {
    return objective(d, fp, alpha, alpha);
}

/// Balanced rank-r split of mat(w_full): U1 = Q diag(sqrt s), U2 = V diag(sqrt s).
inline FactorPair svd_init(const Eigen::Ref<const Vector>& w_full, const KroneckerShape& shape) {
    shape.validate();
    if (w_full.size() != shape.m())
        throw DimensionError("svd_init: vector length does not match m1*m2");
    const Matrix wm = mat(w_full, shape.m1, shape.m2);
    Eigen::JacobiSVD<Matrix> svd(wm, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector root = svd.singularValues().head(shape.r).cwiseSqrt();
    return {svd.matrixU().leftCols(shape.r) * root.asDiagonal(),
            svd.matrixV().leftCols(shape.r) * root.asDiagonal()};
}

/// Exact minimization over factor k with the other held fixed, using
/// R^(k) = A^T Rx A and r^(k) = A^T rxy.
inline FactorPair als_subproblem(const Moments& m, const FactorPair& fp,
                                 const KroneckerShape& shape, Side k, double alpha) {
    if (!(alpha > 0.0))
        throw std::invalid_argument("als_subproblem: alpha must be positive");
    const StructuredFactorMatrix a = build_factor_matrix(k, fp, shape);
    Matrix lhs = a.a.transpose() * m.rxx * a.a;
    lhs.diagonal().array() += alpha;
    const Vector rhs = a.a.transpose() * m.rxy;

    auto u = detail::solve_symmetric(lhs, rhs);
    if (!u) {
        std::ostringstream os;
        os << "als_subproblem: non-finite solve for factor " << to_string(k) << " at alpha="
           << alpha;
        throw NumericalError(os.str());
    }
    FactorPair out = fp;
    out.factor(k) = u->col(0).reshaped(shape.side_length(k), shape.r);
    return out;
}

inline FactorPair als_subproblem(const DataSet& d, const FactorPair& fp,
                                 const KroneckerShape& shape, Side k, double alpha) {
    return als_subproblem(empirical_moments(d), fp, shape, k, alpha);
}

/// True when W = 0 minimizes the nuclear-norm form of the objective, i.e. when
/// ||mat(rxy)||_2 <= alpha. The factored problem then has the global minimizer U = 0.
inline bool zero_is_optimal(const Moments& m, const KroneckerShape& shape, double alpha) {
    const Matrix r = mat(m.rxy, shape.m1, shape.m2);
    Eigen::JacobiSVD<Matrix> svd(r);
    return svd.singularValues()(0) <= alpha;
}

inline AlsResult als_run(const DataSet& d, const Moments& m, const KroneckerShape& shape,
                         double alpha, const AlsConfig& cfg,
                         const std::optional<FactorPair>& init = std::nullopt) {
    shape.validate();
    cfg.validate();
    if (!(alpha >= kMinAlsAlpha) || !std::isfinite(alpha))
        throw std::invalid_argument("als_run: alpha must be at least 1e-12");
    if (d.dim() != shape.m())
        throw DimensionError("als_run: data dimension does not match shape");

    AlsResult res;
    res.alpha = alpha;

    if (zero_is_optimal(m, shape, alpha)) {
        res.factors = FactorPair::zeros(shape);
        res.initial_objective = res.final_objective = objective(d, res.factors, alpha);
        res.converged = true;
        res.zero_solution = true;
        return res;
    }

    if (init) {
        init->validate(shape);
        res.factors = *init;
    } else {
        res.factors = svd_init(ridge_solve(m, alpha), shape);
    }

    double previous = objective(d, res.factors, alpha);
    res.initial_objective = previous;
    double current = previous;
    for (int it = 0; it < cfg.iterations; ++it) {
        for (Side k : {Side::one, Side::two}) {
            res.factors = als_subproblem(m, res.factors, shape, k, alpha);
            ++res.subproblem_solves;
            if (cfg.record_trace || k == Side::two) {
                current = objective(d, res.factors, alpha);
                if (cfg.record_trace)
                    res.objective_trace.push_back(current);
            }
        }
        const double decrease = previous - current;
        if (cfg.rel_tol > 0.0 && decrease <= cfg.rel_tol * std::abs(previous)) {
            res.converged = true;
            break;
        }
        previous = current;
    }
    res.final_objective = current;
    return res;
}

inline AlsResult als_run(const DataSet& d, const KroneckerShape& shape, double alpha,
                         const AlsConfig& cfg,
                         const std::optional<FactorPair>& init = std::nullopt) {
    return als_run(d, empirical_moments(d), shape, alpha, cfg, init);
}

} // namespace kronfilter

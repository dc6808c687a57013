#pragma once

// Self-checks behind `kronfilter validate`: closed-form leave-one-out
// quantities against brute-force re-solves.

#include <kronfilter/alo.hpp>
#include <kronfilter/experiment.hpp>
#include <kronfilter/ridge.hpp>

#include <Eigen/QR>

#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace kronfilter {

/// Leave-one-out ridge error from N independent least-squares solves of
/// [X_{-n}^T; sqrt(N alpha) I] w = [y_{-n}; 0].
inline double brute_force_ridge_loo(const DataSet& d, double alpha) {
    const Index n = d.samples(), m = d.dim();
    const double root = std::sqrt(static_cast<double>(n) * alpha);
    double acc = 0.0;
    for (Index i = 0; i < n; ++i) {
        const DataSet rest = d.without(i);
        Matrix lhs(n - 1 + m, m);
        lhs << rest.x.transpose(), root * Matrix::Identity(m, m);
        Vector rhs = Vector::Zero(n - 1 + m);
        rhs.head(n - 1) = rest.y;
        const Vector w = lhs.colPivHouseholderQr().solve(rhs);
        const double e = d.y(i) - d.x.col(i).dot(w);
        acc += e * e;
    }
    return acc / static_cast<double>(n);
}

inline DataSet random_dataset(Index m, Index n, std::uint64_t seed) {
    auto engine = make_engine({seed, 0xda7aULL});
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix x(m, n);
    Vector y(n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < m; ++i)
            x(i, j) = gauss(engine);
    for (Index j = 0; j < n; ++j)
        y(j) = gauss(engine);
    return {std::move(x), std::move(y)};
}

/// The small system-identification setup used to compare ALO with exact LO.
inline ExperimentConfig alo_fidelity_config(std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.shape = KroneckerShape{3, 4, 2};
    cfg.n_samples = 120;
    cfg.snr_db = 5.0;
    cfg.ar_coeff = 0.9;
    cfg.n_realizations = 1;
    cfg.ir_source = ir::SyntheticLowRank{2, 0.5};
    cfg.seed = seed;
    return cfg;
}

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

inline CheckResult check_press_exactness(int instances = 20, std::uint64_t seed = 7,
                                         double rel_tol = 1e-9) {
    const double alphas[] = {1e-3, 1e-1, 10.0};
    std::mt19937_64 dims(seed);
    double worst = 0.0;
    for (int k = 0; k < instances; ++k) {
        const Index m = 1 + static_cast<Index>(dims() % 10);
        const Index n = m + 2 + static_cast<Index>(dims() % static_cast<std::uint64_t>(49 - m));
        const DataSet d = random_dataset(m, std::min<Index>(n, 50), seed + 1000u + k);
        for (double alpha : alphas) {
            const double fast = press_loocv(d, alpha);
            const double slow = brute_force_ridge_loo(d, alpha);
            worst = std::max(worst, std::abs(fast - slow) / slow);
        }
    }
    std::ostringstream os;
    os << "worst relative gap " << worst << " (tolerance " << rel_tol << ")";
    return {"PRESS equals brute-force leave-one-out", worst <= rel_tol, os.str()};
}

inline CheckResult check_alo_fidelity(int seeds = 10, double rel_tol = 0.10,
                                      const AlsConfig& als = {}) {
    double worst = 0.0;
    for (int s = 1; s <= seeds; ++s) {
        const ExperimentConfig cfg = alo_fidelity_config(static_cast<std::uint64_t>(s));
        const TrueFilter tf = make_true_filter(cfg.ir_source, cfg.shape, cfg.seed);
        const DataSet d = synthesize_dataset(cfg, tf, 0);
        const AlphaSearchResult sel = select_alpha_alo(d, cfg.shape, als, cfg.bracket);
        const double lo = exact_lo_metric(d, cfg.shape, sel.alpha_hat, als);
        worst = std::max(worst, std::abs(sel.j_alo_at_min - lo) / lo);
    }
    std::ostringstream os;
    os << "worst |J_ALO - J_LO| / J_LO = " << worst << " over " << seeds << " seeds (tolerance "
       << rel_tol << ")";
    return {"ALO matches exact leave-one-out at the selected alpha", worst <= rel_tol, os.str()};
}

} // namespace kronfilter

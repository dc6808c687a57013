#pragma once

// Monte Carlo system-identification sweeps: y(n) = h^T x(n) + e(n) with AR(1)
// input, a set of estimators per realization, and CSV output.

#include <kronfilter/alo.hpp>
#include <kronfilter/als.hpp>
#include <kronfilter/metrics.hpp>
#include <kronfilter/ridge.hpp>
#include <kronfilter/signals.hpp>

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

namespace kronfilter {

struct MethodSpec {
    enum class Kind { full_rank_press, full_rank_fixed, kron_alo, kron_fixed_alpha, kron_oracle };

    Kind kind = Kind::kron_alo;
    int r = 1;
    double alpha = 0.0;
    int grid_points = 50;

    static MethodSpec full_rank_press() { return {Kind::full_rank_press, 0, 0.0, 0}; }
    static MethodSpec full_rank_fixed(double alpha) { return {Kind::full_rank_fixed, 0, alpha, 0}; }
    static MethodSpec kron_alo(int r) { return {Kind::kron_alo, r, 0.0, 0}; }
    static MethodSpec kron_fixed_alpha(int r, double alpha) {
        return {Kind::kron_fixed_alpha, r, alpha, 0};
    }
    static MethodSpec kron_oracle(int r, int grid_points = 50) {
        return {Kind::kron_oracle, r, 0.0, grid_points};
    }

    bool structured() const { return kind != Kind::full_rank_press && kind != Kind::full_rank_fixed; }
    bool fixed_alpha() const { return kind == Kind::full_rank_fixed || kind == Kind::kron_fixed_alpha; }

    std::string name() const {
        switch (kind) {
        case Kind::full_rank_press: return "full_rank_press";
        case Kind::full_rank_fixed: return "full_rank_fixed";
        case Kind::kron_alo: return "kron_alo";
        case Kind::kron_fixed_alpha: return "kron_fixed_alpha";
        case Kind::kron_oracle: return "kron_oracle";
        }
        return "unknown";
    }
};

/// Parses "full_rank_press", "full_rank_fixed:ALPHA", "kron_alo:R",
/// "kron_fixed_alpha:R:ALPHA" and "kron_oracle:R[:GRID]".
inline MethodSpec parse_method(const std::string& text) {
    std::vector<std::string> parts;
    std::string::size_type start = 0;
    while (true) {
        const auto pos = text.find(':', start);
        parts.push_back(text.substr(start, pos - start));
        if (pos == std::string::npos)
            break;
        start = pos + 1;
    }
    auto bad = [&]() { return ParseError("invalid method spec '" + text + "'"); };
    auto as_int = [&](const std::string& s) {
        try {
            std::size_t used = 0;
            const int v = std::stoi(s, &used);
            if (used != s.size())
                throw bad();
            return v;
        } catch (const std::logic_error&) {
            throw bad();
        }
    };
    auto as_double = [&](const std::string& s) {
        try {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used != s.size())
                throw bad();
            return v;
        } catch (const std::logic_error&) {
            throw bad();
        }
    };
    const std::string& head = parts[0];
    if (head == "full_rank_press" && parts.size() == 1)
        return MethodSpec::full_rank_press();
    if (head == "full_rank_fixed" && parts.size() == 2)
        return MethodSpec::full_rank_fixed(as_double(parts[1]));
    if (head == "kron_alo" && parts.size() == 2)
        return MethodSpec::kron_alo(as_int(parts[1]));
    if (head == "kron_fixed_alpha" && parts.size() == 3)
        return MethodSpec::kron_fixed_alpha(as_int(parts[1]), as_double(parts[2]));
    if (head == "kron_oracle" && (parts.size() == 2 || parts.size() == 3))
        return MethodSpec::kron_oracle(as_int(parts[1]), parts.size() == 3 ? as_int(parts[2]) : 50);
    throw bad();
}

/// Parses "file:PATH", "lowrank:RANK:DECAY" and "sparse_exp:DELAY:DECAY".
inline IrSource parse_ir_source(const std::string& text) {
    auto bad = [&]() { return ParseError("invalid impulse-response source '" + text + "'"); };
    if (text.rfind("file:", 0) == 0)
        return ir::File{text.substr(5)};
    const auto c1 = text.find(':');
    const auto c2 = c1 == std::string::npos ? c1 : text.find(':', c1 + 1);
    if (c2 == std::string::npos)
        throw bad();
    const std::string kind = text.substr(0, c1);
    try {
        const std::string a = text.substr(c1 + 1, c2 - c1 - 1), b = text.substr(c2 + 1);
        if (kind == "lowrank")
            return ir::SyntheticLowRank{std::stoi(a), std::stod(b)};
        if (kind == "sparse_exp")
            return ir::SyntheticSparseExponential{std::stoi(a), std::stod(b)};
    } catch (const std::logic_error&) {
        throw bad();
    }
    throw bad();
}

struct ExperimentConfig {
    KroneckerShape shape{8, 10, 1};
    Index n_samples = 200;
    /// +inf disables the noise.
    double snr_db = 5.0;
    double ar_coeff = 0.9;
    int n_realizations = 8;
    IrSource ir_source = ir::SyntheticLowRank{3, 0.5};
    std::vector<MethodSpec> methods;
    std::uint64_t seed = 1;
    std::pair<double, double> bracket{1e-8, 1e2};
    AlsConfig als;
    AloSearchOptions search;
    double rank_tol = 1e-6;
    /// Wall time is written as 0 unless enabled, which keeps output reproducible.
    bool record_wall_time = false;
    /// 0: KRONFILTER_THREADS, or the hardware concurrency when that is unset or 0.
    int threads = 0;

    void validate() const {
        shape.validate();
        if (n_samples < 1)
            throw std::invalid_argument("ExperimentConfig: n_samples must be positive");
        if (n_realizations < 1)
            throw std::invalid_argument("ExperimentConfig: n_realizations must be positive");
        if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity())
            throw std::invalid_argument("ExperimentConfig: snr_db must be a number or +inf");
        if (!(std::abs(ar_coeff) < 1.0))
            throw std::invalid_argument("ExperimentConfig: ar_coeff must lie in (-1, 1)");
        if (!(bracket.first > 0.0) || !(bracket.first < bracket.second))
            throw std::invalid_argument("ExperimentConfig: bracket must satisfy 0 < lo < hi");
        for (const auto& mspec : methods)
            if (mspec.structured() && (mspec.r < 1 || mspec.r > std::min(shape.m1, shape.m2)))
                throw std::invalid_argument("ExperimentConfig: method rank out of range for " +
                                            mspec.name());
        als.validate();
    }
};

/// x from an AR(1) stream through a delay line, y = h^T x + e with noise power
/// set against the realized clean-output power.
inline DataSet synthesize_dataset(const ExperimentConfig& cfg, const TrueFilter& tf,
                                  std::uint64_t realization_seed) {
    const Index m = cfg.shape.m();
    if (tf.h.size() != m)
        throw DimensionError("synthesize_dataset: filter length does not match shape");
    const Index n = cfg.n_samples;

    auto key_engine = make_engine({cfg.seed, realization_seed, 0x1e9u});
    const std::uint64_t input_seed = key_engine();
    const std::uint64_t noise_seed = key_engine();

    const Vector stream = ar1_generate(n + m - 1, cfg.ar_coeff, input_seed,
                                       default_burn_in(cfg.ar_coeff));
    Matrix x = embed_delay_line(stream, m, n);
    Vector y = x.transpose() * tf.h;

    if (std::isfinite(cfg.snr_db)) {
        const double clean_power = y.squaredNorm() / static_cast<double>(n);
        const double sigma = std::sqrt(clean_power / std::pow(10.0, cfg.snr_db / 10.0));
        auto engine = make_engine({noise_seed});
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (Index i = 0; i < n; ++i)
            y(i) += sigma * gauss(engine);
    }
    return {std::move(x), std::move(y)};
}

enum class RowKind { detail, summary };

/// One CSV row. Detail rows describe one realization; summary rows average the
/// successful detail rows of a (method, r, alpha) cell, so rank_hat may be fractional.
struct SweepRecord {
    RowKind kind = RowKind::detail;
    std::string method;
    int r = 0;
    double alpha = 0.0;
    double misalignment_db = 0.0;
    double rank_hat = 0.0;
    double nuclear_norm = 0.0;
    std::uint64_t realization_seed = 0;
    double wall_time_s = 0.0;
    std::string error;
};

struct MethodOutcome {
    double alpha = 0.0;
    Matrix w_mat;
};

/// Runs one estimator on one dataset. `tf` is only consulted by the oracle.
inline MethodOutcome estimate_filter(const MethodSpec& method, const DataSet& data,
                                     const TrueFilter& tf, const ExperimentConfig& cfg) {
    const Index m1 = cfg.shape.m1, m2 = cfg.shape.m2;
    MethodOutcome out;
    switch (method.kind) {
    case MethodSpec::Kind::full_rank_press: {
        const AlphaSelection sel = select_alpha_ridge(data, cfg.bracket, cfg.search.log_width_tol);
        out.alpha = sel.alpha;
        out.w_mat = mat(ridge_solve(empirical_moments(data), sel.alpha), m1, m2);
        break;
    }
    case MethodSpec::Kind::full_rank_fixed:
        out.alpha = method.alpha;
        out.w_mat = mat(ridge_solve(empirical_moments(data), method.alpha), m1, m2);
        break;
    case MethodSpec::Kind::kron_alo: {
        const KroneckerShape shape{m1, m2, method.r};
        const AlphaSearchResult sel = select_alpha_alo(data, shape, cfg.als, cfg.bracket, cfg.search);
        out.alpha = sel.alpha_hat;
        out.w_mat = reconstruct(sel.final_solution.factors).w_mat;
        break;
    }
    case MethodSpec::Kind::kron_fixed_alpha: {
        const KroneckerShape shape{m1, m2, method.r};
        const AlsResult res = als_run(data, shape, method.alpha, cfg.als);
        out.alpha = method.alpha;
        out.w_mat = reconstruct(res.factors).w_mat;
        break;
    }
    case MethodSpec::Kind::kron_oracle: {
        const KroneckerShape shape{m1, m2, method.r};
        const Moments moments = empirical_moments(data);
        double best = std::numeric_limits<double>::infinity();
        for (double alpha : logspace(cfg.bracket.first, cfg.bracket.second, method.grid_points)) {
            const AlsResult res = als_run(data, moments, shape, alpha, cfg.als);
            Matrix w = reconstruct(res.factors).w_mat;
            const double mis = misalignment_db(w, tf.h_mat);
            if (mis < best) {
                best = mis;
                out.alpha = alpha;
                out.w_mat = std::move(w);
            }
        }
        break;
    }
    }
    return out;
}

/// KRONFILTER_THREADS if set and positive, else the hardware concurrency.
inline int resolve_thread_count(int requested) {
    int n = requested;
    if (n <= 0) {
        if (const char* env = std::getenv("KRONFILTER_THREADS")) {
            char* end = nullptr;
            const long v = std::strtol(env, &end, 10);
            if (end != env && v > 0)
                n = static_cast<int>(v);
        }
    }
    if (n <= 0)
        n = static_cast<int>(std::thread::hardware_concurrency());
    return std::max(n, 1);
}

inline std::vector<SweepRecord> summarize(const std::vector<SweepRecord>& details,
                                          std::uint64_t seed) {
    struct Acc {
        SweepRecord row;
        int ok = 0;
        int failed = 0;
    };
    std::vector<Acc> cells;
    std::map<std::tuple<std::string, int, double>, std::size_t> index;
    for (const auto& d : details) {
        const bool fixed = d.method == "full_rank_fixed" || d.method == "kron_fixed_alpha";
        const auto key = std::make_tuple(d.method, d.r, fixed ? d.alpha : 0.0);
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(key, cells.size()).first;
            Acc acc;
            acc.row.kind = RowKind::summary;
            acc.row.method = d.method;
            acc.row.r = d.r;
            acc.row.realization_seed = seed;
            cells.push_back(acc);
        }
        Acc& acc = cells[it->second];
        if (!d.error.empty()) {
            ++acc.failed;
            continue;
        }
        ++acc.ok;
        acc.row.alpha += d.alpha;
        acc.row.misalignment_db += d.misalignment_db;
        acc.row.rank_hat += d.rank_hat;
        acc.row.nuclear_norm += d.nuclear_norm;
        acc.row.wall_time_s += d.wall_time_s;
    }
    std::vector<SweepRecord> out;
    for (auto& acc : cells) {
        if (acc.ok > 0) {
            const double k = acc.ok;
            acc.row.alpha /= k;
            acc.row.misalignment_db /= k;
            acc.row.rank_hat /= k;
            acc.row.nuclear_norm /= k;
            acc.row.wall_time_s /= k;
        } else {
            acc.row.alpha = acc.row.misalignment_db = acc.row.rank_hat = acc.row.nuclear_norm =
                std::numeric_limits<double>::quiet_NaN();
        }
        if (acc.failed > 0)
            acc.row.error = "failed " + std::to_string(acc.failed) + " of " +
                            std::to_string(acc.failed + acc.ok) + " realizations";
        out.push_back(std::move(acc.row));
    }
    return out;
}

/// Detail rows (realization-major, methods in configured order) followed by
/// summary rows. Output does not depend on the number of threads.
inline std::vector<SweepRecord> run_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    const TrueFilter tf = make_true_filter(cfg.ir_source, cfg.shape, cfg.seed);
    const auto n_real = static_cast<std::size_t>(cfg.n_realizations);
    std::vector<std::vector<SweepRecord>> per_realization(n_real);

    auto run_one = [&](std::size_t i) {
        const std::uint64_t rseed = i;
        std::vector<SweepRecord> rows;
        DataSet data;
        std::string data_error;
        try {
            data = synthesize_dataset(cfg, tf, rseed);
        } catch (const std::exception& e) {
            data_error = e.what();
        }
        for (const auto& method : cfg.methods) {
            SweepRecord rec;
            rec.method = method.name();
            rec.r = method.r;
            rec.alpha = method.alpha;
            rec.realization_seed = rseed;
            const auto start = std::chrono::steady_clock::now();
            try {
                if (!data_error.empty())
                    throw std::runtime_error(data_error);
                const MethodOutcome est = estimate_filter(method, data, tf, cfg);
                rec.alpha = est.alpha;
                rec.misalignment_db = misalignment_db(est.w_mat, tf.h_mat);
                rec.rank_hat = rank_estimate(est.w_mat, cfg.rank_tol);
                rec.nuclear_norm = nuclear_norm(est.w_mat);
            } catch (const std::exception& e) {
                rec.error = e.what();
                rec.misalignment_db = rec.rank_hat = rec.nuclear_norm =
                    std::numeric_limits<double>::quiet_NaN();
            }
            if (cfg.record_wall_time)
                rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                                start)
                                      .count();
            rows.push_back(std::move(rec));
        }
        per_realization[i] = std::move(rows);
    };

    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(resolve_thread_count(cfg.threads)), n_real);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n_real; ++i)
            run_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < workers; ++t)
            pool.emplace_back([&]() {
                for (std::size_t i = next++; i < n_real; i = next++)
                    run_one(i);
            });
        for (auto& th : pool)
            th.join();
    }

    std::vector<SweepRecord> out;
    for (auto& rows : per_realization)
        for (auto& r : rows)
            out.push_back(std::move(r));
    std::vector<SweepRecord> summary = summarize(out, cfg.seed);
    out.insert(out.end(), summary.begin(), summary.end());
    return out;
}

inline constexpr const char* kCsvHeader =
    "kind,method,r,alpha,misalignment_db,rank_hat,nuclear_norm,seed,wall_time_s,error";

inline std::string format_double(double v) {
    if (std::isnan(v))
        return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

inline void write_csv(std::ostream& os, const std::vector<SweepRecord>& rows) {
    os << kCsvHeader << '\n';
    for (const auto& r : rows) {
        os << (r.kind == RowKind::detail ? "detail" : "summary") << ',' << csv_escape(r.method)
           << ',' << r.r << ',' << format_double(r.alpha) << ','
           << format_double(r.misalignment_db) << ',' << format_double(r.rank_hat) << ','
           << format_double(r.nuclear_norm) << ',' << r.realization_seed << ','
           << format_double(r.wall_time_s) << ',' << csv_escape(r.error) << '\n';
    }
}

/// Fixed-alpha grid for every rank plus the full-rank ridge at the same alphas.
inline std::vector<MethodSpec> alpha_sweep_methods(const std::vector<int>& ranks,
                                                   std::pair<double, double> bracket,
                                                   int grid_points) {
    std::vector<MethodSpec> out;
    for (double alpha : logspace(bracket.first, bracket.second, grid_points)) {
        out.push_back(MethodSpec::full_rank_fixed(alpha));
        for (int r : ranks)
            out.push_back(MethodSpec::kron_fixed_alpha(r, alpha));
    }
    return out;
}

/// Full-rank PRESS baseline plus ALO, fixed-alpha and oracle estimators per rank.
inline std::vector<MethodSpec> rank_sweep_methods(const std::vector<int>& ranks,
                                                  double fixed_alpha, int oracle_grid) {
    std::vector<MethodSpec> out{MethodSpec::full_rank_press()};
    for (int r : ranks) {
        out.push_back(MethodSpec::kron_alo(r));
        out.push_back(MethodSpec::kron_fixed_alpha(r, fixed_alpha));
        out.push_back(MethodSpec::kron_oracle(r, oracle_grid));
    }
    return out;
}

} // namespace kronfilter

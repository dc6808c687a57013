// kronfilter: Monte Carlo sweeps for Kronecker-structured filter estimation.
//
//   kronfilter [--config FILE] sweep-alpha [options]
//   kronfilter [--config FILE] sweep-rank  [options]
//   kronfilter validate [options]

#include <kronfilter/kronfilter.hpp>
#include <kronfilter/validation.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace {

using namespace kronfilter;

struct Options {
    int m1 = 8;
    int m2 = 10;
    int n_samples = 200;
    std::string snr_db = "5";
    double ar_coeff = 0.9;
    int n_realizations = 8;
    std::string ir_source = "lowrank:3:0.5";
    std::uint64_t seed = 1;
    double alpha_lo = 1e-8;
    double alpha_hi = 1e2;
    int als_iterations = 20;
    double als_rel_tol = 1e-8;
    std::string search = "golden";
    int search_grid_points = 25;
    bool no_warm_start = false;
    double rank_tol = 1e-6;
    bool timing = false;
    int threads = 0;
    std::string output = "-";

    // sweep-alpha
    std::vector<int> alpha_ranks;
    int alpha_points = 25;

    // sweep-rank
    std::vector<int> rank_ranks;
    double fixed_alpha = 1e-8;
    int oracle_grid = 50;
    std::vector<std::string> methods;

    // validate
    int press_instances = 20;
    int alo_seeds = 10;
};

double parse_snr(const std::string& s) {
    if (s == "inf" || s == "+inf" || s == "none")
        return std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size())
        throw ParseError("invalid snr-db '" + s + "'");
    return v;
}

ExperimentConfig base_config(const Options& o) {
    ExperimentConfig cfg;
    cfg.shape = KroneckerShape{o.m1, o.m2, 1};
    cfg.n_samples = o.n_samples;
    cfg.snr_db = parse_snr(o.snr_db);
    cfg.ar_coeff = o.ar_coeff;
    cfg.n_realizations = o.n_realizations;
    cfg.ir_source = parse_ir_source(o.ir_source);
    cfg.seed = o.seed;
    cfg.bracket = {o.alpha_lo, o.alpha_hi};
    cfg.als.iterations = o.als_iterations;
    cfg.als.rel_tol = o.als_rel_tol;
    cfg.search.mode = o.search == "grid" ? SearchMode::grid : SearchMode::golden;
    cfg.search.grid_points = o.search_grid_points;
    cfg.search.warm_start = !o.no_warm_start;
    cfg.rank_tol = o.rank_tol;
    cfg.record_wall_time = o.timing;
    cfg.threads = o.threads;
    return cfg;
}

std::vector<int> all_ranks(const ExperimentConfig& cfg) {
    std::vector<int> r(static_cast<std::size_t>(std::min(cfg.shape.m1, cfg.shape.m2)));
    std::iota(r.begin(), r.end(), 1);
    return r;
}

int emit(const ExperimentConfig& cfg, const std::string& output) {
    const auto rows = run_sweep(cfg);
    if (output == "-") {
        write_csv(std::cout, rows);
    } else {
        std::ofstream out(output, std::ios::binary);
        if (!out) {
            std::cerr << "kronfilter: cannot write " << output << '\n';
            return 1;
        }
        write_csv(out, rows);
    }
    return 0;
}

void add_experiment_options(CLI::App& app, Options& o) {
    app.add_option("--m1", o.m1, "Rows of the filter matrix")->check(CLI::PositiveNumber);
    app.add_option("--m2", o.m2, "Columns of the filter matrix")->check(CLI::PositiveNumber);
    app.add_option("--n-samples", o.n_samples, "Samples per realization")->check(CLI::PositiveNumber);
    app.add_option("--snr-db", o.snr_db, "Output SNR in dB, or 'inf' for no noise");
    app.add_option("--ar-coeff", o.ar_coeff, "AR(1) input coefficient")->check(CLI::Range(-0.999999, 0.999999));
    app.add_option("--n-realizations", o.n_realizations, "Monte Carlo realizations")->check(CLI::PositiveNumber);
    app.add_option("--ir-source", o.ir_source,
                   "Impulse response: file:PATH, lowrank:RANK:DECAY or sparse_exp:DELAY:DECAY");
    app.add_option("--seed", o.seed, "Experiment seed");
    app.add_option("--alpha-lo", o.alpha_lo, "Lower end of the alpha bracket")->check(CLI::PositiveNumber);
    app.add_option("--alpha-hi", o.alpha_hi, "Upper end of the alpha bracket")->check(CLI::PositiveNumber);
    app.add_option("--als-iterations", o.als_iterations, "ALS outer iterations")->check(CLI::PositiveNumber);
    app.add_option("--als-rel-tol", o.als_rel_tol, "ALS early-stop threshold")->check(CLI::NonNegativeNumber);
    app.add_option("--search", o.search, "Alpha search for kron_alo")
        ->check(CLI::IsMember({"golden", "grid"}));
    app.add_option("--search-grid-points", o.search_grid_points, "Points for --search grid")
        ->check(CLI::PositiveNumber);
    app.add_flag("--no-warm-start", o.no_warm_start, "Cold-start ALS for every alpha candidate");
    app.add_option("--rank-tol", o.rank_tol, "Relative singular-value threshold for rank")
        ->check(CLI::PositiveNumber);
    app.add_flag("--timing", o.timing, "Record wall time per row (output is then not reproducible)");
    app.add_option("--threads", o.threads, "Realization parallelism (0: KRONFILTER_THREADS or all cores)")
        ->check(CLI::NonNegativeNumber);
    app.add_option("-o,--output", o.output, "CSV output path ('-' for stdout)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Low-rank Kronecker filter estimation with automatic regularization"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "Key-value config file (TOML/INI); keys are option names");

    Options o;
    add_experiment_options(app, o);

    auto* sweep_alpha = app.add_subcommand("sweep-alpha", "Fixed-alpha grid for a set of ranks");
    sweep_alpha->add_option("--ranks", o.alpha_ranks, "Construction ranks (default 1,2,4 and the maximum)")
        ->delimiter(',');
    sweep_alpha->add_option("--alpha-points", o.alpha_points, "Log-spaced alpha values")
        ->check(CLI::PositiveNumber);

    auto* sweep_rank = app.add_subcommand("sweep-rank", "Estimators versus construction rank");
    sweep_rank->add_option("--ranks", o.rank_ranks, "Construction ranks (default 1..min(m1,m2))")
        ->delimiter(',');
    sweep_rank->add_option("--fixed-alpha", o.fixed_alpha, "Alpha of the kron_fixed_alpha method")
        ->check(CLI::PositiveNumber);
    sweep_rank->add_option("--oracle-grid", o.oracle_grid, "Alpha grid size of the oracle")
        ->check(CLI::PositiveNumber);
    sweep_rank->add_option("--methods", o.methods,
                           "Explicit method list instead of the rank sweep, e.g. kron_alo:4")
        ->delimiter(',');

    auto* validate = app.add_subcommand("validate", "Check leave-one-out shortcuts against re-solves");
    validate->add_option("--press-instances", o.press_instances, "Random PRESS instances")
        ->check(CLI::PositiveNumber);
    validate->add_option("--alo-seeds", o.alo_seeds, "Seeds for the ALO comparison")
        ->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) {
            AlsConfig als;
            als.iterations = o.als_iterations;
            als.rel_tol = o.als_rel_tol;
            const CheckResult checks[] = {check_press_exactness(o.press_instances),
                                          check_alo_fidelity(o.alo_seeds, 0.10, als)};
            bool ok = true;
            for (const auto& c : checks) {
                std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
                ok = ok && c.passed;
            }
            return ok ? 0 : 1;
        }

        ExperimentConfig cfg = base_config(o);
        if (sweep_alpha->parsed()) {
            std::vector<int> ranks = o.alpha_ranks;
            if (ranks.empty()) {
                const int top = static_cast<int>(std::min(cfg.shape.m1, cfg.shape.m2));
                for (int r : {1, 2, 4})
                    if (r < top)
                        ranks.push_back(r);
                ranks.push_back(top);
            }
            cfg.methods = alpha_sweep_methods(ranks, cfg.bracket, o.alpha_points);
        } else {
            if (!o.methods.empty()) {
                for (const auto& m : o.methods)
                    cfg.methods.push_back(parse_method(m));
            } else {
                const auto ranks = o.rank_ranks.empty() ? all_ranks(cfg) : o.rank_ranks;
                cfg.methods = rank_sweep_methods(ranks, o.fixed_alpha, o.oracle_grid);
            }
        }
        return emit(cfg, o.output);
    } catch (const std::exception& e) {
        std::cerr << "kronfilter: " << e.what() << '\n';
        return 2;
    }
}

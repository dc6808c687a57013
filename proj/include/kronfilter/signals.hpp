#pragma once

// Input signals and reference impulse responses for system-identification runs.

#include <kronfilter/core.hpp>
#include <kronfilter/tensor_ops.hpp>

#include <Eigen/QR>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace kronfilter {

/// Engine seeded from any number of 64-bit words, so independent streams can
/// be keyed by (experiment seed, realization seed, stream id).
inline std::mt19937_64 make_engine(std::initializer_list<std::uint64_t> keys) {
    std::vector<std::uint32_t> words;
    for (std::uint64_t k : keys) {
        words.push_back(static_cast<std::uint32_t>(k & 0xffffffffu));
        words.push_back(static_cast<std::uint32_t>(k >> 32));
    }
    std::seed_seq seq(words.begin(), words.end());
    return std::mt19937_64(seq);
}

/// Burn-in of about ten time constants of the AR(1) recursion. The small
/// offset keeps 1 / (1 - 0.9) = 10.000000000000002 from rounding up to 11.
inline int default_burn_in(double a) {
    return 10 * static_cast<int>(std::ceil(1.0 / (1.0 - std::abs(a)) - 1e-9));
}

/// x(n) = a x(n-1) + u(n) with unit-variance Gaussian u; the first burn_in
/// samples are discarded.
inline Vector ar1_generate(Index length, double a, std::uint64_t seed, Index burn_in) {
    if (!(std::abs(a) < 1.0))
        throw std::invalid_argument("ar1_generate: non-stationary AR coefficient");
    if (burn_in < 0 || length < 0)
        throw std::invalid_argument("ar1_generate: negative length or burn-in");
    auto engine = make_engine({seed});
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector out(length);
    double state = 0.0;
    for (Index i = 0; i < burn_in + length; ++i) {
        state = a * state + gauss(engine);
        if (i >= burn_in)
            out(i - burn_in) = state;
    }
    return out;
}

/// Delay-line embedding of the last n + m - 1 stream samples: column j holds
/// [x(t), x(t-1), ..., x(t-m+1)] for the j-th of n consecutive times t.
inline Matrix embed_delay_line(const Eigen::Ref<const Vector>& stream, Index m, Index n) {
    if (m < 1 || n < 1)
        throw std::invalid_argument("embed_delay_line: m and n must be positive");
    if (stream.size() < n + m - 1)
        throw DimensionError("embed_delay_line: stream has " + std::to_string(stream.size()) +
                             " samples, needs at least " + std::to_string(n + m - 1));
    const Index offset = stream.size() - (n + m - 1);
    Matrix out(m, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < m; ++i)
            out(i, j) = stream(offset + j + m - 1 - i);
    return out;
}

struct TrueFilter {
    Vector h;
    Matrix h_mat;
};

namespace ir {
struct File {
    std::string path;
};
/// h_mat = sum_i decay^(i-1) q_i v_i^T with random orthonormal q_i, v_i.
struct SyntheticLowRank {
    int rank = 1;
    double decay = 0.5;
};
/// Zero before `delay`, then Gaussian taps under exp(-decay (n - delay)).
struct SyntheticSparseExponential {
    int delay = 0;
    double decay = 0.1;
};
} // namespace ir

using IrSource = std::variant<ir::File, ir::SyntheticLowRank, ir::SyntheticSparseExponential>;

/// Plain text, one coefficient per line; '#' lines and blank lines are skipped.
inline Vector parse_ir_text(std::istream& in, Index expected, const std::string& origin) {
    std::vector<double> values;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#')
            continue;
        std::istringstream ls(line.substr(first));
        double v = 0.0;
        std::string rest;
        if (!(ls >> v) || (ls >> rest) || !std::isfinite(v))
            throw ParseError(origin + ":" + std::to_string(line_no) +
                             ": expected one finite coefficient, got '" + line + "'");
        values.push_back(v);
        if (static_cast<Index>(values.size()) > expected)
            throw ParseError(origin + ":" + std::to_string(line_no) + ": more than " +
                             std::to_string(expected) + " coefficients");
    }
    if (static_cast<Index>(values.size()) != expected)
        throw ParseError(origin + ":" + std::to_string(line_no) + ": expected " +
                         std::to_string(expected) + " coefficients, found " +
                         std::to_string(values.size()));
    return Eigen::Map<const Vector>(values.data(), expected);
}

inline Vector load_ir_file(const std::string& path, Index expected) {
    std::ifstream in(path);
    if (!in)
        throw ParseError(path + ": cannot open impulse-response file");
    return parse_ir_text(in, expected, path);
}

inline TrueFilter make_true_filter(const IrSource& src, const KroneckerShape& shape,
                                   std::uint64_t seed) {
    const Index m = shape.m();
    Vector h;
    if (const auto* f = std::get_if<ir::File>(&src)) {
        h = load_ir_file(f->path, m);
    } else if (const auto* lr = std::get_if<ir::SyntheticLowRank>(&src)) {
        if (lr->rank < 1 || lr->rank > std::min(shape.m1, shape.m2))
            throw std::invalid_argument("synthetic low-rank filter: rank out of range");
        if (!(lr->decay > 0.0))
            throw std::invalid_argument("synthetic low-rank filter: decay must be positive");
        auto engine = make_engine({seed, 0x1f17e5ULL});
        std::normal_distribution<double> gauss(0.0, 1.0);
        auto orthonormal = [&](Index rows) {
            Matrix g(rows, lr->rank);
            for (Index j = 0; j < g.cols(); ++j)
                for (Index i = 0; i < rows; ++i)
                    g(i, j) = gauss(engine);
            Eigen::HouseholderQR<Matrix> qr(g);
            return Matrix(qr.householderQ() * Matrix::Identity(rows, lr->rank));
        };
        const Matrix q = orthonormal(shape.m1);
        const Matrix v = orthonormal(shape.m2);
        Vector s(lr->rank);
        for (int i = 0; i < lr->rank; ++i)
            s(i) = std::pow(lr->decay, i);
        h = (q * s.asDiagonal() * v.transpose()).reshaped();
    } else {
        const auto& sp = std::get<ir::SyntheticSparseExponential>(src);
        if (sp.delay < 0 || sp.delay >= m || !(sp.decay >= 0.0))
            throw std::invalid_argument("synthetic sparse filter: invalid delay or decay");
        auto engine = make_engine({seed, 0x5ba5eULL});
        std::normal_distribution<double> gauss(0.0, 1.0);
        h = Vector::Zero(m);
        for (Index n = sp.delay; n < m; ++n)
            h(n) = gauss(engine) * std::exp(-sp.decay * static_cast<double>(n - sp.delay));
    }

    const double norm = h.norm();
    if (!(norm > 0.0))
        throw std::invalid_argument("make_true_filter: impulse response is zero");
    TrueFilter tf;
    if (std::holds_alternative<ir::File>(src))
        tf.h = h;
    else
        tf.h = h / norm;
    tf.h_mat = mat(tf.h, shape.m1, shape.m2);
    return tf;
}

} // namespace kronfilter

#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace kronfilter {

/// A single point visited by a line search.
struct SearchPoint {
    double x = 0.0;
    double value = 0.0;
};

struct LineSearchResult {
    double x = 0.0;
    double value = std::numeric_limits<double>::infinity();
    std::vector<SearchPoint> visited;
};

/// Golden-section minimization of f on [lo, hi]. Stops when the bracket is
/// narrower than width_tol. Non-finite values count as +inf. The returned
/// point is the best one visited, not the final bracket midpoint.
template <class F>
LineSearchResult golden_section_minimize(F&& f, double lo, double hi, double width_tol) {
    if (!(lo <= hi))
        throw std::invalid_argument("golden_section_minimize: lo must not exceed hi");
    if (!(width_tol > 0.0))
        throw std::invalid_argument("golden_section_minimize: width_tol must be positive");

    LineSearchResult out;
    auto eval = [&](double x) {
        double v = f(x);
        if (!std::isfinite(v))
            v = std::numeric_limits<double>::infinity();
        out.visited.push_back({x, v});
        if (v < out.value || out.visited.size() == 1) {
            out.x = x;
            out.value = v;
        }
        return v;
    };

    if (hi - lo < width_tol) {
        eval(0.5 * (lo + hi));
        return out;
    }

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = eval(c);
    double fd = eval(d);
    while (b - a >= width_tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d);
        }
    }
    return out;
}

/// n points evenly spaced on [lo, hi] (n == 1 gives the midpoint).
inline std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out;
    if (n <= 0)
        return out;
    if (n == 1)
        return {0.5 * (lo + hi)};
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        out.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
    return out;
}

/// n log-spaced values between lo and hi inclusive.
inline std::vector<double> logspace(double lo, double hi, int n) {
    std::vector<double> out = linspace(std::log10(lo), std::log10(hi), n);
    for (double& v : out)
        v = std::pow(10.0, v);
    return out;
}

} // namespace kronfilter

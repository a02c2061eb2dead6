#ifndef SJJ_UTIL_HPP
#define SJJ_UTIL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace sjj {

inline constexpr double pi = 3.14159265358979323846;

// Thrown when an adaptive scheme runs out of budget before reaching the
// requested tolerance. Carries the error actually achieved so callers can
// decide whether the partial result is still usable.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double achieved)
        : std::runtime_error(what + " (achieved error " + std::to_string(achieved) + ")"),
          achieved_error(achieved) {}
    double achieved_error;
};

// cosh overflows past ~710; beyond |t| = 350 the 2e^{-|t|} tail form is
// already exact to double precision.
inline double sech(double t) {
    const double a = std::fabs(t);
    if (a > 350.0) return 2.0 * std::exp(-a);
    return 1.0 / std::cosh(a);
}

// Wrap an angle to the canonical interval [-pi, pi).
inline double canonical_angle(double theta) {
    double w = std::remainder(theta, 2.0 * pi);
    if (w >= pi) w -= 2.0 * pi;   // remainder may return exactly +pi
    return w;
}

// Static-partition parallel loop. body(i) must write only to slot i of any
// shared output, so the assembled result is identical to the serial order.
template <class F>
void parallel_for(std::size_t n, F&& body) {
    unsigned hw = std::thread::hardware_concurrency();
    std::size_t n_threads = hw ? hw : 1;
    if (n_threads > n) n_threads = n;
    if (n < 32 || n_threads < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    const std::size_t chunk = (n + n_threads - 1) / n_threads;
    for (std::size_t t = 0; t < n_threads; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

// Spearman rank correlation; used to test monotonicity of a time series.
inline double spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 3 || y.size() != n) return 0.0;
    auto ranks = [](const std::vector<double>& v) {
        const std::size_t m = v.size();
        std::vector<std::size_t> idx(m);
        for (std::size_t i = 0; i < m; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> r(m);
        std::size_t i = 0;
        while (i < m) {
            std::size_t j = i;
            while (j + 1 < m && v[idx[j + 1]] == v[idx[i]]) ++j;
            const double avg = 0.5 * (double(i) + double(j)) + 1.0;  // ties share the mean rank
            for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
            i = j + 1;
        }
        return r;
    };
    const std::vector<double> rx = ranks(x), ry = ranks(y);
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) { mx += rx[i]; my += ry[i]; }
    mx /= double(n); my /= double(n);
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = rx[i] - mx, dy = ry[i] - my;
        sxy += dx * dy; sxx += dx * dx; syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace sjj

#endif

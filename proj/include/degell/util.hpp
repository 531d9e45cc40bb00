#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace degell {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double sign(double s) { return s > 0.0 ? 1.0 : (s < 0.0 ? -1.0 : 0.0); }

/// Surface measure of the unit sphere S^{N-1} in R^N (4*pi for N = 3).
inline double unit_sphere_area(int N) {
    if (N < 1) throw std::domain_error("unit_sphere_area: N must be >= 1");
    return 2.0 * std::pow(M_PI, 0.5 * N) / std::tgamma(0.5 * N);
}

/// Volume of the ball of radius R in R^N.
inline double ball_volume(int N, double R = 1.0) {
    return unit_sphere_area(N) / N * std::pow(R, N);
}

/// (1+x)^p for x >= 0, evaluated through log1p so very large x cannot
/// overflow the intermediate 1+x.
inline double pow1p(double x, double p) { return std::exp(p * std::log1p(x)); }

/// (1+x)^p - 1 for x >= 0 without cancellation near x = 0 or p = 0.
inline double pow1pm1(double x, double p) { return std::expm1(p * std::log1p(x)); }

/// \int_a^b r^{p-1} dr, stable when b-a << a. Requires 0 <= a <= b.
/// p = 0 gives log(b/a).
inline double power_integral(double a, double b, double p) {
    if (!(a >= 0.0) || !(b >= a)) throw std::domain_error("power_integral: need 0 <= a <= b");
    if (a == b) return 0.0;
    if (a == 0.0) {
        if (!(p > 0.0)) throw std::domain_error("power_integral: divergent at r = 0 for p <= 0");
        return std::pow(b, p) / p;
    }
    const double x = (b - a) / a;  // > 0
    if (p == 0.0) return std::log1p(x);
    return std::pow(a, p) * std::expm1(p * std::log1p(x)) / p;
}

/// Uniform double in [0,1) from the raw engine stream. std::mt19937_64 output
/// is pinned by the standard; library distributions are not, so results stay
/// identical across toolchains.
inline double uniform01(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Least-squares slope (and intercept) of y against x.
struct LineFit {
    double slope = kNaN;
    double intercept = kNaN;
    double rms_residual = kNaN;
};

/// Worker count for embarrassingly parallel case sweeps; the DEGELL_WORKERS
/// environment variable overrides the hardware default.
inline int worker_count() {
    if (const char* env = std::getenv("DEGELL_WORKERS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Runs fn(i) for i in [0, count) on a small thread pool. Each index is an
/// independent case writing its own slot, so results do not depend on the
/// worker count or completion order.
template <class Fn>
void parallel_for(int count, Fn&& fn) {
    const int workers = std::min(worker_count(), std::max(count, 1));
    if (workers <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (int i = w; i < count; i += workers) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_line: need >= 2 points with matching sizes");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) { sx += x[i]; sy += y[i]; }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ss += r * r;
    }
    f.rms_residual = std::sqrt(ss / n);
    return f;
}

}  // namespace degell

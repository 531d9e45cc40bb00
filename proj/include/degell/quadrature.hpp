#pragma once

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>

#include "degell/util.hpp"

namespace degell {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    std::span<const double> nodes;
    std::span<const double> weights;
};

namespace detail {
// Exact to degree 5.
inline constexpr std::array<double, 3> kG3X = {-0.7745966692414834, 0.0, 0.7745966692414834};
inline constexpr std::array<double, 3> kG3W = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
// Exact to degree 9.
inline constexpr std::array<double, 5> kG5X = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                               0.5384693101056831, 0.9061798459386640};
inline constexpr std::array<double, 5> kG5W = {0.2369268850561891, 0.4786286704993665,
                                               0.5688888888888889, 0.4786286704993665,
                                               0.2369268850561891};
// Exact to degree 13.
inline constexpr std::array<double, 7> kG7X = {-0.9491079123427585, -0.7415311855993945,
                                               -0.4058451513773972, 0.0,
                                               0.4058451513773972,  0.7415311855993945,
                                               0.9491079123427585};
inline constexpr std::array<double, 7> kG7W = {0.1294849661688697, 0.2797053914892766,
                                               0.3818300505051189, 0.4179591836734694,
                                               0.3818300505051189, 0.2797053914892766,
                                               0.1294849661688697};
}  // namespace detail

inline GaussRule gauss_rule(int npts) {
    switch (npts) {
        case 3: return {detail::kG3X, detail::kG3W};
        case 5: return {detail::kG5X, detail::kG5W};
        case 7: return {detail::kG7X, detail::kG7W};
        default: throw std::invalid_argument("gauss_rule: supported point counts are 3, 5, 7");
    }
}

/// \int_a^b f(r) dr with an n-point Gauss rule.
template <class F>
double gauss_cell(double a, double b, int npts, F&& f) {
    const GaussRule g = gauss_rule(npts);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t q = 0; q < g.nodes.size(); ++q)
        acc += g.weights[q] * f(mid + half * g.nodes[q]);
    return acc * half;
}

/// Hat-weighted power moments on a cell [a, b]:
///   rising  = \int_a^b r^s (r-a)/(b-a) dr
///   falling = \int_a^b r^s (b-r)/(b-a) dr
/// Singular loads concentrate all of the quadrature risk here, so these are
/// closed forms, rearranged to stay accurate when (b-a)/a is tiny.
struct HatMoments {
    double rising;
    double falling;
};

namespace detail {

// J(s,x) = \int_0^x t(1+t)^s dt and K(s,x) = \int_0^x (x-t)(1+t)^s dt.
// Series for small x (the closed form loses ~x digits to cancellation there).
inline void hat_jk(double s, double x, double& J, double& K) {
    if (x < 0.25) {
        double coeff = 1.0;  // binom(s, k) accumulated
        double xpow = x * x;
        J = 0.0;
        K = 0.0;
        for (int k = 0;; ++k) {
            const double tJ = coeff * xpow / (k + 2.0);
            const double tK = coeff * xpow / ((k + 1.0) * (k + 2.0));
            J += tJ;
            K += tK;
            if (std::abs(tJ) <= 1e-17 * std::abs(J) && k > 2) break;
            coeff *= (s - k) / (k + 1.0);
            xpow *= x;
            if (k > 60) break;  // |x|<0.25 converges long before this
        }
        return;
    }
    const double l1px = std::log1p(x);
    const double e1 = std::expm1((s + 1.0) * l1px);
    const double e2 = std::expm1((s + 2.0) * l1px);
    J = e2 / (s + 2.0) - e1 / (s + 1.0);
    K = x * e1 / (s + 1.0) - J;
}

}  // namespace detail

/// \int_a^b r^s log(1/r) dr for s > -1, 0 <= a <= b.
inline double power_log_integral(double a, double b, double s) {
    if (!(s > -1.0)) throw std::domain_error("power_log_integral: need s > -1");
    if (!(a >= 0.0 && a <= b)) throw std::domain_error("power_log_integral: need 0 <= a <= b");
    const double p = s + 1.0;
    auto primitive = [&](double r) {
        if (r == 0.0) return 0.0;
        return std::pow(r, p) * (std::log(1.0 / r) / p + 1.0 / (p * p));
    };
    return primitive(b) - primitive(a);
}

inline HatMoments power_hat_integrals(double a, double b, double s) {
    if (!(a >= 0.0) || !(b > a)) throw std::domain_error("power_hat_integrals: need 0 <= a < b");
    if (!(s > -1.0)) throw std::domain_error("power_hat_integrals: need s > -1 for integrability");
    if (a == 0.0) {
        const double bs1 = std::pow(b, s + 1.0);
        return {bs1 / (s + 2.0), bs1 * (1.0 / (s + 1.0) - 1.0 / (s + 2.0))};
    }
    const double x = (b - a) / a;
    double J, K;
    detail::hat_jk(s, x, J, K);
    const double scale = std::pow(a, s + 2.0) / (b - a);
    return {scale * J, scale * K};
}

}  // namespace degell

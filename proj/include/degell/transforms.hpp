#pragma once

#include <cmath>
#include <stdexcept>

#include "degell/util.hpp"

namespace degell {

/// Truncation at level k: clamps s to [-k, k]. Odd and 1-Lipschitz.
inline double truncate(double k, double s) {
    if (!(k >= 0.0)) throw std::domain_error("truncate: level k must be >= 0");
    return std::abs(s) <= k ? s : k * sign(s);
}

namespace detail {
inline void check_theta(double theta, const char* who) {
    if (!(theta >= 0.0 && theta <= 1.0))
        throw std::domain_error(std::string(who) + ": theta must lie in [0,1]");
}
}  // namespace detail

/// Flux-linearizing map: the odd primitive of (1+|u|)^{-theta} vanishing at 0.
/// For theta < 1 this is sign(u)((1+|u|)^{1-theta}-1)/(1-theta); theta = 1 is
/// the analytic log limit, not a small-exponent approximation.
inline double psi(double theta, double u) {
    detail::check_theta(theta, "psi");
    const double L = std::log1p(std::abs(u));
    if (theta == 1.0) return sign(u) * L;
    return sign(u) * std::expm1((1.0 - theta) * L) / (1.0 - theta);
}

/// d/du psi(theta, u) = (1+|u|)^{-theta}.
inline double psi_derivative(double theta, double u) {
    detail::check_theta(theta, "psi_derivative");
    return std::exp(-theta * std::log1p(std::abs(u)));
}

/// Inverse of psi. For theta < 1 psi is an odd bijection of the reals, so
/// every w is admissible; 1+(1-theta)|w| stays positive on the branch used.
inline double psi_inverse(double theta, double w) {
    detail::check_theta(theta, "psi_inverse");
    const double aw = std::abs(w);
    if (theta == 1.0) return sign(w) * std::expm1(aw);
    return sign(w) * std::expm1(std::log1p((1.0 - theta) * aw) / (1.0 - theta));
}

/// [(1+|u|)^p - 1] sign(u). Odd, increasing; requires p > 0.
inline double power_test(double p, double u) {
    if (!(p > 0.0)) throw std::domain_error("power_test: exponent p must be > 0");
    return sign(u) * pow1pm1(std::abs(u), p);
}

/// [(1+|u|)^p - (1+k)^p]^+ sign(u); vanishes on |u| <= k.
inline double shifted_power_test(double p, double k, double u) {
    if (!(p > 0.0)) throw std::domain_error("shifted_power_test: exponent p must be > 0");
    if (!(k >= 0.0)) throw std::domain_error("shifted_power_test: threshold k must be >= 0");
    const double au = std::abs(u);
    if (au <= k) return 0.0;
    // (1+k)^p * [((1+|u|)/(1+k))^p - 1]; the ratio form avoids cancellation
    // when |u| is close to k.
    return sign(u) * pow1p(k, p) * std::expm1(p * std::log1p((au - k) / (1.0 + k)));
}

/// [log(1+|u|) - log(1+k)]^+ sign(u); vanishes on |u| <= k.
inline double log_test(double k, double u) {
    if (!(k >= 0.0)) throw std::domain_error("log_test: threshold k must be >= 0");
    const double au = std::abs(u);
    if (au <= k) return 0.0;
    return sign(u) * std::log1p((au - k) / (1.0 + k));
}

/// Odd map with derivative (1+|u|)^{beta-1}, normalized to vanish at u = 0:
/// (1/beta)[(1+|u|)^beta - 1] sign(u). Its gradient (by the chain rule) is
/// grad(u)/(1+|u|)^{1-beta}, the variable used by the energy estimates.
inline double energy_variable(double beta, double u) {
    if (!(beta > 0.0 && beta < 1.0))
        throw std::domain_error("energy_variable: beta must lie in (0,1)");
    return sign(u) * pow1pm1(std::abs(u), beta) / beta;
}

/// Scalar maps of a fixed theta, bundled for callers that carry the
/// degeneracy exponent around.
struct ThetaTransform {
    double theta;

    explicit ThetaTransform(double t) : theta(t) { detail::check_theta(t, "ThetaTransform"); }

    double forward(double u) const { return psi(theta, u); }
    double inverse(double w) const { return psi_inverse(theta, w); }
    double derivative(double u) const { return psi_derivative(theta, u); }
};

}  // namespace degell

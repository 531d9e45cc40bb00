#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "degell/norms.hpp"
#include "degell/problem.hpp"
#include "degell/solver.hpp"
#include "degell/transforms.hpp"

namespace degell {

/// Smooth radial test bump phi(r) = 16 (r-a)^2 (b-r)^2 / (b-a)^4 on (a, b),
/// zero outside, normalized to peak value 1. Vanishes with its first
/// derivative on the boundary of its support.
struct RadialBump {
    double a, b;

    double operator()(double r) const {
        if (r <= a || r >= b) return 0.0;
        const double d = (b - a) * (b - a);
        return 16.0 * (r - a) * (r - a) * (b - r) * (b - r) / (d * d);
    }
    double derivative(double r) const {
        if (r <= a || r >= b) return 0.0;
        const double d = (b - a) * (b - a);
        return 32.0 * (r - a) * (b - r) * (a + b - 2.0 * r) / (d * d);
    }
    /// max(sup|phi|, sup|phi'|); the slope extremum sits at t = (3-sqrt(3))/6.
    double w1inf() const {
        const double t = (3.0 - std::sqrt(3.0)) / 6.0;
        const double sup_slope = 32.0 * t * (1.0 - t) * (1.0 - 2.0 * t) / (b - a);
        return std::max(1.0, sup_slope);
    }
};

/// Five bumps at fixed fractional positions of the domain (reproducible test
/// set for the weak-form residual).
inline std::vector<RadialBump> default_test_bumps(const ProblemSpec& spec) {
    const double lo = spec.domain_inner();
    const double hi = spec.outer_radius;
    std::vector<RadialBump> bumps;
    for (auto [fa, fb] : {std::pair{0.05, 0.35}, std::pair{0.1, 0.5}, std::pair{0.2, 0.8},
                          std::pair{0.4, 0.9}, std::pair{0.6, 0.95}})
        bumps.push_back({lo + fa * (hi - lo), lo + fb * (hi - lo)});
    return bumps;
}

namespace detail {

/// Splits [lo, hi] at the truncation radius of a capped power-law source so
/// quadrature never straddles the kink.
template <class F>
double integrate_with_source_kink(const ProblemSpec& spec, double cap, double lo, double hi,
                                  F&& f) {
    double cut = kNaN;
    if (spec.source.is_power_law() && std::isfinite(cap) && spec.source.gamma != 0.0 &&
        spec.source.amp != 0.0) {
        const double r_star = std::pow(std::abs(spec.source.amp) / cap, 1.0 / spec.source.gamma);
        if (r_star > lo && r_star < hi) cut = r_star;
    }
    if (std::isnan(cut)) return gauss_cell(lo, hi, 7, f);
    return gauss_cell(lo, cut, 7, f) + gauss_cell(cut, hi, 7, f);
}

}  // namespace detail

/// Weak-form defect of a discrete solution against smooth compactly supported
/// test functions: max over the test set of
///   | omega \int a u' (1+|u|)^{-theta} phi' r^{N-1} - omega \int f phi r^{N-1} |
/// normalized by the W^{1,inf} size of the test function.
inline double distributional_residual(const SolveResult& result, const ProblemSpec& spec,
                                      std::span<const RadialBump> bumps, double source_cap = kInf) {
    if (bumps.empty()) throw std::invalid_argument("distributional_residual: empty test set");
    const int N = spec.N;
    const double theta = spec.theta;
    const NodalField& u = result.u;
    const double lo_dom = spec.domain_inner();
    double worst = 0.0;
    for (const RadialBump& phi : bumps) {
        if (phi.a < lo_dom || phi.b > spec.outer_radius)
            throw std::invalid_argument("distributional_residual: bump leaves the domain");
        double lhs = 0.0, rhs = 0.0;
        for (int c = 0; c < u.mesh.cell_count(); ++c) {
            const double lo = std::max(u.mesh.nodes[c], phi.a);
            const double hi = std::min(u.mesh.nodes[c + 1], phi.b);
            if (!(hi > lo)) continue;
            const double slope = u.slope(c);
            const double ua = u.values[c];
            const double ra = u.mesh.nodes[c];
            lhs += gauss_cell(lo, hi, 7, [&](double r) {
                const double ur = ua + slope * (r - ra);
                return spec.coefficient(r) * slope *
                       std::exp(-theta * std::log1p(std::abs(ur))) * phi.derivative(r) *
                       std::pow(r, N - 1);
            });
            rhs += detail::integrate_with_source_kink(spec, source_cap, lo, hi, [&](double r) {
                const double f = truncate(std::isfinite(source_cap) ? source_cap : kInf,
                                          spec.source.eval(r, &u.mesh));
                return f * phi(r) * std::pow(r, N - 1);
            });
        }
        const double omega = unit_sphere_area(N);
        worst = std::max(worst, std::abs(omega * (lhs - rhs)) / phi.w1inf());
    }
    return worst;
}

/// Signed defect of the truncated-test inequality for a bounded comparison
/// field phi (same mesh as the solution):
///   omega \int_{|u-phi| < k} a u'(1+|u|)^{-theta}(u-phi)' r^{N-1}
///     - omega \int f T_k(u-phi) r^{N-1}.
/// Nonpositive values (up to tolerance) mean the inequality holds for this
/// (phi, k). Diagnostic only.
inline double entropy_residual(const SolveResult& result, const ProblemSpec& spec,
                               const NodalField& phi, double k, double source_cap = kInf) {
    if (!(k > 0.0)) throw std::domain_error("entropy_residual: k must be > 0");
    const NodalField& u = result.u;
    if (phi.mesh.nodes != u.mesh.nodes)
        throw std::invalid_argument("entropy_residual: phi must live on the solution mesh");
    const int N = spec.N;
    const double theta = spec.theta;

    NodalField d = u;
    for (int i = 0; i < d.mesh.node_count(); ++i) d.values[i] -= phi.values[i];

    double lhs = 0.0, rhs = 0.0;
    LevelPiece pieces[3];
    for (int c = 0; c < u.mesh.cell_count(); ++c) {
        const double ra = u.mesh.nodes[c], rb = u.mesh.nodes[c + 1];
        const double u_slope = u.slope(c);
        const double d_slope = d.slope(c);
        const int np = split_cell_at_level(ra, rb, d.values[c], d.values[c + 1], k, pieces);
        for (int p = 0; p < np; ++p) {
            const double lo = pieces[p].lo, hi = pieces[p].hi;
            if (!pieces[p].inside) {
                // |u - phi| < k: the truncated difference keeps its gradient.
                lhs += gauss_cell(lo, hi, 5, [&](double r) {
                    const double ur = u.values[c] + u_slope * (r - ra);
                    return spec.coefficient(r) * u_slope *
                           std::exp(-theta * std::log1p(std::abs(ur))) * d_slope *
                           std::pow(r, N - 1);
                });
            }
            rhs += detail::integrate_with_source_kink(spec, source_cap, lo, hi, [&](double r) {
                const double f = truncate(std::isfinite(source_cap) ? source_cap : kInf,
                                          spec.source.eval(r, &u.mesh));
                const double dr = d.values[c] + d_slope * (r - ra);
                return f * truncate(k, dr) * std::pow(r, N - 1);
            });
        }
    }
    return unit_sphere_area(N) * (lhs - rhs);
}

}  // namespace degell

#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "degell/mesh.hpp"
#include "degell/quadrature.hpp"
#include "degell/util.hpp"

namespace degell {

// All integrals here are genuine N-dimensional quantities: the angular factor
// omega_{N-1} = |S^{N-1}| multiplies every radial integral, so both sides of
// any inequality are compared in the same normalization.

namespace detail {

template <class F>
double integrate_cells(const NodalField& u, int N, int npts, F&& cell_integrand) {
    double acc = 0.0;
    for (int c = 0; c < u.mesh.cell_count(); ++c) {
        const double a = u.mesh.nodes[c], b = u.mesh.nodes[c + 1];
        const double ua = u.values[c], ub = u.values[c + 1];
        const double slope = (ub - ua) / (b - a);
        acc += gauss_cell(a, b, npts, [&](double r) {
            const double ur = ua + slope * (r - a);
            return cell_integrand(r, ur, slope);
        });
    }
    return acc * unit_sphere_area(N);
}

/// Same, but restricted to the sub-cells where |u| >= k (inside = true) or
/// |u| < k (inside = false).
template <class F>
double integrate_level_pieces(const NodalField& u, int N, double k, bool inside, int npts,
                              F&& cell_integrand) {
    double acc = 0.0;
    LevelPiece pieces[3];
    for (int c = 0; c < u.mesh.cell_count(); ++c) {
        const double a = u.mesh.nodes[c], b = u.mesh.nodes[c + 1];
        const double ua = u.values[c], ub = u.values[c + 1];
        const double slope = (ub - ua) / (b - a);
        const int n = split_cell_at_level(a, b, ua, ub, k, pieces);
        for (int p = 0; p < n; ++p) {
            if (pieces[p].inside != inside) continue;
            acc += gauss_cell(pieces[p].lo, pieces[p].hi, npts, [&](double r) {
                const double ur = ua + slope * (r - a);
                return cell_integrand(r, ur, slope);
            });
        }
    }
    return acc * unit_sphere_area(N);
}

}  // namespace detail

/// omega * \int |u|^p r^{N-1} dr (piecewise-linear u, 5-point Gauss per cell).
inline double lebesgue_integral_abs_pow(const NodalField& u, double p, int N) {
    if (!(p > 0.0)) throw std::domain_error("lebesgue_integral_abs_pow: p must be > 0");
    return detail::integrate_cells(u, N, 5, [&](double r, double ur, double) {
        return std::pow(std::abs(ur), p) * std::pow(r, N - 1);
    });
}

/// L^p norm on the N-dimensional domain.
inline double lebesgue_norm(const NodalField& u, double p, int N) {
    if (!(p >= 1.0)) throw std::domain_error("lebesgue_norm: p must be >= 1");
    return std::pow(lebesgue_integral_abs_pow(u, p, N), 1.0 / p);
}

/// omega * \int |u'| r^{N-1} dr, exact for the piecewise-linear field.
inline double w11_seminorm(const NodalField& u, int N) {
    double acc = 0.0;
    for (int c = 0; c < u.mesh.cell_count(); ++c)
        acc += std::abs(u.slope(c)) *
               power_integral(u.mesh.nodes[c], u.mesh.nodes[c + 1], static_cast<double>(N));
    return acc * unit_sphere_area(N);
}

/// omega * \int |u'|^2 (1+|u|)^{-s} r^{N-1} dr.
inline double weighted_gradient_energy(const NodalField& u, double s, int N) {
    if (!(s >= 0.0)) throw std::domain_error("weighted_gradient_energy: s must be >= 0");
    return detail::integrate_cells(u, N, 5, [&](double r, double ur, double slope) {
        return slope * slope * std::exp(-s * std::log1p(std::abs(ur))) * std::pow(r, N - 1);
    });
}

/// omega * \int |grad T_k(u)|^2 r^{N-1} dr, exact: the truncated gradient is
/// the full slope on {|u| < k} and zero beyond, with cells split at crossings.
inline double truncation_dirichlet_energy(const NodalField& u, double k, int N) {
    if (!(k >= 0.0)) throw std::domain_error("truncation_dirichlet_energy: k must be >= 0");
    double acc = 0.0;
    LevelPiece pieces[3];
    for (int c = 0; c < u.mesh.cell_count(); ++c) {
        const double slope = u.slope(c);
        const int n = split_cell_at_level(u.mesh.nodes[c], u.mesh.nodes[c + 1], u.values[c],
                                          u.values[c + 1], k, pieces);
        for (int p = 0; p < n; ++p) {
            if (pieces[p].inside) continue;  // |u| >= k: truncation is flat
            acc += slope * slope * power_integral(pieces[p].lo, pieces[p].hi, static_cast<double>(N));
        }
    }
    return acc * unit_sphere_area(N);
}

/// omega * \int_{|u| >= k} |u'| r^{N-1} dr, exact.
inline double w11_on_level(const NodalField& u, double k, int N) {
    double acc = 0.0;
    LevelPiece pieces[3];
    for (int c = 0; c < u.mesh.cell_count(); ++c) {
        const double slope = u.slope(c);
        const int n = split_cell_at_level(u.mesh.nodes[c], u.mesh.nodes[c + 1], u.values[c],
                                          u.values[c + 1], k, pieces);
        for (int p = 0; p < n; ++p) {
            if (!pieces[p].inside) continue;
            acc += std::abs(slope) * power_integral(pieces[p].lo, pieces[p].hi, static_cast<double>(N));
        }
    }
    return acc * unit_sphere_area(N);
}

/// omega * \int_{inner < r < radius} |u'| r^{N-1} dr, exact (equiintegrability
/// probe on shrinking neighborhoods of the singularity).
inline double w11_on_ball(const NodalField& u, double radius, int N) {
    double acc = 0.0;
    for (int c = 0; c < u.mesh.cell_count(); ++c) {
        const double a = u.mesh.nodes[c];
        const double b = std::min(u.mesh.nodes[c + 1], radius);
        if (!(b > a)) break;
        acc += std::abs(u.slope(c)) * power_integral(a, b, static_cast<double>(N));
    }
    return acc * unit_sphere_area(N);
}

/// omega * \int_{|u| >= k} |u'|^2 W(u) r^{N-1} dr with weight
/// W = (1+|u|)^{-s} (shift_one) or |u|^{-s}.
inline double weighted_energy_on_level(const NodalField& u, double s, double k, int N,
                                       bool shift_one = true) {
    return detail::integrate_level_pieces(u, N, k, true, 5, [&](double r, double ur, double slope) {
        const double w = shift_one ? std::exp(-s * std::log1p(std::abs(ur)))
                                   : std::pow(std::abs(ur), -s);
        return slope * slope * w * std::pow(r, N - 1);
    });
}

/// omega * \int_{|u| >= k} V(u) r^{N-1} dr with V = (1+|u|)^p (shift_one) or |u|^p.
inline double lebesgue_pow_on_level(const NodalField& u, double p, double k, int N,
                                    bool shift_one = true) {
    return detail::integrate_level_pieces(u, N, k, true, 5, [&](double r, double ur, double) {
        const double v = shift_one ? pow1p(std::abs(ur), p) : std::pow(std::abs(ur), p);
        return v * std::pow(r, N - 1);
    });
}

/// Distribution function: measure of {|u| > t} in R^N for each threshold.
/// Level sets are resolved cell-by-cell on the linear interpolant; the strict
/// inequality makes the result right-continuous in t by construction.
inline std::vector<std::pair<double, double>> distribution_function(
    const NodalField& u, const std::vector<double>& t_grid, int N) {
    if (t_grid.empty()) throw std::invalid_argument("distribution_function: empty threshold grid");
    const double omega = unit_sphere_area(N);
    std::vector<std::pair<double, double>> out;
    out.reserve(t_grid.size());
    for (double t : t_grid) {
        double content = 0.0;  // accumulates r^N-content of {|u| > t}
        for (int c = 0; c < u.mesh.cell_count(); ++c) {
            const double a = u.mesh.nodes[c], b = u.mesh.nodes[c + 1];
            const double ua = u.values[c], ub = u.values[c + 1];
            const double du = ub - ua;
            // {u > t} and {u < -t} are disjoint intervals on a linear cell.
            for (int side = 0; side < 2; ++side) {
                const double level = side == 0 ? t : -t;
                double lo = a, hi = b;
                const bool above_a = side == 0 ? (ua > level) : (ua < level);
                const bool above_b = side == 0 ? (ub > level) : (ub < level);
                if (!above_a && !above_b) continue;
                if (above_a != above_b) {
                    const double rc = a + (level - ua) / du * (b - a);
                    if (above_a) hi = rc; else lo = rc;
                }
                if (hi > lo) content += static_cast<double>(N) * power_integral(lo, hi, static_cast<double>(N));
                if (t < 0.0) break;  // |u| > t is the whole cell; avoid double count
            }
        }
        out.emplace_back(t, omega / N * content);
    }
    return out;
}

/// omega * sum_cells |u'|^q \int r^{N-1}, exact (the gradient is constant per
/// cell). Used by the integrability-threshold sweep.
inline double gradient_pow_integral(const NodalField& u, double q, int N) {
    if (!(q > 0.0)) throw std::domain_error("gradient_pow_integral: q must be > 0");
    double acc = 0.0;
    for (int c = 0; c < u.mesh.cell_count(); ++c) {
        const double s = std::abs(u.slope(c));
        if (s == 0.0) continue;
        acc += std::pow(s, q) * power_integral(u.mesh.nodes[c], u.mesh.nodes[c + 1], static_cast<double>(N));
    }
    return acc * unit_sphere_area(N);
}

/// Least-squares slope of log|u| against log r over the nodes in a window.
struct ExponentFit {
    double fitted_slope = kNaN;
    double residual = kNaN;   // rms of the log-log fit
    double predicted = kNaN;
    double relative_gap = kNaN;
    std::pair<double, double> window{kNaN, kNaN};
};

inline ExponentFit fit_decay_slope(const NodalField& u, double r_a, double r_b,
                                   double predicted = kNaN) {
    if (!(r_a > 0.0 && r_a < r_b && r_b <= u.mesh.outer))
        throw std::invalid_argument("fit_decay_slope: need 0 < r_a < r_b <= outer radius");
    std::vector<double> lx, ly;
    for (int i = 0; i < u.mesh.node_count(); ++i) {
        const double r = u.mesh.nodes[i];
        if (r < r_a || r > r_b) continue;
        if (!(u.values[i] > 0.0))
            throw std::domain_error("fit_decay_slope: field must be positive on the window");
        lx.push_back(std::log(r));
        ly.push_back(std::log(u.values[i]));
    }
    if (lx.size() < 8) throw std::invalid_argument("fit_decay_slope: window must contain >= 8 nodes");
    const LineFit lf = fit_line(lx, ly);
    ExponentFit fit;
    fit.fitted_slope = lf.slope;
    fit.residual = lf.rms_residual;
    fit.predicted = predicted;
    fit.relative_gap = std::isnan(predicted) ? kNaN
                                             : std::abs(lf.slope - predicted) / std::abs(predicted);
    fit.window = {r_a, r_b};
    return fit;
}

}  // namespace degell

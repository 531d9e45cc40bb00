#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "degell/mesh.hpp"
#include "degell/problem.hpp"
#include "degell/quadrature.hpp"
#include "degell/transforms.hpp"
#include "degell/util.hpp"

namespace degell {

/// Per-cell stiffness integrals S_c = \int_cell kappa(r) r^{N-1} dr with a
/// 3-point Gauss rule. kappa must stay positive (ellipticity); a violation is
/// an assembly error, not a silent near-singular solve.
template <class Kappa>
std::vector<double> stiffness_integrals(const RadialMesh& mesh, int N, Kappa&& kappa) {
    std::vector<double> S(mesh.cell_count());
    for (int c = 0; c < mesh.cell_count(); ++c) {
        S[c] = gauss_cell(mesh.nodes[c], mesh.nodes[c + 1], 3, [&](double r) {
            const double k = kappa(r);
            if (!(k > 0.0)) throw std::runtime_error("assembly: coefficient must be positive");
            return k * std::pow(r, N - 1);
        });
    }
    return S;
}

namespace detail {

/// Load of a power-law integrand scale * r^s against the two hats of a cell
/// piece [p, q] within [a, b]. Falls back to the full-cell closed form when
/// the piece is the whole cell.
inline void add_power_piece(double a, double b, double p, double q, double s, double scale,
                            double& into_left, double& into_right) {
    if (!(q > p)) return;
    const double h = b - a;
    if (p == a && q == b) {
        const HatMoments m = power_hat_integrals(a, b, s);
        into_right += scale * m.rising;
        into_left += scale * m.falling;
        return;
    }
    const double i1 = power_integral(p, q, s + 1.0);  // \int r^s
    const double i2 = power_integral(p, q, s + 2.0);  // \int r^{s+1}
    into_right += scale * (i2 - a * i1) / h;
    into_left += scale * (b * i1 - i2) / h;
}

}  // namespace detail

/// Load vector F_i = \int r^{N-1} T_cap(f)(r) phi_i(r) dr. Power-law sources
/// (and their truncations) are integrated by closed-form primitives; tabulated
/// sources use a 5-point Gauss rule per smooth piece.
inline std::vector<double> assemble_load(const RadialMesh& mesh, int N, const Source& src,
                                         double cap = kInf) {
    if (!(cap >= 0.0)) throw std::domain_error("assemble_load: truncation level must be >= 0");
    std::vector<double> F(mesh.node_count(), 0.0);

    if (src.is_power_law()) {
        const double amp = src.amp;
        if (amp == 0.0 || cap == 0.0) return F;
        const double gamma = src.gamma;
        const double s_free = N - 1.0 - gamma;  // > -1 since gamma < N
        const double s_flat = N - 1.0;
        // |f| > cap on r < r_star (gamma > 0) or r > r_star (gamma < 0).
        double r_star = -1.0;
        bool capped_everywhere = false;
        if (std::isfinite(cap)) {
            if (gamma == 0.0) {
                capped_everywhere = std::abs(amp) > cap;
            } else {
                r_star = std::pow(std::abs(amp) / cap, 1.0 / gamma);
            }
        }
        for (int c = 0; c < mesh.cell_count(); ++c) {
            const double a = mesh.nodes[c], b = mesh.nodes[c + 1];
            auto capped_piece = [&](double p, double q) {
                detail::add_power_piece(a, b, p, q, s_flat, sign(amp) * cap, F[c], F[c + 1]);
            };
            auto free_piece = [&](double p, double q) {
                detail::add_power_piece(a, b, p, q, s_free, amp, F[c], F[c + 1]);
            };
            if (!std::isfinite(cap)) {
                free_piece(a, b);
            } else if (gamma == 0.0) {
                capped_everywhere ? capped_piece(a, b) : free_piece(a, b);
            } else if (gamma > 0.0) {
                const double cut = std::clamp(r_star, a, b);
                capped_piece(a, cut);
                free_piece(cut, b);
            } else {
                const double cut = std::clamp(r_star, a, b);
                free_piece(a, cut);
                capped_piece(cut, b);
            }
        }
        return F;
    }

    // Tabulated: piecewise-linear data, truncated exactly by splitting cells
    // at the |f| = cap crossings.
    if (src.values.size() != static_cast<std::size_t>(mesh.node_count()))
        throw std::invalid_argument("assemble_load: tabulated source size must match the mesh");
    LevelPiece pieces[3];
    for (int c = 0; c < mesh.cell_count(); ++c) {
        const double a = mesh.nodes[c], b = mesh.nodes[c + 1];
        const double h = b - a;
        const double fa = src.values[c], fb = src.values[c + 1];
        const double slope = (fb - fa) / h;
        const double k = std::isfinite(cap) ? cap : kInf;
        int n = 1;
        pieces[0] = {a, b, false};
        if (std::isfinite(cap)) n = split_cell_at_level(a, b, fa, fb, k, pieces);
        for (int p = 0; p < n; ++p) {
            const double lo = pieces[p].lo, hi = pieces[p].hi;
            F[c] += gauss_cell(lo, hi, 5, [&](double r) {
                const double f = truncate(std::isfinite(cap) ? cap : kInf, fa + slope * (r - a));
                return f * std::pow(r, N - 1) * (b - r) / h;
            });
            F[c + 1] += gauss_cell(lo, hi, 5, [&](double r) {
                const double f = truncate(std::isfinite(cap) ? cap : kInf, fa + slope * (r - a));
                return f * std::pow(r, N - 1) * (r - a) / h;
            });
        }
    }
    return F;
}

/// Solves the reduced tridiagonal system by direct elimination and returns the
/// full nodal vector with the Dirichlet data filled in. Node M is always
/// Dirichlet; node 0 is Dirichlet iff inner_dirichlet (annulus), otherwise the
/// natural condition at the origin leaves it free (the weight r^{N-1} vanishes
/// there, so no flux condition is imposed).
inline std::vector<double> solve_two_point(const RadialMesh& mesh, const std::vector<double>& S,
                                           const std::vector<double>& load, bool inner_dirichlet,
                                           double g_inner, double g_outer) {
    const int M = mesh.cell_count();
    const int i0 = inner_dirichlet ? 1 : 0;
    const int i1 = M - 1;  // last free node
    const int n = i1 - i0 + 1;
    if (n < 1) throw std::invalid_argument("solve_two_point: no free nodes");

    auto cond = [&](int c) { return S[c] / (mesh.h(c) * mesh.h(c)); };

    std::vector<double> diag(n), sub(n, 0.0), rhs(n);
    for (int i = i0; i <= i1; ++i) {
        double d = 0.0;
        if (i > 0) d += cond(i - 1);
        if (i < M) d += cond(i);
        diag[i - i0] = d;
        rhs[i - i0] = load[i];
        if (i > i0) sub[i - i0] = -cond(i - 1);
    }
    if (inner_dirichlet) rhs[0] += cond(0) * g_inner;
    rhs[n - 1] += cond(M - 1) * g_outer;

    // Thomas elimination; the matrix is an SPD M-matrix for positive S.
    for (int i = 1; i < n; ++i) {
        const double m = sub[i] / diag[i - 1];
        diag[i] -= m * sub[i];  // symmetric: super-diagonal equals sub-diagonal
        rhs[i] -= m * rhs[i - 1];
    }
    std::vector<double> x(n);
    x[n - 1] = rhs[n - 1] / diag[n - 1];
    for (int i = n - 2; i >= 0; --i) x[i] = (rhs[i] - (-cond(i + i0)) * x[i + 1]) / diag[i];

    std::vector<double> full(mesh.node_count());
    if (inner_dirichlet) full[0] = g_inner;
    full[M] = g_outer;
    for (int i = 0; i < n; ++i) full[i0 + i] = x[i];
    return full;
}

/// Residual of the reduced system K u - F (free nodes only), relative to the
/// reduced load. Diagnostic for the frozen-coefficient iteration.
inline double reduced_residual(const RadialMesh& mesh, const std::vector<double>& S,
                               const std::vector<double>& load, bool inner_dirichlet,
                               const std::vector<double>& full) {
    const int M = mesh.cell_count();
    const int i0 = inner_dirichlet ? 1 : 0;
    auto cond = [&](int c) { return S[c] / (mesh.h(c) * mesh.h(c)); };
    double rr = 0.0, ff = 0.0;
    for (int i = i0; i <= M - 1; ++i) {
        double kx = 0.0, f = load[i];
        if (i > 0) kx += cond(i - 1) * (full[i] - full[i - 1]);
        if (i < M) kx += cond(i) * (full[i] - full[i + 1]);
        rr += (kx - f) * (kx - f);
        // Reduced RHS includes the Dirichlet contributions.
        double fr = f;
        if (i == i0 && inner_dirichlet) fr += cond(0) * full[0];
        if (i == M - 1) fr += cond(M - 1) * full[M];
        ff += fr * fr;
    }
    const double denom = std::sqrt(ff);
    return denom > 0.0 ? std::sqrt(rr) / denom : std::sqrt(rr);
}

/// Conserved cell fluxes of a two-point solution: Phi_c approximates
/// r^{N-1} a(r) w'(r) per cell and is exactly constant when the load vanishes.
inline std::vector<double> cell_fluxes(const RadialMesh& mesh, const std::vector<double>& S,
                                       const std::vector<double>& w) {
    std::vector<double> flux(mesh.cell_count());
    for (int c = 0; c < mesh.cell_count(); ++c)
        flux[c] = S[c] / mesh.h(c) * (w[c + 1] - w[c]) / mesh.h(c);
    return flux;
}

}  // namespace degell

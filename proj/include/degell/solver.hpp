#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "degell/fem.hpp"
#include "degell/norms.hpp"
#include "degell/problem.hpp"
#include "degell/transforms.hpp"

namespace degell {

struct SolveConfig {
    double tol_update = 1e-10;  // relative L2 change per iteration
    int max_iter = 200;
    double damping = 1.0;  // halved on residual increase, floor 1/16
    static constexpr double kDampingFloor = 1.0 / 16.0;

    void validate() const {
        if (!(tol_update > 0.0)) throw std::invalid_argument("SolveConfig: tol_update must be > 0");
        if (max_iter < 1) throw std::invalid_argument("SolveConfig: max_iter must be >= 1");
        if (!(damping > 0.0 && damping <= 1.0))
            throw std::invalid_argument("SolveConfig: damping must lie in (0,1]");
    }
};

struct SolveResult {
    NodalField u;
    NodalField w;  // psi(theta, u) nodewise
    int iterations = 0;
    double final_update = 0.0;
    double residual_norm = 0.0;
    bool converged = true;
    std::map<std::string, double> norms;
};

namespace detail {

inline void fill_norms(SolveResult& res, const ProblemSpec& spec) {
    const int N = spec.N;
    const double p = N / (N - 1.0);
    res.norms["W11"] = w11_seminorm(res.u, N);
    res.norms["L_N_over_Nm1"] = lebesgue_norm(res.u, p, N);
    res.norms["energy_N_over_Nm1"] = weighted_gradient_energy(res.u, p, N);
    res.norms["L2_w"] = lebesgue_norm(res.w, 2.0, N);
}

inline NodalField psi_of(const ProblemSpec& spec, const NodalField& u) {
    NodalField w = u;
    for (double& v : w.values) v = psi(spec.theta, v);
    return w;
}

}  // namespace detail

/// Galerkin solution of the linear transformed problem
///   -(r^{N-1} a(r) w')' = r^{N-1} T_cap(f),  w(outer) = 0
/// (plus the inner Dirichlet datum in annulus mode). theta plays no role here.
inline NodalField solve_linear_w(const ProblemSpec& spec, const RadialMesh& mesh,
                                 double source_cap = kInf) {
    spec.validate();
    const auto S = stiffness_integrals(mesh, spec.N, [&](double r) { return spec.coefficient(r); });
    const auto F = assemble_load(mesh, spec.N, spec.source, source_cap);
    const bool inner = spec.mode == DomainMode::annulus;
    return NodalField(mesh, solve_two_point(mesh, S, F, inner, inner ? spec.inner_w_value() : 0.0,
                                            0.0));
}

/// Transform route: solve the linear problem in w, then map back nodewise with
/// the inverse of the flux-linearizing transform. Exact up to the linear
/// discretization error, which makes it the reference path for verification.
inline SolveResult oracle_solve(const ProblemSpec& spec, const RadialMesh& mesh,
                                double source_cap = kInf) {
    const NodalField w = solve_linear_w(spec, mesh, source_cap);
    SolveResult res;
    res.u = w;
    for (double& v : res.u.values) v = psi_inverse(spec.theta, v);
    res.w = detail::psi_of(spec, res.u);
    res.iterations = 1;
    res.final_update = 0.0;
    res.converged = true;
    {
        // Nonlinear residual of the transformed-back field under the direct
        // discretization; reports the commutation error of the two routes.
        const double theta = spec.theta;
        const NodalField& u = res.u;
        const auto S = stiffness_integrals(mesh, spec.N, [&](double r) {
            return spec.coefficient(r) * std::exp(-theta * std::log1p(std::abs(u(r))));
        });
        const auto F = assemble_load(mesh, spec.N, spec.source, source_cap);
        res.residual_norm = reduced_residual(mesh, S, F, spec.mode == DomainMode::annulus, u.values);
    }
    detail::fill_norms(res, spec);
    return res;
}

/// Direct route: frozen-coefficient (Picard) iteration on u. Each step
/// assembles -(r^{N-1} a(r) (1+|u_k|)^{-theta} u')' = r^{N-1} T_cap(f) with
/// the degenerate factor interpolated from the previous iterate at the
/// quadrature points, solves the SPD tridiagonal system, and applies a damped
/// update. Stops when the relative L2 update drops below tol_update.
/// Non-convergence is a reportable outcome: the result is still returned,
/// flagged, so sequence drivers can continue.
inline SolveResult picard_solve(const ProblemSpec& spec, const RadialMesh& mesh,
                                const SolveConfig& config = {}, double source_cap = kInf) {
    spec.validate();
    config.validate();
    const int N = spec.N;
    const double theta = spec.theta;
    const bool inner = spec.mode == DomainMode::annulus;
    const double g_in = inner ? psi_inverse(theta, spec.inner_w_value()) : 0.0;
    const auto F = assemble_load(mesh, N, spec.source, source_cap);

    SolveResult res;

    if (theta == 0.0) {
        // No degeneracy: the single linear solve is the fixed point.
        const auto S = stiffness_integrals(mesh, N, [&](double r) { return spec.coefficient(r); });
        res.u = NodalField(mesh, solve_two_point(mesh, S, F, inner, g_in, 0.0));
        res.iterations = 1;
        res.final_update = 0.0;
        res.residual_norm = reduced_residual(mesh, S, F, inner, res.u.values);
        res.converged = true;
        res.w = detail::psi_of(spec, res.u);
        detail::fill_norms(res, spec);
        return res;
    }

    NodalField u = NodalField::zeros(mesh);
    if (inner) u.values.front() = g_in;

    auto assemble_S = [&](const NodalField& cur) {
        return stiffness_integrals(mesh, N, [&](double r) {
            return spec.coefficient(r) * std::exp(-theta * std::log1p(std::abs(cur(r))));
        });
    };
    auto residual_at = [&](const NodalField& cur) {
        return reduced_residual(mesh, assemble_S(cur), F, inner, cur.values);
    };

    double lambda = config.damping;
    double rho_prev = residual_at(u);
    int oscillating = 0;
    bool converged = false;
    int it = 0;
    double delta = kInf;

    for (it = 1; it <= config.max_iter; ++it) {
        const auto S = assemble_S(u);
        NodalField u_hat(mesh, solve_two_point(mesh, S, F, inner, g_in, 0.0));

        NodalField diff = u_hat;
        for (int i = 0; i < diff.mesh.node_count(); ++i) diff.values[i] -= u.values[i];
        const double num = lebesgue_norm(diff, 2.0, N);
        const double den = lebesgue_norm(u_hat, 2.0, N);
        delta = den > 0.0 ? num / den : num;

        if (delta < config.tol_update) {
            u = u_hat;
            converged = true;
            break;
        }

        // Damped acceptance; the step length is halved while the nonlinear
        // residual would grow, down to the floor. Growth only counts when it
        // clears the rounding noise of a residual already at machine level.
        auto grows = [&](double next) { return next > rho_prev * (1.0 + 1e-6) && next > 1e-13; };
        NodalField u_next = u;
        double rho_next = rho_prev;
        while (true) {
            for (int i = 0; i < u.mesh.node_count(); ++i)
                u_next.values[i] = (1.0 - lambda) * u.values[i] + lambda * u_hat.values[i];
            rho_next = residual_at(u_next);
            if (!grows(rho_next) || lambda <= SolveConfig::kDampingFloor) break;
            lambda = std::max(0.5 * lambda, SolveConfig::kDampingFloor);
        }
        if (lambda <= SolveConfig::kDampingFloor && grows(rho_next)) {
            if (++oscillating >= 2) {  // stuck at the floor and still climbing
                u = u_next;
                rho_prev = rho_next;
                break;
            }
        } else {
            oscillating = 0;
        }
        u = u_next;
        rho_prev = rho_next;
    }

    res.u = u;
    res.w = detail::psi_of(spec, u);
    res.iterations = std::min(it, config.max_iter);
    res.final_update = delta;
    res.converged = converged;
    res.residual_norm = residual_at(u);
    detail::fill_norms(res, spec);
    return res;
}

/// Truncated-source family: solve with T_n(f) for each level of the schedule
/// and collect the cross-family diagnostics used by the compactness checks.
struct SequenceResult {
    std::vector<double> schedule;
    std::vector<SolveResult> members;
    std::vector<double> w11_norms;
    std::vector<double> lebesgue_norms;       // L^{N/(N-1)} of each member
    std::vector<double> w11_diffs;            // |u_{n_{j+1}} - u_{n_j}|_{W11}
    std::vector<double> flux_l2_diffs;        // L2 distance of g_n = u'/(1+|u|)^e
    double flux_exponent = kNaN;
    bool all_converged = true;
};

inline std::vector<double> default_truncation_schedule() {
    std::vector<double> s;
    for (int j = 0; j <= 10; ++j) s.push_back(std::pow(2.0, j));
    return s;
}

/// e = N/(2(N-1)) away from theta = 1/(N-1); at that point the two candidate
/// exponents coincide with (theta+1)/2, which is used on that borderline.
inline double default_flux_exponent(int N, double theta) {
    const double inv = 1.0 / (N - 1.0);
    return theta > inv ? N / (2.0 * (N - 1.0)) : 0.5 * (theta + 1.0);
}

inline SequenceResult truncated_sequence(const ProblemSpec& spec, const RadialMesh& mesh,
                                         const SolveConfig& config = {},
                                         std::vector<double> schedule = {},
                                         double flux_exponent = kNaN) {
    if (schedule.empty()) schedule = default_truncation_schedule();
    for (std::size_t j = 0; j < schedule.size(); ++j)
        if (!(schedule[j] > 0.0) || (j > 0 && !(schedule[j] > schedule[j - 1])))
            throw std::invalid_argument("truncated_sequence: schedule must be positive increasing");

    SequenceResult seq;
    seq.schedule = schedule;
    seq.flux_exponent =
        std::isnan(flux_exponent) ? default_flux_exponent(spec.N, spec.theta) : flux_exponent;

    // Members are independent solves; run them on the worker pool and merge
    // in schedule order.
    seq.members.resize(schedule.size());
    parallel_for(static_cast<int>(schedule.size()), [&](int j) {
        seq.members[j] = picard_solve(spec, mesh, config, schedule[j]);
    });
    for (const SolveResult& r : seq.members) {
        seq.all_converged = seq.all_converged && r.converged;
        seq.w11_norms.push_back(r.norms.at("W11"));
        seq.lebesgue_norms.push_back(r.norms.at("L_N_over_Nm1"));
    }

    const double e = seq.flux_exponent;
    auto flux_var = [&](const NodalField& u, double r, int cell) {
        const double slope = u.slope(cell);
        const double ur = u.values[cell] + slope * (r - u.mesh.nodes[cell]);
        return slope * std::exp(-e * std::log1p(std::abs(ur)));
    };
    for (std::size_t j = 0; j + 1 < seq.members.size(); ++j) {
        const NodalField& ua = seq.members[j].u;
        const NodalField& ub = seq.members[j + 1].u;
        NodalField d = ub;
        for (int i = 0; i < d.mesh.node_count(); ++i) d.values[i] -= ua.values[i];
        seq.w11_diffs.push_back(w11_seminorm(d, spec.N));

        double acc = 0.0;
        for (int c = 0; c < mesh.cell_count(); ++c) {
            acc += gauss_cell(mesh.nodes[c], mesh.nodes[c + 1], 5, [&](double r) {
                const double g = flux_var(ub, r, c) - flux_var(ua, r, c);
                return g * g * std::pow(r, spec.N - 1);
            });
        }
        seq.flux_l2_diffs.push_back(std::sqrt(acc * unit_sphere_area(spec.N)));
    }
    return seq;
}

}  // namespace degell

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "degell/norms.hpp"
#include "degell/problem.hpp"
#include "degell/solver.hpp"

namespace degell {

/// Outcome of the empirical gradient-integrability sweep. When the growth data
/// near the crossover is not monotone the bracket is the honest answer and the
/// result is flagged.
struct ThresholdResult {
    double q_star = kNaN;
    double bracket_lo = kNaN;
    double bracket_hi = kNaN;
    bool no_blowup = false;
    bool flagged = false;
};

namespace detail {

struct GradientProfile {
    std::vector<double> pow_weights;  // omega * \int_cell r^{N-1}
    std::vector<double> slopes;       // |u'| per cell
};

inline double gradient_integral(const GradientProfile& g, double q) {
    double acc = 0.0;
    for (std::size_t c = 0; c < g.slopes.size(); ++c)
        if (g.slopes[c] > 0.0) acc += std::pow(g.slopes[c], q) * g.pow_weights[c];
    return acc;
}

}  // namespace detail

/// Finds the exponent q* where omega \int |u'|^q r^{N-1} stops converging
/// under mesh refinement: for each candidate q the integral is computed on
/// every refinement level and growth is declared when the last two
/// refinement-to-refinement ratios both exceed 1 + delta. The crossover is
/// located by bisection.
inline ThresholdResult gradient_integrability_threshold(const ProblemSpec& spec, double q_lo,
                                                        double q_hi,
                                                        const std::vector<int>& refinements,
                                                        double grading = 3.0,
                                                        double delta = 0.05) {
    if (!(q_lo > 0.0 && q_lo < q_hi))
        throw std::invalid_argument("gradient_integrability_threshold: need 0 < q_lo < q_hi");
    if (refinements.size() < 3)
        throw std::invalid_argument("gradient_integrability_threshold: need >= 3 refinements");

    std::vector<detail::GradientProfile> profiles;
    for (int M : refinements) {
        const RadialMesh mesh = build_mesh(spec, M, grading);
        const SolveResult res = oracle_solve(spec, mesh);
        detail::GradientProfile g;
        g.pow_weights.resize(mesh.cell_count());
        g.slopes.resize(mesh.cell_count());
        const double omega = unit_sphere_area(spec.N);
        for (int c = 0; c < mesh.cell_count(); ++c) {
            g.pow_weights[c] =
                omega * power_integral(mesh.nodes[c], mesh.nodes[c + 1], static_cast<double>(spec.N));
            g.slopes[c] = std::abs(res.u.slope(c));
        }
        profiles.push_back(std::move(g));
    }

    auto ratios = [&](double q) {
        std::vector<double> r;
        double prev = detail::gradient_integral(profiles.front(), q);
        for (std::size_t i = 1; i < profiles.size(); ++i) {
            const double cur = detail::gradient_integral(profiles[i], q);
            r.push_back(prev > 0.0 ? cur / prev : 1.0);
            prev = cur;
        }
        return r;
    };
    auto blows_up = [&](double q) {
        const auto r = ratios(q);
        const std::size_t n = r.size();
        return r[n - 1] > 1.0 + delta && r[n - 2] > 1.0 + delta;
    };
    auto pattern_flagged = [&](double q) {
        // More than one crossing of the 1+delta line across the refinement
        // ladder means the growth data is not monotone.
        const auto r = ratios(q);
        int flips = 0;
        for (std::size_t i = 0; i + 1 < r.size(); ++i)
            if ((r[i] > 1.0 + delta) != (r[i + 1] > 1.0 + delta)) ++flips;
        return flips > 1;
    };

    ThresholdResult out;
    if (!blows_up(q_hi)) {
        out.q_star = q_hi;
        out.bracket_lo = out.bracket_hi = q_hi;
        out.no_blowup = true;
        return out;
    }
    if (blows_up(q_lo)) {
        out.q_star = q_lo;
        out.bracket_lo = out.bracket_hi = q_lo;
        out.flagged = true;  // crossover below the requested range
        return out;
    }

    double lo = q_lo, hi = q_hi;
    for (int it = 0; it < 60 && hi - lo > 1e-9; ++it) {
        const double mid = 0.5 * (lo + hi);
        (blows_up(mid) ? hi : lo) = mid;
    }
    out.q_star = 0.5 * (lo + hi);
    out.bracket_lo = lo;
    out.bracket_hi = hi;
    out.flagged = pattern_flagged(out.q_star);
    return out;
}

}  // namespace degell

#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "degell/util.hpp"

namespace degell {

/// Absolute tolerance for membership on the measure-zero boundaries of the
/// (theta, m) plane. Boundary curves must be testable from double inputs.
inline constexpr double kRegimeBoundaryTol = 1e-12;

/// A point of the regularity phase plane: dimension, degeneracy exponent and
/// the integrability exponent of the source. f_in_LlogL matters only at m = 1.
struct ClassPoint {
    int N = 3;
    double theta = 0.0;
    double m = 1.0;
    bool f_in_LlogL = false;

    void validate() const {
        if (N < 3) throw std::domain_error("ClassPoint: N must be >= 3");
        if (!(theta >= 0.0 && theta <= 1.0))
            throw std::domain_error("ClassPoint: theta must lie in [0,1]");
        if (!(m >= 1.0)) throw std::domain_error("ClassPoint: m must be >= 1");
    }
};

enum class Region { A, B, C, D, CurveThm1, PointThm2, ThetaOne, Uncovered };

inline const char* region_name(Region r) {
    switch (r) {
        case Region::A: return "A";
        case Region::B: return "B";
        case Region::C: return "C";
        case Region::D: return "D";
        case Region::CurveThm1: return "CurveThm1";
        case Region::PointThm2: return "PointThm2";
        case Region::ThetaOne: return "ThetaOne";
        case Region::Uncovered: return "Uncovered";
    }
    return "?";
}

enum class SpaceKind { SobolevW1p, LebesgueLp, MarcinkiewiczMp, LInfinity };

inline const char* space_kind_name(SpaceKind k) {
    switch (k) {
        case SpaceKind::SobolevW1p: return "W1p";
        case SpaceKind::LebesgueLp: return "Lp";
        case SpaceKind::MarcinkiewiczMp: return "Mp";
        case SpaceKind::LInfinity: return "Linf";
    }
    return "?";
}

/// One membership claim. `of_gradient` marks claims about |grad u| rather
/// than u itself (used by the entropy region, where only weak-Lebesgue
/// gradient integrability is available).
struct SpaceEntry {
    SpaceKind kind;
    std::optional<double> exponent;  // absent for L^inf and "every finite p"
    bool of_gradient = false;
    std::string note;
};

enum class SolutionNotion { weak, distributional, entropy };

inline const char* notion_name(SolutionNotion n) {
    switch (n) {
        case SolutionNotion::weak: return "weak";
        case SolutionNotion::distributional: return "distributional";
        case SolutionNotion::entropy: return "entropy";
    }
    return "?";
}

/// The three critical source exponents at fixed (N, theta).
struct CriticalValues {
    double m_lower;   // N/(N+1-theta(N-1)), left end of the W^{1,q} range
    double m_upper;   // 2N/(N+2-theta(N-2)), onset of the energy space
    double m_Linfty;  // N/2, onset of bounded solutions
};

struct RegimeReport {
    Region region = Region::Uncovered;
    std::vector<SpaceEntry> solution_space;
    std::optional<SolutionNotion> solution_notion;
    CriticalValues boundary_values{kNaN, kNaN, kNaN};
};

/// Sobolev conjugates (m*, m**) = (Nm/(N-m), Nm/(N-2m)).
inline std::pair<double, double> sobolev_conjugates(int N, double m) {
    if (!(m >= 1.0) || !(m < N))
        throw std::domain_error("sobolev_conjugates: m* requires 1 <= m < N");
    if (!(m < 0.5 * N))
        throw std::domain_error("sobolev_conjugates: m** requires 1 <= m < N/2");
    return {N * m / (N - m), N * m / (N - 2.0 * m)};
}

inline CriticalValues critical_m_values(int N, double theta) {
    if (N < 3) throw std::domain_error("critical_m_values: N must be >= 3");
    if (!(theta >= 0.0 && theta <= 1.0))
        throw std::domain_error("critical_m_values: theta must lie in [0,1]");
    CriticalValues cv;
    cv.m_lower = N / (N + 1.0 - theta * (N - 1.0));
    cv.m_upper = 2.0 * N / (N + 2.0 - theta * (N - 2.0));
    cv.m_Linfty = 0.5 * N;
    return cv;
}

/// Gradient integrability exponent q = Nm(1-theta)/(N-m(1+theta)).
/// q(m_lower) = 1 and q(m_upper) = 2 identically in (N, theta).
inline double q_exponent(int N, double theta, double m) {
    if (!(theta < 1.0)) throw std::domain_error("q_exponent: requires theta < 1");
    const double denom = N - m * (1.0 + theta);
    if (!(denom > 0.0))
        throw std::domain_error("q_exponent: denominator N - m(1+theta) must be positive");
    return N * m * (1.0 - theta) / denom;
}

namespace detail {
inline bool near(double a, double b) { return std::abs(a - b) <= kRegimeBoundaryTol; }
}  // namespace detail

/// Assigns the unique regularity class of a data point. Boundary ownership
/// follows the defining inequalities verbatim: B owns its left endpoint, C is
/// open in m on both sides, the W^{1,1} curve is the single point m = m_lower
/// at each theta, and m = N/2 belongs to no class (reported Uncovered).
inline RegimeReport classify(const ClassPoint& pt) {
    pt.validate();
    using detail::near;

    RegimeReport rep;
    rep.boundary_values = critical_m_values(pt.N, pt.theta);
    const CriticalValues& cv = rep.boundary_values;
    const double inv = 1.0 / (pt.N - 1.0);
    const bool theta_is_one = near(pt.theta, 1.0);
    const bool theta_at_inv = near(pt.theta, inv);

    const auto sobolev_2star = [&]() { return sobolev_conjugates(pt.N, pt.m).second; };

    if (theta_is_one) {
        rep.region = Region::ThetaOne;
        rep.solution_notion = SolutionNotion::weak;
        rep.solution_space.push_back({SpaceKind::SobolevW1p, 2.0, false, ""});
        rep.solution_space.push_back({SpaceKind::LebesgueLp, std::nullopt, false, "every finite p"});
        return rep;
    }
    if (!near(pt.m, cv.m_Linfty) && pt.m > cv.m_Linfty) {
        rep.region = Region::A;
        rep.solution_notion = SolutionNotion::weak;
        rep.solution_space.push_back({SpaceKind::SobolevW1p, 2.0, false, ""});
        rep.solution_space.push_back({SpaceKind::LInfinity, std::nullopt, false, ""});
        return rep;
    }
    if ((near(pt.m, cv.m_upper) || pt.m > cv.m_upper) &&
        !near(pt.m, cv.m_Linfty) && pt.m < cv.m_Linfty) {
        rep.region = Region::B;
        rep.solution_notion = SolutionNotion::weak;
        rep.solution_space.push_back({SpaceKind::SobolevW1p, 2.0, false, ""});
        rep.solution_space.push_back(
            {SpaceKind::LebesgueLp, sobolev_2star() * (1.0 - pt.theta), false, ""});
        return rep;
    }
    if (near(pt.m, cv.m_lower) && !theta_at_inv && pt.theta > inv) {
        rep.region = Region::CurveThm1;
        rep.solution_notion = SolutionNotion::distributional;
        rep.solution_space.push_back({SpaceKind::SobolevW1p, 1.0, false, ""});
        return rep;
    }
    if (!near(pt.m, cv.m_lower) && pt.m > cv.m_lower &&
        !near(pt.m, cv.m_upper) && pt.m < cv.m_upper &&
        (theta_at_inv || pt.theta > inv)) {
        rep.region = Region::C;
        rep.solution_notion = SolutionNotion::distributional;
        rep.solution_space.push_back(
            {SpaceKind::SobolevW1p, q_exponent(pt.N, pt.theta, pt.m), false, ""});
        return rep;
    }
    if (theta_at_inv && near(pt.m, 1.0) && pt.f_in_LlogL) {
        rep.region = Region::PointThm2;
        rep.solution_notion = SolutionNotion::distributional;
        rep.solution_space.push_back({SpaceKind::SobolevW1p, 1.0, false, ""});
        return rep;
    }
    const double d_cap = std::max(1.0, cv.m_lower);
    if (near(pt.m, d_cap) || pt.m < d_cap) {
        rep.region = Region::D;
        rep.solution_notion = SolutionNotion::entropy;
        // Exponents are reported when evaluable; inside D (theta < 1,
        // m <= max{1, m_lower} < N/2) both formulas are well defined.
        try {
            rep.solution_space.push_back(
                {SpaceKind::MarcinkiewiczMp, sobolev_2star() * (1.0 - pt.theta), false, ""});
        } catch (const std::domain_error&) {}
        try {
            rep.solution_space.push_back(
                {SpaceKind::MarcinkiewiczMp, q_exponent(pt.N, pt.theta, pt.m), true, ""});
        } catch (const std::domain_error&) {}
        return rep;
    }

    rep.region = Region::Uncovered;
    return rep;
}

struct PhaseCell {
    double theta;
    double m;
    Region region;
};

/// Row-major sweep of classify over an inclusive rectangular grid
/// (theta outer from 0 to 1, m inner from m_min to m_max); steps count points
/// per axis. Deterministic ordering for CSV emission.
inline std::vector<PhaseCell> phase_diagram_grid(int N, int theta_steps, double m_min,
                                                 double m_max, int m_steps) {
    if (theta_steps < 2 || m_steps < 2)
        throw std::domain_error("phase_diagram_grid: steps must be >= 2");
    if (!(m_min >= 1.0) || !(m_min < m_max))
        throw std::domain_error("phase_diagram_grid: need 1 <= m_min < m_max");
    std::vector<PhaseCell> cells;
    cells.reserve(static_cast<std::size_t>(theta_steps) * m_steps);
    for (int i = 0; i < theta_steps; ++i) {
        const double theta = static_cast<double>(i) / (theta_steps - 1);
        for (int j = 0; j < m_steps; ++j) {
            const double m = m_min + (m_max - m_min) * static_cast<double>(j) / (m_steps - 1);
            ClassPoint pt{N, theta, m, false};
            cells.push_back({theta, m, classify(pt).region});
        }
    }
    return cells;
}

}  // namespace degell

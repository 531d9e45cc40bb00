#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "degell/estimates.hpp"
#include "degell/exponents.hpp"
#include "degell/norms.hpp"
#include "degell/problem.hpp"
#include "degell/regimes.hpp"
#include "degell/solver.hpp"

namespace degell {

/// 17 significant digits, '.' decimal point, no locale involvement: enough to
/// round-trip any double bit-exactly, which keeps golden CSV tests stable.
inline std::string fmt_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

/// Empty cell for absent parameters (NaN), otherwise fmt_g17.
inline std::string fmt_cell(double x) { return std::isnan(x) ? std::string() : fmt_g17(x); }

// ---------------------------------------------------------------------------
// CSV emitters. All use LF line endings and fixed headers.

/// Header: r,u,w,flux. The flux column reports -a(r) u'/(1+|u|)^theta with the
/// nodal gradient averaged from the adjacent cells (one-sided at the ends).
inline void write_solution_csv(std::ostream& os, const ProblemSpec& spec,
                               const SolveResult& res) {
    os << "r,u,w,flux\n";
    const NodalField& u = res.u;
    const int M = u.mesh.cell_count();
    for (int i = 0; i <= M; ++i) {
        double slope;
        if (i == 0) slope = u.slope(0);
        else if (i == M) slope = u.slope(M - 1);
        else slope = 0.5 * (u.slope(i - 1) + u.slope(i));
        const double r = u.mesh.nodes[i];
        const double flux = -spec.coefficient(r) * slope *
                            std::exp(-spec.theta * std::log1p(std::abs(u.values[i])));
        os << fmt_g17(r) << ',' << fmt_g17(u.values[i]) << ',' << fmt_g17(res.w.values[i]) << ','
           << fmt_g17(flux) << '\n';
    }
}

inline void write_phase_csv(std::ostream& os, const std::vector<PhaseCell>& cells) {
    os << "theta,m,region\n";
    for (const PhaseCell& c : cells)
        os << fmt_g17(c.theta) << ',' << fmt_g17(c.m) << ',' << region_name(c.region) << '\n';
}

inline void write_sequence_csv(std::ostream& os, const SequenceResult& seq) {
    os << "n,iterations,converged,final_update,W11,L_N_over_Nm1,dW11,dflux\n";
    for (std::size_t j = 0; j < seq.members.size(); ++j) {
        const SolveResult& r = seq.members[j];
        os << fmt_g17(seq.schedule[j]) << ',' << r.iterations << ','
           << (r.converged ? "true" : "false") << ',' << fmt_g17(r.final_update) << ','
           << fmt_g17(seq.w11_norms[j]) << ',' << fmt_g17(seq.lebesgue_norms[j]) << ','
           << (j > 0 ? fmt_g17(seq.w11_diffs[j - 1]) : std::string()) << ','
           << (j > 0 ? fmt_g17(seq.flux_l2_diffs[j - 1]) : std::string()) << '\n';
    }
}

inline void write_ledger_csv(std::ostream& os, const std::vector<EstimateCheck>& rows) {
    os << "estimate,k,p,rho,n,lhs,rhs,allowance,passed\n";
    for (const EstimateCheck& c : rows) {
        os << estimate_name(c.id) << ',' << fmt_cell(c.k) << ',' << fmt_cell(c.p) << ','
           << fmt_cell(c.rho) << ',' << fmt_cell(c.n) << ',' << fmt_cell(c.lhs) << ','
           << fmt_cell(c.rhs) << ',' << fmt_g17(c.allowance) << ','
           << (!c.applicable ? "na" : (c.passed ? "true" : "false")) << '\n';
    }
}

// ---------------------------------------------------------------------------
// JSON builders.

inline nlohmann::json to_json(const Coefficient& c) {
    if (c.kind == Coefficient::Kind::constant)
        return {{"kind", "constant"}, {"value", c.value}};
    return {{"kind", "sinusoidal"},
            {"base", c.base},
            {"amplitude", c.amplitude},
            {"frequency", c.frequency},
            {"alpha", c.alpha()},
            {"beta", c.beta()}};
}

inline nlohmann::json to_json(const Source& s) {
    if (s.is_power_law()) return {{"kind", "power_law"}, {"gamma", s.gamma}, {"amp", s.amp}};
    return {{"kind", "tabulated"}, {"count", s.values.size()}};
}

inline nlohmann::json to_json(const ProblemSpec& spec) {
    nlohmann::json j{{"N", spec.N},
                     {"theta", spec.theta},
                     {"coefficient", to_json(spec.coefficient)},
                     {"source", to_json(spec.source)},
                     {"mode", spec.mode == DomainMode::ball ? "ball" : "annulus"},
                     {"outer_radius", spec.outer_radius}};
    if (spec.mode == DomainMode::annulus) {
        j["r_min"] = spec.r_min;
        j["inner_w"] = spec.inner_w_value();
    }
    return j;
}

inline nlohmann::json to_json(const RadialMesh& mesh) {
    return {{"cells", mesh.cell_count()},
            {"grading", mesh.grading},
            {"inner", mesh.inner},
            {"outer", mesh.outer}};
}

inline nlohmann::json solve_report_json(const ProblemSpec& spec, const RadialMesh& mesh,
                                        const SolveResult& res) {
    nlohmann::json norms;
    for (const auto& [name, value] : res.norms) norms[name] = value;
    return {{"spec", to_json(spec)},
            {"mesh", to_json(mesh)},
            {"iterations", res.iterations},
            {"final_update", res.final_update},
            {"residual_norm", res.residual_norm},
            {"converged", res.converged},
            {"norms", norms}};
}

inline nlohmann::json to_json(const RegimeReport& rep) {
    nlohmann::json spaces = nlohmann::json::array();
    for (const SpaceEntry& e : rep.solution_space) {
        nlohmann::json entry{{"kind", space_kind_name(e.kind)}};
        if (e.exponent) entry["exponent"] = *e.exponent;
        if (e.of_gradient) entry["of"] = "gradient";
        if (!e.note.empty()) entry["note"] = e.note;
        spaces.push_back(entry);
    }
    nlohmann::json j{{"region", region_name(rep.region)},
                     {"solution_space", spaces},
                     {"boundary_values",
                      {{"m_lower", rep.boundary_values.m_lower},
                       {"m_upper", rep.boundary_values.m_upper},
                       {"m_Linfty", rep.boundary_values.m_Linfty}}}};
    if (rep.solution_notion) j["solution_notion"] = notion_name(*rep.solution_notion);
    return j;
}

inline nlohmann::json exponent_study_json(const ExponentFit& fit, const ThresholdResult& q) {
    return {{"predicted", fit.predicted},
            {"fitted", fit.fitted_slope},
            {"relative_gap", fit.relative_gap},
            {"residual", fit.residual},
            {"window", {fit.window.first, fit.window.second}},
            {"q_star",
             {{"value", q.q_star},
              {"bracket", {q.bracket_lo, q.bracket_hi}},
              {"no_blowup", q.no_blowup},
              {"flagged", q.flagged}}}};
}

}  // namespace degell

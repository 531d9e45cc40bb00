// Command-line front end: classification queries, single solves, truncation
// sequences, estimate ledgers, exponent studies, and phase-diagram emission.
//
// Exit codes: 0 success, 2 invalid input, 3 solver non-convergence,
// 4 strict estimate failure.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "degell/estimates.hpp"
#include "degell/exponents.hpp"
#include "degell/io.hpp"
#include "degell/norms.hpp"
#include "degell/problem.hpp"
#include "degell/regimes.hpp"
#include "degell/solver.hpp"

namespace {

using namespace degell;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitNonConvergence = 3;
constexpr int kExitStrictFailure = 4;

void write_output(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open output file: " + path);
    os << content;
}

Coefficient parse_coefficient(const std::string& text) {
    if (text.rfind("const:", 0) == 0) return Coefficient::constant(std::stod(text.substr(6)));
    if (text.rfind("sin:", 0) == 0) {
        double v[3];
        std::stringstream ss(text.substr(4));
        std::string item;
        for (double& x : v) {
            if (!std::getline(ss, item, ','))
                throw std::invalid_argument("--coef sin needs base,amplitude,frequency");
            x = std::stod(item);
        }
        return Coefficient::sinusoidal(v[0], v[1], v[2]);
    }
    return Coefficient::constant(std::stod(text));  // bare number
}

struct SpecFlags {
    int N = 3;
    double theta = 0.0;
    double gamma = 0.0;
    double amp = 1.0;
    std::string coef = "const:1.0";
    std::string mode = "ball";
    double rmin = 0.01;
    double inner_w = kNaN;
    double outer = 1.0;
    int M = 1024;
    double grading = 3.0;
};

void add_spec_flags(CLI::App* cmd, SpecFlags& f) {
    cmd->add_option("--N", f.N, "space dimension (>= 3)")->capture_default_str();
    cmd->add_option("--theta", f.theta, "degeneracy exponent in [0,1]")->capture_default_str();
    cmd->add_option("--gamma", f.gamma, "power-law source exponent, f = amp r^-gamma")
        ->capture_default_str();
    cmd->add_option("--amp", f.amp, "source amplitude")->capture_default_str();
    cmd->add_option("--coef", f.coef, "coefficient: const:c or sin:base,amplitude,frequency")
        ->capture_default_str();
    cmd->add_option("--mode", f.mode, "domain: ball or annulus")
        ->check(CLI::IsMember({"ball", "annulus"}))
        ->capture_default_str();
    cmd->add_option("--rmin", f.rmin, "inner radius (annulus)")->capture_default_str();
    cmd->add_option("--inner-w", f.inner_w,
                    "Dirichlet value of the transformed variable at rmin (annulus); "
                    "defaults to the closed form when available");
    cmd->add_option("--outer", f.outer, "outer radius")->capture_default_str();
    cmd->add_option("--M", f.M, "number of mesh cells")->capture_default_str();
    cmd->add_option("--grading", f.grading, "mesh grading exponent (>= 1)")->capture_default_str();
}

ProblemSpec make_spec(const SpecFlags& f) {
    ProblemSpec spec;
    spec.N = f.N;
    spec.theta = f.theta;
    spec.coefficient = parse_coefficient(f.coef);
    spec.source = Source::power_law(f.gamma, f.amp);
    spec.mode = f.mode == "annulus" ? DomainMode::annulus : DomainMode::ball;
    spec.r_min = f.rmin;
    spec.outer_radius = f.outer;
    if (!std::isnan(f.inner_w)) spec.inner_w = f.inner_w;
    spec.validate();
    return spec;
}

struct SolverFlags {
    double tol = 1e-10;
    int max_iter = 200;
    double damping = 1.0;
    double truncate_level = kInf;
};

void add_solver_flags(CLI::App* cmd, SolverFlags& f) {
    cmd->add_option("--tol", f.tol, "relative L2 update tolerance")->capture_default_str();
    cmd->add_option("--max-iter", f.max_iter, "iteration cap")->capture_default_str();
    cmd->add_option("--damping", f.damping, "initial damping factor in (0,1]")
        ->capture_default_str();
    cmd->add_option("--truncate", f.truncate_level, "truncation level applied to the source");
}

SolveConfig make_config(const SolverFlags& f) {
    SolveConfig cfg;
    cfg.tol_update = f.tol;
    cfg.max_iter = f.max_iter;
    cfg.damping = f.damping;
    cfg.validate();
    return cfg;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    for (double x : parse_double_list(text)) out.push_back(static_cast<int>(x));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"degell: radial laboratory for elliptic problems with degenerate coercivity"};
    app.require_subcommand(1);
    // Configuration precedence: command-line flags override the optional
    // key=value file (sections name the subcommand), which overrides the
    // built-in defaults. Example: degell --config run.cfg classify
    app.set_config("--config", "", "key=value configuration file; flags take precedence");

    // classify ---------------------------------------------------------------
    auto* c_classify = app.add_subcommand("classify", "regularity class of a data point");
    ClassPoint point;
    bool llogl = false;
    std::string classify_out = "-";
    c_classify->add_option("--N", point.N, "space dimension (>= 3)")->capture_default_str();
    c_classify->add_option("--theta", point.theta, "degeneracy exponent in [0,1]")
        ->capture_default_str();
    c_classify->add_option("--m", point.m, "source integrability exponent (>= 1)")
        ->capture_default_str();
    c_classify->add_flag("--llogl", llogl, "source satisfies |f| log(1+|f|) integrable");
    c_classify->add_option("--out", classify_out, "output path, '-' for stdout")
        ->capture_default_str();

    // solve ------------------------------------------------------------------
    auto* c_solve = app.add_subcommand("solve", "single solve, CSV solution + JSON report");
    SpecFlags solve_spec;
    SolverFlags solve_cfg;
    std::string solve_method = "oracle";
    std::string solve_out = "-", solve_report;
    add_spec_flags(c_solve, solve_spec);
    add_solver_flags(c_solve, solve_cfg);
    c_solve->add_option("--method", solve_method, "oracle (transform route) or picard (direct)")
        ->check(CLI::IsMember({"oracle", "picard"}))
        ->capture_default_str();
    c_solve->add_option("--out", solve_out, "solution CSV path, '-' for stdout")
        ->capture_default_str();
    c_solve->add_option("--report", solve_report, "JSON report path ('-' allowed, empty skips)");

    // sequence ---------------------------------------------------------------
    auto* c_sequence = app.add_subcommand("sequence", "truncated-source family diagnostics");
    SpecFlags seq_spec;
    SolverFlags seq_cfg;
    std::string seq_schedule, seq_out = "-", seq_report;
    double seq_flux_exponent = kNaN;
    add_spec_flags(c_sequence, seq_spec);
    add_solver_flags(c_sequence, seq_cfg);
    c_sequence->add_option("--schedule", seq_schedule,
                           "comma-separated truncation levels (default 2^0..2^10)");
    c_sequence->add_option("--flux-exponent", seq_flux_exponent,
                           "exponent of the flux variable u'/(1+|u|)^e");
    c_sequence->add_option("--out", seq_out, "diagnostics CSV path")->capture_default_str();
    c_sequence->add_option("--report", seq_report, "JSON report path ('-' allowed, empty skips)");

    // estimates ----------------------------------------------------------------
    auto* c_estimates = app.add_subcommand("estimates", "a-priori estimate ledger");
    SpecFlags est_spec;
    SolverFlags est_cfg;
    std::string est_ids, est_schedule, est_klist = "1,2,4,8", est_llogl = "256,512,1024,2048";
    std::string est_out = "-";
    double est_rho = kNaN, est_m = kNaN;
    std::uint64_t est_seed = 0;
    int est_bar_samples = 100000;
    bool est_strict = false;
    add_spec_flags(c_estimates, est_spec);
    add_solver_flags(c_estimates, est_cfg);
    c_estimates->add_option("--ids", est_ids, "comma-separated estimate ids (required)")
        ->required();
    c_estimates->add_option("--schedule", est_schedule, "truncation schedule");
    c_estimates->add_option("--k-list", est_klist, "truncation thresholds k")
        ->capture_default_str();
    c_estimates->add_option("--rho", est_rho, "exponent rho in (0,(N-2)/(N-1)); default midpoint");
    c_estimates->add_option("--m", est_m, "source integrability exponent for INIZIO/INIZIOK/ONE_K");
    c_estimates->add_option("--seed", est_seed, "seed for property sampling")
        ->capture_default_str();
    c_estimates->add_option("--bar-samples", est_bar_samples, "sample count for BAR")
        ->capture_default_str();
    c_estimates->add_option("--llogl-refinements", est_llogl, "mesh sizes for the LLOGL study")
        ->capture_default_str();
    c_estimates->add_flag("--strict", est_strict, "exit 4 if any explicit-RHS check fails");
    c_estimates->add_option("--out", est_out, "ledger CSV path")->capture_default_str();

    // exponents ----------------------------------------------------------------
    auto* c_exponents = app.add_subcommand("exponents", "blow-up slope and gradient q* study");
    SpecFlags exp_spec;
    std::vector<double> exp_window{1e-3, 1e-2};
    std::vector<double> exp_qrange{1.0, 2.0};
    std::string exp_refinements = "256,512,1024,2048,4096";
    double exp_delta = 0.05;
    std::string exp_out = "-";
    add_spec_flags(c_exponents, exp_spec);
    c_exponents->add_option("--window", exp_window, "slope-fit window r_a r_b")
        ->expected(2)
        ->capture_default_str();
    c_exponents->add_option("--q-range", exp_qrange, "bisection range q_lo q_hi")
        ->expected(2)
        ->capture_default_str();
    c_exponents->add_option("--refinements", exp_refinements, "mesh sizes for the growth study")
        ->capture_default_str();
    c_exponents->add_option("--delta", exp_delta, "growth-ratio threshold above 1")
        ->capture_default_str();
    c_exponents->add_option("--out", exp_out, "study JSON path")->capture_default_str();

    // phase-diagram --------------------------------------------------------------
    auto* c_phase = app.add_subcommand("phase-diagram", "regularity phase diagram CSV");
    int pd_N = 3, pd_grid = 201, pd_theta_steps = 0, pd_m_steps = 0;
    double pd_m_min = 1.0, pd_m_max = 2.6;
    std::string pd_out = "-";
    c_phase->add_option("--N", pd_N, "space dimension")->capture_default_str();
    c_phase->add_option("--grid", pd_grid, "points per axis (both axes)")->capture_default_str();
    c_phase->add_option("--theta-steps", pd_theta_steps, "override theta point count");
    c_phase->add_option("--m-steps", pd_m_steps, "override m point count");
    c_phase->add_option("--m-min", pd_m_min, "smallest m")->capture_default_str();
    c_phase->add_option("--m-max", pd_m_max, "largest m")->capture_default_str();
    c_phase->add_option("--out", pd_out, "grid CSV path")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalid;
    }

    try {
        if (*c_classify) {
            point.f_in_LlogL = llogl;
            const RegimeReport rep = classify(point);
            write_output(classify_out, to_json(rep).dump(2) + "\n");
            return kExitOk;
        }

        if (*c_solve) {
            const ProblemSpec spec = make_spec(solve_spec);
            const RadialMesh mesh = build_mesh(spec, solve_spec.M, solve_spec.grading);
            const SolveResult res = solve_method == "picard"
                                        ? picard_solve(spec, mesh, make_config(solve_cfg),
                                                       solve_cfg.truncate_level)
                                        : oracle_solve(spec, mesh, solve_cfg.truncate_level);
            std::ostringstream csv;
            write_solution_csv(csv, spec, res);
            write_output(solve_out, csv.str());
            if (!solve_report.empty())
                write_output(solve_report, solve_report_json(spec, mesh, res).dump(2) + "\n");
            return res.converged ? kExitOk : kExitNonConvergence;
        }

        if (*c_sequence) {
            const ProblemSpec spec = make_spec(seq_spec);
            const RadialMesh mesh = build_mesh(spec, seq_spec.M, seq_spec.grading);
            const std::vector<double> schedule = seq_schedule.empty()
                                                     ? default_truncation_schedule()
                                                     : parse_double_list(seq_schedule);
            const SequenceResult seq =
                truncated_sequence(spec, mesh, make_config(seq_cfg), schedule, seq_flux_exponent);
            std::ostringstream csv;
            write_sequence_csv(csv, seq);
            write_output(seq_out, csv.str());
            if (!seq_report.empty()) {
                nlohmann::json members = nlohmann::json::array();
                for (std::size_t j = 0; j < seq.members.size(); ++j) {
                    nlohmann::json m = solve_report_json(spec, mesh, seq.members[j]);
                    m.erase("spec");
                    m.erase("mesh");
                    m["n"] = seq.schedule[j];
                    members.push_back(m);
                }
                const nlohmann::json rep{{"spec", to_json(spec)},
                                         {"mesh", to_json(mesh)},
                                         {"flux_exponent", seq.flux_exponent},
                                         {"members", members}};
                write_output(seq_report, rep.dump(2) + "\n");
            }
            return seq.all_converged ? kExitOk : kExitNonConvergence;
        }

        if (*c_estimates) {
            const ProblemSpec spec = make_spec(est_spec);
            const RadialMesh mesh = build_mesh(spec, est_spec.M, est_spec.grading);
            std::vector<EstimateId> ids;
            {
                std::stringstream ss(est_ids);
                std::string item;
                while (std::getline(ss, item, ',')) ids.push_back(parse_estimate_id(item));
            }
            if (ids.empty()) throw std::invalid_argument("--ids must name at least one estimate");

            EstimateParams prm;
            prm.k_list = parse_double_list(est_klist);
            prm.rho = est_rho;
            prm.m = est_m;
            prm.seed = est_seed;
            prm.bar_samples = est_bar_samples;
            prm.llogl_refinements = parse_int_list(est_llogl);

            bool needs_sequence = false;
            for (EstimateId id : ids)
                needs_sequence |= id != EstimateId::BAR && id != EstimateId::LLOGL;
            SequenceResult seq;
            if (needs_sequence) {
                const std::vector<double> schedule = est_schedule.empty()
                                                         ? default_truncation_schedule()
                                                         : parse_double_list(est_schedule);
                seq = truncated_sequence(spec, mesh, make_config(est_cfg), schedule);
            }

            std::vector<EstimateCheck> rows;
            for (EstimateId id : ids) {
                const auto part = check_estimate(id, seq, spec, prm);
                rows.insert(rows.end(), part.begin(), part.end());
            }
            std::ostringstream csv;
            write_ledger_csv(csv, rows);
            write_output(est_out, csv.str());

            if (needs_sequence && !seq.all_converged) return kExitNonConvergence;
            if (est_strict)
                for (const EstimateCheck& c : rows)
                    if (is_explicit_estimate(c.id) && c.applicable && !c.passed)
                        return kExitStrictFailure;
            return kExitOk;
        }

        if (*c_exponents) {
            const ProblemSpec spec = make_spec(exp_spec);
            const RadialMesh mesh = build_mesh(spec, exp_spec.M, exp_spec.grading);
            const SolveResult res = oracle_solve(spec, mesh);
            // Transform asymptotics of the power-law profile.
            const double predicted = spec.theta < 1.0 && spec.source.is_power_law()
                                         ? (2.0 - spec.source.gamma) / (1.0 - spec.theta)
                                         : kNaN;
            const ExponentFit fit = fit_decay_slope(res.u, exp_window[0], exp_window[1], predicted);
            const ThresholdResult q = gradient_integrability_threshold(
                spec, exp_qrange[0], exp_qrange[1], parse_int_list(exp_refinements),
                exp_spec.grading, exp_delta);
            write_output(exp_out, exponent_study_json(fit, q).dump(2) + "\n");
            return kExitOk;
        }

        if (*c_phase) {
            const int ts = pd_theta_steps > 0 ? pd_theta_steps : pd_grid;
            const int ms = pd_m_steps > 0 ? pd_m_steps : pd_grid;
            const auto cells = phase_diagram_grid(pd_N, ts, pd_m_min, pd_m_max, ms);
            std::ostringstream csv;
            write_phase_csv(csv, cells);
            write_output(pd_out, csv.str());
            return kExitOk;
        }
    } catch (const std::exception& e) {
        std::cerr << "degell: " << e.what() << "\n";
        return kExitInvalid;
    }
    return kExitInvalid;
}

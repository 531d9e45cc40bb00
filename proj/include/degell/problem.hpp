#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "degell/mesh.hpp"
#include "degell/util.hpp"

namespace degell {

/// Bounded measurable diffusion coefficient a(r) with declared bounds
/// 0 < alpha <= a <= beta.
struct Coefficient {
    enum class Kind { constant, sinusoidal } kind = Kind::constant;
    double value = 1.0;                             // constant
    double base = 1.0, amplitude = 0.0, frequency = 1.0;  // base + amp*sin(2*pi*freq*r)

    static Coefficient constant(double c) {
        Coefficient k;
        k.kind = Kind::constant;
        k.value = c;
        return k;
    }
    static Coefficient sinusoidal(double base, double amplitude, double frequency) {
        Coefficient k;
        k.kind = Kind::sinusoidal;
        k.base = base;
        k.amplitude = amplitude;
        k.frequency = frequency;
        return k;
    }

    double operator()(double r) const {
        if (kind == Kind::constant) return value;
        return base + amplitude * std::sin(2.0 * M_PI * frequency * r);
    }
    double alpha() const { return kind == Kind::constant ? value : base - std::abs(amplitude); }
    double beta() const { return kind == Kind::constant ? value : base + std::abs(amplitude); }
};

/// Right-hand side. power_law means f(r) = amp * r^{-gamma}; tabulated carries
/// nodal values on the solve mesh (piecewise linear in between).
struct Source {
    enum class Kind { power_law, tabulated } kind = Kind::power_law;
    double gamma = 0.0;
    double amp = 1.0;
    std::vector<double> values;

    static Source power_law(double gamma, double amp) {
        Source s;
        s.kind = Kind::power_law;
        s.gamma = gamma;
        s.amp = amp;
        return s;
    }
    static Source tabulated(std::vector<double> nodal) {
        Source s;
        s.kind = Kind::tabulated;
        s.values = std::move(nodal);
        return s;
    }

    bool is_power_law() const { return kind == Kind::power_law; }

    /// Pointwise value; tabulated sources need the mesh that carries them.
    double eval(double r, const RadialMesh* mesh = nullptr) const {
        if (kind == Kind::power_law) {
            if (r == 0.0) return gamma > 0.0 ? sign(amp) * kInf : (gamma == 0.0 ? amp : 0.0);
            return amp * std::pow(r, -gamma);
        }
        if (mesh == nullptr) throw std::invalid_argument("Source::eval: tabulated source needs its mesh");
        return NodalField(*mesh, values)(r);
    }
};

enum class DomainMode { ball, annulus };

/// Full problem data for the radial equation
///   -(r^{N-1} a(r) u'/(1+|u|)^theta)' = r^{N-1} f(r),  u(outer_radius) = 0,
/// with either a natural condition at r = 0 (ball) or a Dirichlet value for
/// the transformed variable w = psi_theta(u) at r_min (annulus).
struct ProblemSpec {
    int N = 3;
    double theta = 0.0;
    Coefficient coefficient = Coefficient::constant(1.0);
    Source source = Source::power_law(0.0, 0.0);
    DomainMode mode = DomainMode::ball;
    double r_min = 0.0;                // annulus only
    std::optional<double> inner_w;     // annulus Dirichlet datum in the w variable
    double outer_radius = 1.0;

    void validate() const {
        if (N < 3) throw std::invalid_argument("ProblemSpec: N must be >= 3");
        if (!(theta >= 0.0 && theta <= 1.0))
            throw std::invalid_argument("ProblemSpec: theta must lie in [0,1]");
        if (!(outer_radius > 0.0))
            throw std::invalid_argument("ProblemSpec: outer_radius must be positive");
        if (!(coefficient.alpha() > 0.0))
            throw std::invalid_argument("ProblemSpec: coefficient lower bound must be positive");
        // Sampled bound check: declared alpha <= a(r) <= beta on the domain.
        const double lo = mode == DomainMode::annulus ? r_min : 0.0;
        const double al = coefficient.alpha(), be = coefficient.beta();
        constexpr int kSamples = 10000;
        for (int i = 0; i <= kSamples; ++i) {
            const double r = lo + (outer_radius - lo) * static_cast<double>(i) / kSamples;
            const double a = coefficient(r);
            if (a < al * (1.0 - 1e-12) || a > be * (1.0 + 1e-12))
                throw std::invalid_argument("ProblemSpec: coefficient leaves its declared bounds");
        }
        if (source.is_power_law() && !(source.gamma < N))
            throw std::invalid_argument("ProblemSpec: power-law source needs gamma < N");
        if (mode == DomainMode::annulus) {
            if (!(r_min > 0.0 && r_min < outer_radius))
                throw std::invalid_argument("ProblemSpec: annulus needs 0 < r_min < outer_radius");
            if (!inner_w.has_value() && !has_closed_form_w())
                throw std::invalid_argument(
                    "ProblemSpec: annulus needs an inner w datum (no closed form available)");
        }
    }

    /// The linear problem in w has a closed form for a constant coefficient
    /// and an untruncated power-law source (the ball-regular branch, zero at
    /// the outer radius).
    bool has_closed_form_w() const {
        return coefficient.kind == Coefficient::Kind::constant && source.is_power_law();
    }

    double closed_form_w(double r) const {
        if (!has_closed_form_w()) throw std::logic_error("closed_form_w: not available");
        const double c = coefficient.value;
        const double R = outer_radius;
        if (std::abs(2.0 - source.gamma) < 1e-12)
            return source.amp / (c * (N - 2.0)) * std::log(R / r);
        const double A = -source.amp / (c * (2.0 - source.gamma) * (N - source.gamma));
        return A * (std::pow(r, 2.0 - source.gamma) - std::pow(R, 2.0 - source.gamma));
    }

    double closed_form_w_prime(double r) const {
        if (!has_closed_form_w()) throw std::logic_error("closed_form_w_prime: not available");
        const double c = coefficient.value;
        if (std::abs(2.0 - source.gamma) < 1e-12) return -source.amp / (c * (N - 2.0) * r);
        const double A = -source.amp / (c * (2.0 - source.gamma) * (N - source.gamma));
        return A * (2.0 - source.gamma) * std::pow(r, 1.0 - source.gamma);
    }

    /// Dirichlet value of w at the inner radius (annulus mode).
    double inner_w_value() const {
        if (mode != DomainMode::annulus) return 0.0;
        if (inner_w.has_value()) return *inner_w;
        return closed_form_w(r_min);
    }

    double domain_inner() const { return mode == DomainMode::annulus ? r_min : 0.0; }
};

/// Solver-facing mesh builder; resolutions below 8 cells cannot carry a solve.
inline RadialMesh build_mesh(const ProblemSpec& spec, int M, double grading = 3.0) {
    if (M < 8) throw std::invalid_argument("build_mesh: need at least 8 cells");
    return make_graded_mesh(spec.domain_inner(), spec.outer_radius, M, grading);
}

}  // namespace degell

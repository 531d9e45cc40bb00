#include "degell/norms.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "degell/exponents.hpp"
#include "degell/problem.hpp"
#include "degell/solver.hpp"

using namespace degell;

namespace {

// Nodal sampling of a radial profile; when the profile is singular at the
// origin, the origin node takes the value of the first positive node.
NodalField sample(const RadialMesh& mesh, double (*f)(double)) {
    std::vector<double> v(mesh.nodes.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        double x = f(mesh.nodes[i]);
        if (!std::isfinite(x)) x = f(mesh.nodes[1]);
        v[i] = x;
    }
    return NodalField(mesh, std::move(v));
}

double inv_square_minus_one(double r) { return 1.0 / (r * r) - 1.0; }
double one_minus_r(double r) { return 1.0 - r; }

}  // namespace

TEST(LebesgueNorm, ConstantFieldRecoversTheBallVolume) {
    const auto mesh = make_graded_mesh(0.0, 1.0, 64, 1.0);
    NodalField one(mesh, std::vector<double>(65, 1.0));
    const double vol = 4.0 * M_PI / 3.0;
    EXPECT_NEAR(lebesgue_norm(one, 1.0, 3), vol, 1e-12 * vol);
    for (double p : {1.5, 2.0})
        EXPECT_NEAR(lebesgue_norm(one, p, 3), std::pow(vol, 1.0 / p), 1e-12 * vol);
    EXPECT_THROW(lebesgue_norm(one, 0.5, 3), std::domain_error);
}

TEST(LebesgueNorm, SingularProfileConvergesToTheClosedForm) {
    // omega * int_0^1 (r^{-2}-1) r^2 dr = 4 pi * 2/3.
    double prev_err = kInf;
    for (int M : {256, 1024}) {
        const auto mesh = make_graded_mesh(0.0, 1.0, M, 3.0);
        const auto u = sample(mesh, inv_square_minus_one);
        const double got = lebesgue_integral_abs_pow(u, 1.0, 3);
        const double err = std::abs(got - 8.0 * M_PI / 3.0);
        EXPECT_LT(err, prev_err);
        prev_err = err;
    }
    EXPECT_LT(prev_err, 1e-3);
}

TEST(W11Seminorm, LinearProfileIsExact) {
    const auto mesh = make_graded_mesh(0.0, 1.0, 32, 1.0);
    const auto u = sample(mesh, one_minus_r);
    EXPECT_NEAR(w11_seminorm(u, 3), 4.0 * M_PI / 3.0, 1e-13);
    NodalField c(mesh, std::vector<double>(33, 7.0));
    EXPECT_EQ(w11_seminorm(c, 3), 0.0);
}

TEST(WeightedGradientEnergy, UnweightedCaseMatchesW11Square) {
    const auto mesh = make_graded_mesh(0.0, 1.0, 32, 1.0);
    const auto u = sample(mesh, one_minus_r);
    EXPECT_NEAR(weighted_gradient_energy(u, 0.0, 3), 4.0 * M_PI / 3.0, 1e-12);
    NodalField z = NodalField::zeros(mesh);
    EXPECT_EQ(weighted_gradient_energy(z, 1.5, 3), 0.0);
}

TEST(TruncationEnergy, SplitsCellsAtTheCrossings) {
    // u = 1 - r on the unit ball, truncated at 1/2: gradient survives on
    // {u < 1/2} = (1/2, 1): int_{1/2}^{1} r^2 dr = 7/24.
    const auto mesh = make_graded_mesh(0.0, 1.0, 64, 1.0);
    const auto u = sample(mesh, one_minus_r);
    EXPECT_NEAR(truncation_dirichlet_energy(u, 0.5, 3), 4.0 * M_PI * 7.0 / 24.0, 1e-12);
    // Large k: nothing truncated.
    EXPECT_NEAR(truncation_dirichlet_energy(u, 10.0, 3), 4.0 * M_PI / 3.0, 1e-12);
}

TEST(LevelLimitedIntegrals, MatchHandComputedPieces) {
    // u = 1 - r: {u >= 1/2} = (0, 1/2): int_0^{1/2} r^2 dr = 1/24.
    const auto mesh = make_graded_mesh(0.0, 1.0, 64, 1.0);
    const auto u = sample(mesh, one_minus_r);
    EXPECT_NEAR(w11_on_level(u, 0.5, 3), 4.0 * M_PI / 24.0, 1e-12);
    EXPECT_NEAR(w11_on_ball(u, 0.5, 3), 4.0 * M_PI / 24.0, 1e-12);
    // (1+|u|)^2 on the whole ball, via k = 0.
    const double got = lebesgue_pow_on_level(u, 2.0, 0.0, 3, true);
    // int (2-r)^2 r^2 dr = int (4 r^2 - 4 r^3 + r^4) = 4/3 - 1 + 1/5.
    EXPECT_NEAR(got, 4.0 * M_PI * (4.0 / 3.0 - 1.0 + 0.2), 1e-12);
}

TEST(DistributionFunction, ConstantAndZeroFields) {
    const auto mesh = make_graded_mesh(0.0, 1.0, 16, 1.0);
    NodalField c(mesh, std::vector<double>(17, 2.0));
    const auto dist = distribution_function(c, {1.0, 2.0, 3.0}, 3);
    const double vol = 4.0 * M_PI / 3.0;
    EXPECT_NEAR(dist[0].second, vol, 1e-12);
    EXPECT_EQ(dist[1].second, 0.0);  // strict inequality: right-continuous at t = |c|
    EXPECT_EQ(dist[2].second, 0.0);
    NodalField z = NodalField::zeros(mesh);
    for (auto [t, m] : distribution_function(z, {0.5, 1.0}, 3)) EXPECT_EQ(m, 0.0);
}

TEST(DistributionFunction, InvertsThePowerProfile) {
    // u = r^{-2} - 1 on the ball: meas{|u| > t} = (4 pi/3)(1+t)^{-3/2}.
    const auto mesh = make_graded_mesh(0.0, 1.0, 2048, 3.0);
    const auto u = sample(mesh, inv_square_minus_one);
    const std::vector<double> ts{0.5, 1.0, 3.0, 10.0};
    const auto dist = distribution_function(u, ts, 3);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double expect = 4.0 * M_PI / 3.0 * std::pow(1.0 + ts[i], -1.5);
        EXPECT_NEAR(dist[i].second, expect, 1e-3 * expect) << "t=" << ts[i];
    }
    // Nonincreasing in t.
    for (std::size_t i = 0; i + 1 < dist.size(); ++i)
        EXPECT_LE(dist[i + 1].second, dist[i].second);
    EXPECT_THROW(distribution_function(u, {}, 3), std::invalid_argument);
}

TEST(FitDecaySlope, RecoversPurePowers) {
    const auto mesh = make_graded_mesh(0.0, 1.0, 1024, 3.0);
    for (double s : {0.5, 1.0, 1.6, 2.0}) {
        std::vector<double> v(mesh.nodes.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double r = mesh.nodes[i] > 0.0 ? mesh.nodes[i] : mesh.nodes[1];
            v[i] = std::pow(r, -s);
        }
        const auto fit = fit_decay_slope(NodalField(mesh, v), 1e-3, 1e-2, -s);
        EXPECT_NEAR(fit.fitted_slope, -s, 1e-3 * s);
        EXPECT_LT(fit.relative_gap, 1e-3);
    }
}

TEST(FitDecaySlope, FlatFieldHasZeroSlope) {
    const auto mesh = make_graded_mesh(0.0, 1.0, 256, 1.0);
    NodalField c(mesh, std::vector<double>(257, 3.0));
    const auto fit = fit_decay_slope(c, 0.1, 0.9);
    EXPECT_NEAR(fit.fitted_slope, 0.0, 1e-12);
    EXPECT_TRUE(std::isnan(fit.relative_gap));
}

TEST(FitDecaySlope, RejectsBadWindows) {
    const auto mesh = make_graded_mesh(0.0, 1.0, 64, 1.0);
    NodalField c(mesh, std::vector<double>(65, 1.0));
    EXPECT_THROW(fit_decay_slope(c, 0.5, 0.51), std::invalid_argument);  // < 8 nodes
    EXPECT_THROW(fit_decay_slope(c, 0.0, 0.5), std::invalid_argument);
    NodalField neg(mesh, std::vector<double>(65, -1.0));
    EXPECT_THROW(fit_decay_slope(neg, 0.1, 0.9), std::domain_error);
}

TEST(GradientPowIntegral, ReducesToW11AtExponentOne) {
    const auto mesh = make_graded_mesh(0.0, 1.0, 128, 2.0);
    const auto u = sample(mesh, inv_square_minus_one);
    const double a = gradient_pow_integral(u, 1.0, 3);
    const double b = w11_seminorm(u, 3);
    EXPECT_NEAR(a, b, 1e-12 * b);
}

TEST(IntegrabilityThreshold, FindsThePowerCountingExponent) {
    // gamma = 2.4, theta = 3/4: |u'| ~ r^{-2.6}, so the integral of |u'|^q r^2
    // diverges exactly for q > 15/13.
    ProblemSpec spec;
    spec.N = 3;
    spec.theta = 0.75;
    spec.source = Source::power_law(2.4, 1.0);
    const auto out =
        gradient_integrability_threshold(spec, 1.0, 1.6, {128, 256, 512, 1024}, 3.0, 0.05);
    EXPECT_FALSE(out.no_blowup);
    EXPECT_NEAR(out.q_star, 15.0 / 13.0, 0.05 * 15.0 / 13.0);
}

TEST(IntegrabilityThreshold, RegularCaseReportsNoBlowup) {
    ProblemSpec spec;
    spec.N = 3;
    spec.theta = 0.75;
    spec.source = Source::power_law(1.0, 1.0);
    const auto out =
        gradient_integrability_threshold(spec, 1.0, 2.0, {128, 256, 512}, 3.0, 0.05);
    EXPECT_TRUE(out.no_blowup);
    EXPECT_EQ(out.q_star, 2.0);
    EXPECT_THROW(gradient_integrability_threshold(spec, 1.0, 2.0, {128, 256}, 3.0, 0.05),
                 std::invalid_argument);
}

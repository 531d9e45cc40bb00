#include "degell/residuals.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "degell/solver.hpp"

using namespace degell;

namespace {

ProblemSpec annulus_closed_form() {
    ProblemSpec spec;
    spec.N = 3;
    spec.theta = 0.75;
    spec.source = Source::power_law(2.5, 1.0);
    spec.mode = DomainMode::annulus;
    spec.r_min = 0.01;
    return spec;
}

}  // namespace

TEST(RadialBump, ShapeAndDerivative) {
    const RadialBump phi{0.2, 0.8};
    EXPECT_EQ(phi(0.2), 0.0);
    EXPECT_EQ(phi(0.8), 0.0);
    EXPECT_EQ(phi(0.1), 0.0);
    EXPECT_NEAR(phi(0.5), 1.0, 1e-15);  // normalized peak
    // Central differences against the closed-form derivative.
    for (double r : {0.25, 0.4, 0.55, 0.7}) {
        const double h = 1e-6;
        EXPECT_NEAR(phi.derivative(r), (phi(r + h) - phi(r - h)) / (2.0 * h), 1e-7);
    }
    // Reported W^{1,inf} size dominates a dense sample of |phi'|.
    double max_slope = 0.0;
    for (int i = 0; i <= 10000; ++i)
        max_slope = std::max(max_slope, std::abs(phi.derivative(0.2 + 0.6 * i / 10000.0)));
    EXPECT_GE(phi.w1inf() * (1.0 + 1e-9), max_slope);
    EXPECT_NEAR(phi.w1inf(), max_slope, 1e-3 * max_slope);
}

TEST(DefaultBumps, StayInsideTheDomain) {
    ProblemSpec spec = annulus_closed_form();
    const auto bumps = default_test_bumps(spec);
    ASSERT_EQ(bumps.size(), 5u);
    for (const auto& b : bumps) {
        EXPECT_GT(b.a, spec.r_min);
        EXPECT_LT(b.b, spec.outer_radius);
    }
}

TEST(DistributionalResidual, ZeroProblemIsExactlyConsistent) {
    ProblemSpec spec;
    spec.N = 3;
    spec.theta = 0.5;
    spec.source = Source::power_law(0.0, 0.0);
    const auto mesh = build_mesh(spec, 64, 1.0);
    const auto res = oracle_solve(spec, mesh);
    const auto bumps = default_test_bumps(spec);
    EXPECT_EQ(distributional_residual(res, spec, bumps), 0.0);
}

TEST(DistributionalResidual, DecreasesUnderRefinement) {
    const ProblemSpec spec = annulus_closed_form();
    const std::vector<RadialBump> bumps{{0.2, 0.8}};
    auto resid = [&](int M) {
        const auto res = oracle_solve(spec, build_mesh(spec, M, 3.0));
        return distributional_residual(res, spec, bumps);
    };
    const double r512 = resid(512);
    const double r2048 = resid(2048);
    EXPECT_LT(r2048, 1e-4);
    EXPECT_LT(r2048, r512);
}

TEST(DistributionalResidual, RejectsBumpsOutsideTheDomain) {
    const ProblemSpec spec = annulus_closed_form();
    const auto res = oracle_solve(spec, build_mesh(spec, 64, 1.0));
    const std::vector<RadialBump> bad{{0.001, 0.5}};  // starts below r_min
    EXPECT_THROW(distributional_residual(res, spec, bad), std::invalid_argument);
    EXPECT_THROW(distributional_residual(res, spec, {}), std::invalid_argument);
}

TEST(EntropyResidual, VanishesWhenComparedAgainstItself) {
    const ProblemSpec spec = annulus_closed_form();
    const auto mesh = build_mesh(spec, 128, 3.0);
    const auto res = picard_solve(spec, mesh);
    EXPECT_EQ(entropy_residual(res, spec, res.u, 1.0), 0.0);
}

TEST(EntropyResidual, GalerkinIdentityForTheRegularCase) {
    // Bounded solution (max ~ 0.6), k = 1: the truncation is inactive and the
    // inequality against phi = 0 reduces to the discrete weak identity.
    ProblemSpec spec;
    spec.N = 3;
    spec.theta = 0.75;
    spec.source = Source::power_law(1.0, 1.0);
    const auto mesh = build_mesh(spec, 2048, 2.0);
    const auto res = picard_solve(spec, mesh);
    ASSERT_TRUE(res.converged);
    const double defect = entropy_residual(res, spec, NodalField::zeros(mesh), 1.0);
    EXPECT_LE(std::abs(defect), 1e-6);
}

TEST(EntropyResidual, ZeroData) {
    ProblemSpec spec;
    spec.N = 3;
    spec.theta = 0.5;
    spec.source = Source::power_law(0.0, 0.0);
    const auto mesh = build_mesh(spec, 64, 1.0);
    const auto res = picard_solve(spec, mesh);
    EXPECT_EQ(entropy_residual(res, spec, NodalField::zeros(mesh), 1.0), 0.0);
}

TEST(EntropyResidual, ValidatesItsInputs) {
    const ProblemSpec spec = annulus_closed_form();
    const auto mesh = build_mesh(spec, 64, 1.0);
    const auto res = picard_solve(spec, mesh);
    EXPECT_THROW(entropy_residual(res, spec, NodalField::zeros(mesh), 0.0), std::domain_error);
    const auto other = build_mesh(spec, 32, 1.0);
    EXPECT_THROW(entropy_residual(res, spec, NodalField::zeros(other), 1.0),
                 std::invalid_argument);
}

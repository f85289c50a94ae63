#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "gmtlab/potential.hpp"

using namespace gmtlab;

TEST(Mollifier, MassIsIntegralOfDensity) {
    for (auto kind : {Mollifier::cone, Mollifier::smooth})
        for (int d : {1, 2, 3}) {
            const double rho = 1.7;
            const double area = 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
            EXPECT_EQ(mollifier_mass(kind, d, rho, rho), 1.0);
            EXPECT_EQ(mollifier_mass(kind, d, rho, 0.0), 0.0);
            EXPECT_EQ(mollifier_density(kind, d, rho, rho), 0.0);
            for (double r : {0.2, 0.9, 1.5}) {
                const double m = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                    [&](double t) { return area * std::pow(t, d - 1) * mollifier_density(kind, d, rho, t); }, 0.0, r);
                EXPECT_NEAR(mollifier_mass(kind, d, rho, r), m, 1e-13);
            }
        }
}

TEST(Divergence, EmptyMeasureGivesZero) {
    DivergenceOptions o;
    const auto rep = riesz_divergence_check(DiscreteMeasure(2, {}, {}), KernelSpec::riesz(2, 1.0), o);
    EXPECT_EQ(rep.max_residual, 0.0);
    DiscreteMeasure massless(2, {0.3, 0.1}, {0.0});
    EXPECT_EQ(riesz_divergence_check(massless, KernelSpec::riesz(2, 1.0), o).max_residual, 0.0);
}

TEST(Divergence, RejectsBadInput) {
    DiscreteMeasure atom(2, {0, 0}, {1});
    DivergenceOptions o;
    o.h = 0.3;
    EXPECT_THROW(riesz_divergence_check(atom, KernelSpec::riesz(2, 1.0), o), InvalidArgument);
    o.h = 0.125;
    EXPECT_THROW(riesz_divergence_check(atom, KernelSpec::riesz(2, 1.5), o), InvalidArgument);
    EXPECT_THROW(riesz_divergence_check(atom, KernelSpec::planar_conjugate(), o), InvalidArgument);
}

TEST(Divergence, CalibratedConstantTendsToSphereArea) {
    double prev = INFINITY;
    for (double h : {0.125, 0.0625, 0.03125}) {
        DivergenceOptions o;
        o.h = h;
        const double b = calibrate_divergence_constant(2, o);
        const double err = std::fabs(b - 2.0 * std::numbers::pi);
        EXPECT_LT(err, 0.35 * prev);
        prev = err;
    }
    EXPECT_LT(prev, 1e-2);
    DivergenceOptions o3;
    o3.h = 0.125;
    o3.mollifier = Mollifier::smooth;
    EXPECT_NEAR(calibrate_divergence_constant(3, o3), 4.0 * std::numbers::pi, 0.03 * 4.0 * std::numbers::pi);
}

TEST(Divergence, SingleAtomSecondOrderWithSmoothMollifier) {
    DiscreteMeasure atom(2, {0, 0}, {1});
    std::vector<double> res;
    for (double h : {0.125, 0.0625, 0.03125}) {
        DivergenceOptions o;
        o.h = h;
        o.mollifier = Mollifier::smooth;
        res.push_back(riesz_divergence_check(atom, KernelSpec::riesz(2, 1.0), o).max_residual);
    }
    EXPECT_NEAR(res[1] / res[0], 0.25, 0.05);
    EXPECT_NEAR(res[2] / res[1], 0.25, 0.05);
}

TEST(Divergence, SeparatedAtomsSuperpose) {
    // Grid-aligned atoms whose mollified supports are disjoint see the same
    // local residual pattern as a single atom.
    DivergenceOptions o;
    DiscreteMeasure one(2, {0, 0}, {1});
    DiscreteMeasure two(2, {0, 0, 4, 0}, {1, 1});
    const auto a = riesz_divergence_check(one, KernelSpec::riesz(2, 1.0), o);
    const auto b = riesz_divergence_check(two, KernelSpec::riesz(2, 1.0), o);
    EXPECT_NEAR(a.max_residual, b.max_residual, 0.02 * a.max_residual);
    EXPECT_EQ(a.b, b.b);
}

TEST(Divergence, ResidualScalesWithMass) {
    DivergenceOptions o;
    DiscreteMeasure one(2, {0.1, 0.2}, {1});
    DiscreteMeasure heavy(2, {0.1, 0.2}, {4});
    const double a = riesz_divergence_check(one, KernelSpec::riesz(2, 1.0), o).max_residual;
    const double b = riesz_divergence_check(heavy, KernelSpec::riesz(2, 1.0), o).max_residual;
    EXPECT_NEAR(b, 4 * a, 1e-12 * b);
}

TEST(Pv, EmptyMeasureIsZero) {
    const auto rep = pv_fractional_check(DiscreteMeasure(2, {}, {}), KernelSpec::riesz(2, 1.5), {0, 0});
    EXPECT_EQ(rep.residual, std::vector<double>({0.0, 0.0}));
}

TEST(Pv, RejectsBadInput) {
    DiscreteMeasure atom(2, {0.5, 0}, {1});
    EXPECT_THROW(pv_fractional_check(atom, KernelSpec::riesz(2, 1.5), {0, 0}), InvalidArgument);
    DiscreteMeasure far(2, {2, 0}, {1});
    EXPECT_THROW(pv_fractional_check(far, KernelSpec::riesz(2, 0.5), {0, 0}), InvalidArgument);
    DiscreteMeasure d3(3, {2, 0, 0}, {1});
    EXPECT_THROW(pv_fractional_check(d3, KernelSpec::riesz(3, 2.5), {0, 0, 0}), InvalidArgument);
}

TEST(Pv, MirrorSymmetricAtomsCancelExactly) {
    DiscreteMeasure pair2(2, {1.3, 1.1, -1.3, -1.1}, {0.7, 0.7});
    EXPECT_EQ(pv_fractional_check(pair2, KernelSpec::riesz(2, 1.5), {0, 0}).residual,
              std::vector<double>({0.0, 0.0}));
    DiscreteMeasure pair1(1, {2.5, -2.5}, {1, 1});
    EXPECT_EQ(pv_fractional_check(pair1, KernelSpec::riesz(1, 0.4), {0}).residual, std::vector<double>({0.0}));
}

namespace {

// Truncation of the full (vanishing) integral: the inner ball contributes
// -(Delta R / 2d) |S^{d-1}| tau^{s-d+1}/(s-d+1) and the exterior R(x0) |S^{d-1}| A^{d-p}/(p-d),
// for a unit atom at distance rho on the first axis.
double truncation_prediction(int d, double s, double rho, double tau, double A) {
    const double area = d == 1 ? 2.0 : 2.0 * std::numbers::pi;
    const double p = 2.0 * d + 1.0 - s;
    const double r0 = std::pow(rho, -s);
    // Laplacian of the first component of y -> (rho - y)/|rho e1 - y|^{s+1} at y = 0.
    // Second derivatives of f(y) = (rho - y1) |rho e1 - y|^{-s-1} at 0:
    // d11 f = s (s+1) rho^{-s-2}, d22 f = -(s+1) rho^{-s-2}.
    double delta_r = s * (s + 1.0) * std::pow(rho, -s - 2.0);
    if (d == 2) delta_r += -(s + 1.0) * std::pow(rho, -s - 2.0);
    return delta_r / (2.0 * d) * area * std::pow(tau, s - d + 1.0) / (s - d + 1.0) -
           r0 * area * std::pow(A, d - p) / (p - d);
}

}  // namespace

TEST(Pv, SingleAtomMatchesTruncationAsymptotics) {
    for (auto [d, s] : {std::pair{1, 0.5}, std::pair{2, 1.5}, std::pair{2, 1.2}}) {
        std::vector<double> pos(d, 0.0), x0(d, 0.0);
        pos[0] = 2.0;
        const DiscreteMeasure atom(d, pos, {1.0});
        double prev = INFINITY;
        for (double tau : {0.1, 0.05, 0.025}) {
            PvPlan plan;
            plan.tau = tau;
            plan.outer = 1.0 / tau;
            const auto rep = pv_fractional_check(atom, KernelSpec::riesz(d, s), x0, plan);
            const double pred = truncation_prediction(d, s, 2.0, tau, plan.outer);
            // Next Taylor term is O(tau^{s-d+3}).
            EXPECT_NEAR(rep.residual[0], pred, 2.0 * std::pow(tau, s - d + 3.0)) << d << " " << s << " " << tau;
            if (d == 2) EXPECT_EQ(rep.residual[1], 0.0);
            EXPECT_LT(std::fabs(rep.residual[0]), prev);
            prev = std::fabs(rep.residual[0]);
        }
    }
}

TEST(Pv, OneDimensionalAgreesWithGaussKronrod) {
    // Independent route: unpaired integrand on both half-lines, split at the atoms.
    const DiscreteMeasure mu(1, {2.0, -3.5, 4.0}, {1.0, 0.5, 2.0});
    const double s = 0.6, tau = 0.05, A = 30.0, p = 3.0 - s;
    auto R = [&](double y) {
        double acc = 0.0;
        for (std::size_t j = 0; j < mu.size(); ++j) {
            const double v = mu.point(j)[0] - y;
            if (v == 0.0) continue;  // node rounded onto the atom; its weight u^3 is negligible
            acc += mu.weight(j) * v / std::pow(std::fabs(v), s + 1.0);
        }
        return acc;
    };
    const double r0 = R(0.0);
    auto g = [&](double x) { return (r0 - R(x)) / std::pow(std::fabs(x), p); };
    const std::vector<double> cuts{-A, -4.0, -3.5, -2.0, -tau, tau, 2.0, 3.5, 4.0, A};
    double ref = 0.0;
    for (std::size_t t = 0; t + 1 < cuts.size(); ++t) {
        if (cuts[t] == -tau) continue;
        // x = end + (mid - end) u^4 on each half panel removes the endpoint singularities.
        const double mid = 0.5 * (cuts[t] + cuts[t + 1]);
        for (double end : {cuts[t], cuts[t + 1]}) {
            const double len = mid - end;
            ref += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                [&](double u) { return g(end + len * u * u * u * u) * 4.0 * std::fabs(len) * u * u * u; }, 0.0, 1.0,
                15, 1e-13);
        }
    }
    PvPlan plan;
    plan.tau = tau;
    plan.outer = A;
    const auto rep = pv_fractional_check(mu, KernelSpec::riesz(1, s), {0.0}, plan);
    EXPECT_NEAR(rep.residual[0], ref, 1e-7 * (1 + std::fabs(ref)));
}

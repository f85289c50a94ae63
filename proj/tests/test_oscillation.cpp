#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "gmtlab/oscillation.hpp"
#include "gmtlab/regularity.hpp"
#include "gmtlab/zoo.hpp"

using namespace gmtlab;

namespace {

const double kA2 = 128.0 * std::sqrt(2.0);

DiscreteMeasure random_measure(std::mt19937_64& rng, std::size_t n, int d, double scale = 1.0) {
    std::uniform_real_distribution<double> u(0.0, scale), w(0.5, 1.5);
    std::vector<double> c(n * d), m(n);
    for (double& x : c) x = u(rng);
    for (double& x : m) x = w(rng);
    return DiscreteMeasure(d, c, m);
}

RieszSystem single(const RieszSystem& sys, std::size_t c) {
    RieszSystem one;
    one.A = sys.A;
    one.cubes = {sys.cubes[c]};
    one.psi = {sys.psi[c]};
    one.rho = {sys.rho[c]};
    one.inner_mass = {sys.inner_mass[c]};
    one.psi_norm2 = {sys.psi_norm2[c]};
    one.index = {sys.index[c]};
    one.values = {sys.values[c]};
    return one;
}

}  // namespace

TEST(Bumps, LipschitzConstantsAreSharpUpperBounds) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    for (int d = 1; d <= 3; ++d)
        for (Profile p : {Profile::radial_hat, Profile::tensor_hat, Profile::coordinate_modulated}) {
            TestFunction f;
            f.profile = p;
            f.dim = d;
            f.axis = d - 1;
            f.bump1.assign(d, 0.0);
            f.bump2.assign(d, 100.0);
            f.bump_radius = 0.7;
            f.c1 = 1.0;
            const double L = bump_lipschitz(p, d, 0.7);
            double best = 0.0;
            for (int t = 0; t < 20000; ++t) {
                std::vector<double> x(d), y(d);
                for (int k = 0; k < d; ++k) {
                    x[k] = 0.5 * g(rng);
                    y[k] = x[k] + 1e-3 * g(rng);
                }
                best = std::max(best, std::fabs(f(x.data()) - f(y.data())) / distance(x.data(), y.data(), d));
            }
            EXPECT_LE(best, L * (1 + 1e-9)) << to_string(p) << " d=" << d;
            EXPECT_GT(best, 0.45 * L) << to_string(p) << " d=" << d;
        }
}

TEST(TestFunctions, SymmetricPlacementGivesEqualCoefficients) {
    // Symmetric about the origin.
    std::vector<double> c{-0.3, 0.1, 0.3, -0.1, -0.2, -0.05, 0.2, 0.05};
    const DiscreteMeasure mu(2, c, {1.0, 1.0, 2.0, 2.0});
    const std::vector<double> x0{0.0, 0.0}, y1{-0.25, 0.0}, y2{0.25, 0.0};
    const auto f = make_test_function(mu, x0, 1.0, kA2, Profile::radial_hat, 0, y1, y2, 0.2);
    EXPECT_FALSE(f.degenerate);
    EXPECT_NEAR(f.c1, f.c2, 1e-14 * f.c1);
    EXPECT_DOUBLE_EQ(f.lip_bound, 1.0);
}

TEST(TestFunctions, SingleAtomGivesFunctionVanishingOnSupport) {
    const DiscreteMeasure mu(2, {0.3, 0.4}, {2.0});
    const DyadicLattice lat(2, {0.0, 0.0}, -4, 0);
    const CubeAddress q = lat.cube_of_point(mu.point(0), -2);
    for (Profile p : {Profile::radial_hat, Profile::tensor_hat, Profile::coordinate_modulated}) {
        const auto f = make_test_function(mu, lat, q, kA2, p, 0, 5);
        EXPECT_TRUE(f.degenerate);
        EXPECT_EQ(f(mu.point(0)), 0.0);
        EXPECT_TRUE(audit_test_function(mu, f).ok());
    }
}

TEST(TestFunctions, RandomPlacementsPassTheFullAudit) {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 30; ++t) {
        const int d = 1 + t % 3;
        const auto mu = random_measure(rng, 300, d);
        const DyadicLattice lat(d, std::vector<double>(d, 0.0), -6, 0);
        const CubeAddress q = lat.cube_of_point(mu.point(t), -3 - t % 3);
        const double A = 101.0 * std::sqrt(static_cast<double>(d));
        const auto dict = make_dictionary(mu, lat, q, A, 2 + d, 100 + t);
        for (const auto& f : dict) {
            const auto a = audit_test_function(mu, f, 10'000, t);
            EXPECT_TRUE(a.ok()) << t;
            EXPECT_LE(a.max_quotient, 1.0 / DyadicLattice::side(q.level) * (1 + 1e-12));
            EXPECT_FALSE(f.degenerate);
        }
    }
}

TEST(TestFunctions, BadInputs) {
    const DiscreteMeasure mu(1, {0.0, 1.0}, {1.0, 1.0});
    const DyadicLattice lat(1, {0.0}, -3, 0);
    const CubeAddress q = lat.cube_of_point(mu.point(0), -1);
    EXPECT_THROW(make_test_function(mu, lat, q, 100.0, Profile::radial_hat, 0, 1), InvalidArgument);
    EXPECT_THROW(make_test_function(mu, lat, q, 200.0, Profile::coordinate_modulated, 1, 1), InvalidArgument);
    const CubeAddress far{-3, 1, {100000}, 0};
    EXPECT_THROW(make_test_function(mu, lat, far, 200.0, Profile::radial_hat, 0, 1), InvalidArgument);
    const std::vector<double> x0{0.5}, y1{0.4}, y2{0.6};
    EXPECT_THROW(make_test_function(mu, x0, 1.0, 200.0, Profile::radial_hat, 0, y1, y2, 0.2), InvalidArgument);
    EXPECT_THROW(oscillation_lower(mu, KernelSpec::riesz(1, 0.5), {}), InvalidArgument);
}

TEST(TestFunctions, DictionaryIsNestedAndSerialises) {
    std::mt19937_64 rng(3);
    const auto mu = random_measure(rng, 200, 2);
    const DyadicLattice lat(2, {0.0, 0.0}, -6, 0);
    const CubeAddress q = lat.cube_of_point(mu.point(0), -3);
    const auto small = make_dictionary(mu, lat, q, kA2, 5, 9);
    const auto big = make_dictionary(mu, lat, q, kA2, 12, 9);
    for (std::size_t j = 0; j < small.size(); ++j) EXPECT_EQ(test_function_json(small[j]), test_function_json(big[j]));
    EXPECT_EQ(big[0].profile, Profile::radial_hat);
    EXPECT_EQ(big[1].profile, Profile::tensor_hat);
    EXPECT_EQ(big[3].profile, Profile::coordinate_modulated);
    EXPECT_EQ(big[3].axis, 1);
    const std::string js = dictionary_json(small);
    EXPECT_NE(js.find("\"coefficients\""), std::string::npos);
    EXPECT_NE(js.find("\"bump_centers\""), std::string::npos);
    EXPECT_EQ(profile_from_string(to_string(Profile::tensor_hat)), Profile::tensor_hat);
    EXPECT_THROW(profile_from_string("box"), InvalidArgument);
}

TEST(Oscillation, SingleAtomIsZero) {
    const DiscreteMeasure mu(2, {0.3, 0.4}, {1.0});
    const DyadicLattice lat(2, {0.0, 0.0}, -4, 0);
    const CubeAddress q = lat.cube_of_point(mu.point(0), -2);
    const auto dict = make_dictionary(mu, lat, q, kA2, 8, 1);
    EXPECT_EQ(oscillation_lower(mu, KernelSpec::riesz(2, 1.0), dict).value, 0.0);
}

TEST(Oscillation, MatchesDirectPairingAndIsMonotoneInN) {
    // Two clusters a few cube sides apart.
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g(0.0, 0.05);
    std::vector<double> c;
    std::vector<double> w;
    for (int i = 0; i < 60; ++i) {
        c.push_back(g(rng));
        c.push_back(g(rng));
        w.push_back(1.0);
        c.push_back(0.7 + g(rng));
        c.push_back(0.2 + g(rng));
        w.push_back(2.0);
    }
    const DiscreteMeasure mu(2, c, w);
    const KernelSpec K = KernelSpec::riesz(2, 1.0);
    const DyadicLattice lat(2, {0.0, 0.0}, -5, 1);
    const CubeAddress q = lat.cube_of_point(mu.point(0), -2);
    const auto dict = make_dictionary(mu, lat, q, kA2, 24, 3);
    const auto r = oscillation_lower(mu, K, dict);
    EXPECT_GT(r.value, 0.0);
    const std::vector<double> one(mu.size(), 1.0);
    for (std::size_t j = 0; j < dict.size(); ++j) {
        const auto p = bilinear_pairing(mu, K, dict[j].on_support(mu), one);
        EXPECT_NEAR(r.values[j], norm(p), 1e-12 * (1 + norm(p)));
    }
    double prev = 0.0;
    for (std::size_t n = 1; n <= dict.size(); ++n) {
        const std::vector<TestFunction> prefix(dict.begin(), dict.begin() + n);
        const double v = oscillation_lower(mu, K, prefix).value;
        EXPECT_GE(v, prev);
        prev = v;
    }
    // Placements stay near the cube, so enlarging A keeps the dictionary.
    const auto wide = make_dictionary(mu, lat, q, 2 * kA2, 24, 3);
    EXPECT_GE(oscillation_lower(mu, K, wide).value, r.value);
}

TEST(Oscillation, FlatLineValueComesFromTheEnds) {
    const KernelSpec K = KernelSpec::riesz(2, 1.0);
    const DyadicLattice lat(2, {0.0, 0.0}, -6, 2);
    const CubeAddress q{-2, 2, {0, 0}, 0};
    auto theta = [&](double h, double L) {
        const auto mu = plane_measure(2, 1, h, L);
        return oscillation_lower(mu, K, make_dictionary(mu, lat, q, kA2, 32, 7)).value;
    };
    // Refining the grid changes little; lengthening the line drives it to 0.
    const double a = theta(1.0 / 32, 16.0), b = theta(1.0 / 128, 16.0);
    EXPECT_LT(std::fabs(a - b), 0.02 * a);
    const double far = theta(1.0 / 32, 64.0);
    EXPECT_NEAR(far / a, 0.25, 0.08);
}

TEST(Theta, ZeroFunctionAndVacuousCubes) {
    const DiscreteMeasure mu(1, {0.1, 0.2, 0.35}, {1.0, 1.0, 1.0});
    const DyadicLattice lat(1, {0.0}, -4, 0);
    const CubeAddress q = lat.cube_of_point(mu.point(0), -2);
    TestFunction zero;
    zero.dim = 1;
    zero.center = lat.center(q);
    zero.bump1 = zero.bump2 = zero.center;
    const auto r = theta_density_ratio(mu, KernelSpec::riesz(1, 0.5), lat, q, {zero});
    EXPECT_FALSE(r.vacuous);
    EXPECT_EQ(r.ratio, 0.0);
    const CubeAddress empty{-4, 1, {40}, 0};
    EXPECT_TRUE(theta_density_ratio(mu, KernelSpec::riesz(1, 0.5), lat, empty, {zero}).vacuous);
}

TEST(Theta, JointRescalingLeavesRatioUnchanged) {
    std::mt19937_64 rng(5);
    const auto mu = random_measure(rng, 150, 2);
    const KernelSpec K = KernelSpec::riesz(2, 1.5);
    const DyadicLattice lat(2, {0.0, 0.0}, -6, 1);
    const CubeAddress q = lat.cube_of_point(mu.point(3), -3);
    const auto r0 = theta_density_ratio(mu, K, lat, q, make_dictionary(mu, lat, q, kA2, 10, 2));
    const auto mu2 = mu.scaled(2.0, 3.0);
    const DyadicLattice lat2 = lat.rescaled(1);
    CubeAddress q2 = q;
    q2.level += 1;
    const auto r1 = theta_density_ratio(mu2, K, lat2, q2, make_dictionary(mu2, lat2, q2, kA2, 10, 2));
    EXPECT_GT(r0.ratio, 0.0);
    EXPECT_NEAR(r1.ratio, r0.ratio, 1e-10 * r0.ratio);
}

TEST(Theta, CantorRegularCubesHavePositiveRatios) {
    const auto mu = cantor_measure(2, 0.25, 4);
    const KernelSpec K = KernelSpec::riesz(2, 1.0);
    const DyadicLattice lat(2, {0.0, 0.0}, -7, -4);
    const auto table = populated_cubes(mu, lat, 1.0);
    std::vector<CubeAddress> cubes;
    for (std::size_t i : epsilon_regular_cubes(table, 0.5, 3)) cubes.push_back(table.cube(i));
    ASSERT_GT(cubes.size(), 10u);
    const auto rows = theta_table(mu, K, lat, cubes, kA2, 8, 1);
    for (const auto& r : rows) {
        EXPECT_FALSE(r.ratio.vacuous);
        EXPECT_GT(r.ratio.ratio, 0.0);
    }
    const std::string csv = theta_csv(rows, 2);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "level,c0,c1,mass_3Q,density,theta_lower,ratio,vacuous");
}

TEST(Riesz, TrivialCases) {
    std::mt19937_64 rng(6);
    const auto mu = random_measure(rng, 80, 2);
    const DyadicLattice lat(2, {0.0, 0.0}, -5, 0);
    const auto sys = build_riesz_system(mu, lat, kA2, 1);
    const auto rep = riesz_system_constant(mu, sys, {std::vector<double>(mu.size(), 0.0)});
    EXPECT_EQ(rep.constant, 0.0);
    EXPECT_EQ(dual_riesz_check(mu, sys, std::vector<double>(sys.cubes.size(), 0.0)), 0.0);
    EXPECT_TRUE(build_riesz_system(DiscreteMeasure(2, {}, {}), lat, kA2, 1).cubes.empty());
}

TEST(Riesz, SingleCubeCauchySchwarz) {
    std::mt19937_64 rng(7);
    const auto mu = random_measure(rng, 120, 2);
    const DyadicLattice lat(2, {0.0, 0.0}, -4, -1);
    const auto sys = build_riesz_system(mu, lat, kA2, 2);
    const auto samples = riesz_samples(mu, 10, 3);
    for (std::size_t c = 0; c < sys.cubes.size(); c += 7) {
        const RieszSystem one = single(sys, c);
        const double cs = sys.psi_norm2[c] / sys.rho[c];
        EXPECT_LE(cs, 4 * kA2 * kA2 * sys.inner_mass[c] / sys.rho[c]);
        const auto rep = riesz_system_constant(mu, one, samples);
        EXPECT_LE(rep.constant, cs * (1 + 1e-12));
        if (sys.psi_norm2[c] > 0.0) {
            // Equality when f is psi itself.
            const auto eq = riesz_system_constant(mu, one, {sys.psi[c].on_support(mu)});
            EXPECT_NEAR(eq.constant, cs, 1e-12 * cs);
            EXPECT_NEAR(dual_riesz_check(mu, one, std::vector<double>{2.5}), cs, 1e-12 * cs);
        }
    }
    const auto rep = riesz_system_constant(mu, sys, samples);
    EXPECT_EQ(rep.cs_violations, 0u);
    EXPECT_EQ(rep.sup_bound_violations, 0u);
}

TEST(Riesz, PrimalDualAndGramAgree) {
    std::mt19937_64 rng(8);
    const auto mu = random_measure(rng, 150, 2);
    const DyadicLattice lat(2, {0.0, 0.0}, -5, 0);
    const auto sys = build_riesz_system(mu, lat, kA2, 3);
    const double gram = riesz_gram_norm(mu, sys);
    auto samples = riesz_samples(mu, 20, 4);
    std::normal_distribution<double> g;
    std::vector<double> duals;
    for (int t = 0; t < 10; ++t) {
        std::vector<double> a(sys.cubes.size());
        for (double& x : a) x = std::fabs(g(rng));
        duals.push_back(dual_riesz_check(mu, sys, a));
        samples.push_back(riesz_synthesis(mu, sys, a));
    }
    const auto rep = riesz_system_constant(mu, sys, samples);
    for (std::size_t t = 0; t < duals.size(); ++t) {
        // The primal ratio at f = S a dominates the dual ratio of a.
        EXPECT_LE(duals[t], rep.ratios[samples.size() - duals.size() + t] * (1 + 1e-9));
        EXPECT_LE(duals[t], gram * (1 + 1e-9));
    }
    EXPECT_LE(rep.constant, gram * (1 + 1e-9));
    EXPECT_GT(rep.constant, 0.0);
}

TEST(Riesz, InvariantUnderPointPermutation) {
    std::mt19937_64 rng(9);
    const auto mu = random_measure(rng, 200, 2);
    std::vector<std::size_t> perm(mu.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto nu = mu.restricted(perm);
    const DyadicLattice lat(2, {0.0, 0.0}, -6, 0);
    const auto a = riesz_system_constant(mu, build_riesz_system(mu, lat, kA2, 5), riesz_samples(mu, 15, 6));
    const auto b = riesz_system_constant(nu, build_riesz_system(nu, lat, kA2, 5), riesz_samples(nu, 15, 6));
    ASSERT_EQ(a.ratios.size(), b.ratios.size());
    for (std::size_t j = 0; j < a.ratios.size(); ++j) EXPECT_NEAR(a.ratios[j], b.ratios[j], 1e-12 * a.ratios[j]);
}

TEST(Riesz, CantorConstantIsStableAcrossLevels) {
    std::vector<double> constants;
    for (int level = 4; level <= 5; ++level) {
        const auto mu = cantor_measure(2, 0.25, level);
        const auto [kmin, kmax] = DyadicLattice::default_window(mu);
        const DyadicLattice lat(2, {0.0, 0.0}, kmin, kmax);
        const auto sys = build_riesz_system(mu, lat, kA2, 3);
        const auto rep = riesz_system_constant(mu, sys, riesz_samples(mu, 50, 11));
        EXPECT_EQ(rep.cs_violations, 0u);
        EXPECT_EQ(rep.sup_bound_violations, 0u);
        EXPECT_TRUE(std::isfinite(rep.constant));
        constants.push_back(rep.constant);
    }
    EXPECT_LT(std::max(constants[0], constants[1]) / std::min(constants[0], constants[1]), 2.0);
    EXPECT_EQ(riesz_csv(build_riesz_system(cantor_measure(2, 0.25, 2), DyadicLattice(2, {0.0, 0.0}, -3, 0), kA2, 1), 2)
                  .substr(0, 39),
              "level,c0,c1,rho,inner_mass,psi_norm2,de");
}

TEST(Overlap, ExactCountMatchesEnumeration) {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int d = 1; d <= 3; ++d) {
        const DyadicLattice lat(d, std::vector<double>(d, 0.1), -3, 1);
        for (int t = 0; t < 40; ++t) {
            std::vector<double> y(d);
            for (double& x : y) x = u(rng);
            const int level = -3 + t % 5;
            const double A = 0.5 + 0.37 * t;
            const double side = DyadicLattice::side(level);
            std::vector<double> uu(d);
            for (int k = 0; k < d; ++k) uu[k] = (y[k] - 0.1) / side - 0.5;
            std::size_t brute = 0;
            const int R = static_cast<int>(std::ceil(A)) + 1;
            std::vector<int> c(d, -R);
            while (true) {
                double r2 = 0.0;
                for (int k = 0; k < d; ++k) {
                    const double diff = std::floor(uu[k]) + c[k] - uu[k];
                    r2 += diff * diff;
                }
                if (r2 < A * A) ++brute;
                int k = 0;
                while (k < d && ++c[k] > R) c[k++] = -R;
                if (k == d) break;
            }
            EXPECT_EQ(overlap_count_at(lat, y.data(), level, A), brute) << d << " " << t;
        }
    }
    std::mt19937_64 rng2(11);
    const auto mu = random_measure(rng2, 50, 2);
    const auto rep = overlap_count(mu, DyadicLattice(2, {0.0, 0.0}, -4, 0), kA2);
    EXPECT_GT(rep.max_count, 0u);
    EXPECT_LE(static_cast<double>(rep.max_count), rep.bound);
}

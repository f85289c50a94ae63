#include <gtest/gtest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>

#include "gmtlab/wolff.hpp"
#include "gmtlab/zoo.hpp"

using namespace gmtlab;

namespace {

DiscreteMeasure random_measure(std::mt19937_64& rng, int d, std::size_t n) {
    std::uniform_real_distribution<double> u(-1.0, 1.0), w(0.1, 2.0);
    std::vector<double> c(n * d), m(n);
    for (double& x : c) x = u(rng);
    for (double& x : m) x = w(rng);
    return DiscreteMeasure(d, c, m);
}

// Integrates the step integrand numerically, one smooth piece at a time, with the
// ball mass taken from a linear scan at the piece midpoint.
double wolff_by_quadrature(const DiscreteMeasure& mu, const WolffParams& w, const double* x) {
    std::vector<double> cuts{0.0};
    for (std::size_t j = 0; j < mu.size(); ++j) {
        const double r = distance(mu.point(j), x, mu.dim());
        if (r < w.r_max) cuts.push_back(r);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(w.r_max);
    double total = 0.0;
    for (std::size_t t = 0; t + 1 < cuts.size(); ++t) {
        const double a = cuts[t], b = cuts[t + 1];
        if (!(b > a)) continue;
        const double probe = std::isinf(b) ? 2.0 * a + 1.0 : 0.5 * (a + b);
        const double m = ball_mass_bruteforce(mu, x, probe);
        if (m == 0.0) continue;
        auto f = [&](double r) { return std::pow(m / std::pow(r, w.s), w.p) / r; };
        if (std::isinf(b))
            total += boost::math::quadrature::exp_sinh<double>().integrate([&](double t) { return f(a + t); }, 1e-12);
        else
            total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 10, 1e-12);
    }
    return total;
}

}  // namespace

TEST(Wolff, SingleAtomClosedForm) {
    const DiscreteMeasure atom(2, {0.0, 0.0}, {1.7});
    for (double p : {0.5, 1.0, 2.0, 3.0})
        for (double s : {0.5, 1.0, 1.5}) {
            const double x[2] = {0.6, 0.8};
            const double expect = std::pow(1.7, p) / (s * p * std::pow(1.0, s * p));
            EXPECT_NEAR(wolff_potential(atom, {p, s}, x), expect, 1e-14 * expect);
        }
}

TEST(Wolff, TrivialCases) {
    const DiscreteMeasure two(1, {0.0, 3.0}, {1.0, 2.0});
    const double x[1] = {10.0};
    EXPECT_EQ(wolff_potential(two, {2.0, 0.5, 5.0}, x), 0.0);
    const double at[1] = {3.0};
    EXPECT_TRUE(std::isinf(wolff_potential(two, {2.0, 0.5}, at)));
    EXPECT_TRUE(std::isfinite(wolff_potential(two, {2.0, 0.5}, at, 1)));
    EXPECT_EQ(wolff_potential(DiscreteMeasure(1, {}, {}), {2.0, 0.5}, x), 0.0);
    EXPECT_THROW(wolff_potential(two, {0.0, 0.5}, x), InvalidArgument);
}

TEST(Wolff, ClosedFormMatchesQuadrature) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> up(0.5, 3.0), uu(0.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const int d = 1 + t % 3;
        const auto mu = random_measure(rng, d, 1 + t % 20);
        WolffParams w{up(rng), (0.2 + 0.7 * uu(rng)) * d, t % 2 ? 1.5 : std::numeric_limits<double>::infinity()};
        std::vector<double> x(d);
        for (double& c : x) c = 2.0 * uu(rng) - 1.0;
        const double a = wolff_potential(mu, w, x.data());
        const double b = wolff_by_quadrature(mu, w, x.data());
        worst = std::max(worst, std::fabs(a - b) / std::max(b, 1e-300));
    }
    EXPECT_LE(worst, 1e-8);
}

TEST(Wolff, MonotoneInMass) {
    std::mt19937_64 rng(12);
    const auto mu = random_measure(rng, 2, 15);
    std::vector<double> w(mu.weights().begin(), mu.weights().end());
    w[3] += 0.5;
    const DiscreteMeasure more(2, std::vector<double>(mu.coords().begin(), mu.coords().end()), w);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int t = 0; t < 200; ++t) {
        const double x[2] = {u(rng), u(rng)};
        EXPECT_LE(wolff_potential(mu, {2.0, 1.0}, x), wolff_potential(more, {2.0, 1.0}, x));
    }
}

TEST(DyadicWolff, SingleAtomByEnumeration) {
    const DiscreteMeasure atom(2, {0.3, 0.7}, {1.0});
    const DyadicLattice lat(2, {0.0, 0.0}, -3, 2);
    const double p = 2.0, s = 1.0;
    double expect = 0.0;
    for (int k = -3; k <= 2; ++k) {
        // Count cubes near the atom whose half-open triple contains it.
        const CubeAddress home = lat.cube_of_point(atom.point(0), k);
        int count = 0;
        for (int dx = -3; dx <= 3; ++dx)
            for (int dy = -3; dy <= 3; ++dy) {
                CubeAddress q = home;
                q.coords[0] += dx;
                q.coords[1] += dy;
                if (in_triple(lat, q, atom.point(0))) ++count;
            }
        EXPECT_EQ(count, 9);
        expect += count * std::pow(std::exp2(-k * s), p);
    }
    EXPECT_NEAR(dyadic_wolff_sum(atom, lat, p, s), expect, 1e-13 * expect);
    EXPECT_EQ(dyadic_wolff_sum(DiscreteMeasure(2, {}, {}), lat, p, s), 0.0);
}

TEST(DyadicWolff, JointRescalingScalesWithMass) {
    // Densities are invariant; the masses carry the factor lambda^s.
    const auto mu = cantor_measure(2, 0.25, 4);
    const DyadicLattice lat(2, {0.0, 0.0}, -10, 1);
    const double s = 1.0;
    const double a = dyadic_wolff_sum(mu, lat, 2.0, s);
    const auto big = mu.scaled(8.0, std::pow(8.0, s));
    const double b = dyadic_wolff_sum(big, lat.rescaled(3), 2.0, s);
    EXPECT_NEAR(b, 8.0 * a, 1e-12 * b);
}

TEST(DyadicWolff, ComparableToContinuousIntegral) {
    // Two-sided comparability across refinement levels; constants are only bounded loosely.
    for (int level : {3, 4, 5}) {
        const auto mu = cantor_measure(2, 0.25, level);
        const auto [kmin, kmax] = DyadicLattice::default_window(mu);
        const DyadicLattice lat(2, {0.0, 0.0}, kmin, kmax);
        const double dyadic = dyadic_wolff_sum(mu, lat, 2.0, 1.0);
        const double cont = wolff_integral(mu, {2.0, 1.0});
        EXPECT_LT(dyadic / cont, 100.0);
        EXPECT_GT(dyadic / cont, 0.01);
    }
}

TEST(Mpv, PointsInCubeAgreeWithCubeOfPoint) {
    std::mt19937_64 rng(13);
    const auto mu = random_measure(rng, 2, 500);
    const DyadicLattice lat(2, {0.1, -0.2}, -5, 1);
    for (int k : {-3, -1, 0}) {
        std::size_t total = 0;
        std::vector<CubeAddress> seen;
        for (std::size_t i = 0; i < mu.size(); ++i) seen.push_back(lat.cube_of_point(mu.point(i), k));
        std::sort(seen.begin(), seen.end());
        seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
        for (const auto& q : seen) {
            const auto idx = points_in_cube(mu, lat, q);
            for (std::size_t i : idx) EXPECT_EQ(lat.cube_of_point(mu.point(i), k), q);
            total += idx.size();
        }
        EXPECT_EQ(total, mu.size());
    }
}

TEST(Mpv, Examples) {
    const DyadicLattice lat(1, {0.0}, -4, 2);
    const DiscreteMeasure atom(1, {0.5}, {2.0});
    const auto one = mpv_condition_test(atom, lat, {lat.cube_of_point(atom.point(0), 0)}, 0.5);
    EXPECT_FALSE(one.vacuous);
    EXPECT_EQ(one.sup, 0.0);
    // Two unit atoms at distance a = 0.1 in a unit cube (diameter 10a).
    const DiscreteMeasure two(1, {0.2, 0.3}, {1.0, 1.0});
    for (double s : {0.3, 0.5, 0.8}) {
        const auto rep = mpv_condition_test(two, lat, {lat.cube_of_point(two.point(0), 0)}, s);
        const double a = 0.3 - 0.2;
        const double expect = (std::pow(a, -2 * s) - std::pow(1.0, -2 * s)) / (2 * s);
        EXPECT_NEAR(rep.sup, expect, 1e-12 * expect);
        ASSERT_TRUE(rep.witness.has_value());
    }
    CubeAddress empty = lat.cube_of_point(two.point(0), 0);
    empty.coords[0] += 5;
    EXPECT_TRUE(mpv_condition_test(two, lat, {empty}, 0.5).vacuous);
}

namespace {

std::vector<double> mpv_ladder(double lambda, int lo, int hi) {
    std::vector<double> sups;
    for (int level = lo; level <= hi; ++level) {
        const auto mu = cantor_measure(2, lambda, level);
        const int bottom = static_cast<int>(std::floor(level * std::log2(lambda))) - 1;
        const DyadicLattice lat(2, {0.0, 0.0}, bottom, 0);
        std::vector<CubeAddress> cubes;
        for (int k = bottom; k <= 0; ++k)
            for (std::size_t i = 0; i < mu.size(); ++i) cubes.push_back(lat.cube_of_point(mu.point(i), k));
        std::sort(cubes.begin(), cubes.end());
        cubes.erase(std::unique(cubes.begin(), cubes.end()), cubes.end());
        sups.push_back(mpv_condition_test(mu, lat, cubes, 1.0).sup);
    }
    return sups;
}

}  // namespace

TEST(Mpv, SubcriticalCantorLadderStabilises) {
    // lambda = 0.35 gives dimension about 1.32 > s = 1, so mu(B(x,r))/r^s decays at small r.
    const auto sups = mpv_ladder(0.35, 3, 6);
    // Levels 3..6; the drift is checked beyond level 4.
    for (std::size_t t = 2; t < sups.size(); ++t) EXPECT_LT(std::fabs(sups[t] / sups[t - 1] - 1.0), 0.1) << t;
}

TEST(Mpv, CriticalCantorLadderGrowsLogarithmically) {
    // lambda = 1/4 is 1-dimensional: mu(B(x,r)) ~ r, so W_2 gains a fixed amount per level.
    const auto sups = mpv_ladder(0.25, 3, 6);
    const double step1 = sups[2] - sups[1], step2 = sups[3] - sups[2];
    EXPECT_GT(step1, 0.0);
    EXPECT_NEAR(step2 / step1, 1.0, 0.2);
}

TEST(TruncatedBound, TrivialCases) {
    const auto K = KernelSpec::riesz(2, 1.0);
    const DiscreteMeasure atom(2, {0, 0}, {1});
    const auto one = truncated_bound_check(atom, K, {0.1, 1.0});
    EXPECT_EQ(one.max_ratio, 0.0);
    EXPECT_EQ(one.rhs, 0.0);
    const DiscreteMeasure two(2, {0, 0, 1, 0}, {1, 1});
    const auto rep = truncated_bound_check(two, K, {2.0, 0.5});
    EXPECT_EQ(rep.entries[0].lhs, 0.0);
    EXPECT_DOUBLE_EQ(rep.entries[1].lhs, 2.0);
    EXPECT_DOUBLE_EQ(rep.rhs, 2.0 / 2.0);
    EXPECT_FALSE(rep.violation);
    EXPECT_THROW(truncated_bound_check(DiscreteMeasure(2, {}, {}), K), InvalidArgument);
}

TEST(TruncatedBound, MatchesDoubleLoop) {
    std::mt19937_64 rng(14);
    const auto mu = random_measure(rng, 2, 40);
    const auto K = KernelSpec::planar_conjugate();
    const std::vector<double> grid{0.05, 0.2, 0.7};
    const auto rep = truncated_bound_check(mu, K, grid);
    for (std::size_t t = 0; t < grid.size(); ++t) {
        double lhs = 0.0;
        for (std::size_t i = 0; i < mu.size(); ++i) {
            double f[2] = {0, 0};
            for (std::size_t j = 0; j < mu.size(); ++j) {
                if (distance(mu.point(i), mu.point(j), 2) <= grid[t]) continue;
                const double v[2] = {mu.point(i)[0] - mu.point(j)[0], mu.point(i)[1] - mu.point(j)[1]};
                double k[2];
                K.eval(v, k);
                f[0] += k[0] * mu.weight(j);
                f[1] += k[1] * mu.weight(j);
            }
            lhs += mu.weight(i) * (f[0] * f[0] + f[1] * f[1]);
        }
        EXPECT_NEAR(rep.entries[t].lhs, lhs, 1e-11 * lhs);
    }
}

TEST(TripleSums, U1DominationByEnumeration) {
    std::mt19937_64 rng(15);
    for (int t = 0; t < 40; ++t) {
        const int d = 1 + t % 3;
        const auto mu = random_measure(rng, d, 3 + t % 13);
        const double s = 0.3 + 0.6 * (t % 4) / 3.0 * d;
        const auto K = KernelSpec::riesz(d, std::min(s, d - 0.05));
        const auto rep = u1_triple_sums(mu, K, 0.05);
        EXPECT_EQ(rep.violations, 0u);
        EXPECT_LE(rep.pairing, rep.constant * rep.restricted * (1 + 1e-12));
        EXPECT_LE(rep.restricted, rep.enlarged);
        // Each ordered pair (y, z) enters int W_2 dnu as max(|x-y|, |x-z|)^{-2s} / (2s).
        EXPECT_LE(rep.enlarged, 2 * K.s() * rep.wolff * (1 + 1e-12));
        EXPECT_GE(rep.enlarged, K.s() * rep.wolff * (1 - 1e-12));
    }
}

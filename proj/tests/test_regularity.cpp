#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gmtlab/regularity.hpp"
#include "gmtlab/zoo.hpp"

using namespace gmtlab;

namespace {

Graph random_tree(std::mt19937_64& rng, std::size_t n) {
    Graph g(n);
    for (std::size_t v = 1; v < n; ++v) g.add_edge(v, std::uniform_int_distribution<std::size_t>(0, v - 1)(rng));
    return g;
}

Graph random_bounded(std::mt19937_64& rng, std::size_t n, std::size_t D) {
    Graph g(n);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t t = 0; t < 2 * n; ++t) {
        const std::size_t u = pick(rng), v = pick(rng);
        if (u != v && g.neighbors(u).size() < D && g.neighbors(v).size() < D) g.add_edge(u, v);
    }
    return g;
}

std::vector<double> random_nu(std::mt19937_64& rng, std::size_t n, int mode) {
    std::vector<double> nu(n);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (double& v : nu) {
        if (mode == 0) v = u(rng);
        if (mode == 1) v = std::floor(4 * u(rng));           // many ties
        if (mode == 2) v = std::exp2(-20 * u(rng));          // wide range
        if (mode == 3) v = u(rng) < 0.05 ? 100 * u(rng) : 0;  // spikes
    }
    return nu;
}

}  // namespace

TEST(Graph, Basics) {
    Graph g(4);
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    g.add_edge(1, 2);
    EXPECT_EQ(g.max_degree(), 2u);
    std::vector<std::size_t> order;
    EXPECT_EQ(g.bfs(0, &order), std::vector<int>({0, 1, 2, -1}));
    EXPECT_EQ(order, std::vector<std::size_t>({0, 1, 2}));
    EXPECT_THROW(g.add_edge(0, 0), InvalidArgument);
    EXPECT_THROW(g.add_edge(0, 9), InvalidArgument);
}

TEST(Seniors, PathExample) {
    Graph g(3);
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    const std::vector<double> nu{1, 8, 1};
    const auto r = senior_vertices(g, nu, 1.0);
    EXPECT_EQ(r.seniors, std::vector<std::size_t>({1}));
    EXPECT_EQ(r.star, std::vector<std::size_t>({1, 1, 1}));
    EXPECT_EQ(r.best[0], 4.0);
}

TEST(Seniors, ConstantNuAllSenior) {
    std::mt19937_64 rng(1);
    const Graph g = random_tree(rng, 50);
    const std::vector<double> nu(50, 2.5);
    const auto rep = domination_check(g, nu, 3.0);
    EXPECT_EQ(rep.seniors.seniors.size(), 50u);
    EXPECT_EQ(rep.ratio, 1.0);
}

TEST(Seniors, PrunedEqualsBruteForce) {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 120; ++t) {
        const std::size_t n = 2 + (t * 37) % 499;
        const Graph g = t % 2 ? random_tree(rng, n) : random_bounded(rng, n, 2 + t % 5);
        const auto nu = random_nu(rng, n, t % 4);
        const double M = 0.5 + (t % 7) * 0.5;
        const auto a = senior_vertices(g, nu, M);
        const auto b = senior_vertices_bruteforce(g, nu, M);
        ASSERT_EQ(a.seniors, b.seniors) << t;
        ASSERT_EQ(a.star, b.star) << t;
        ASSERT_EQ(a.best, b.best) << t;
    }
}

TEST(Seniors, FixedPointAndTriangleConsistency) {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 30; ++t) {
        const std::size_t n = 20 + t * 7;
        const Graph g = random_bounded(rng, n, 4);
        const auto nu = random_nu(rng, n, t % 4);
        const double M = 2.5;
        const auto r = senior_vertices(g, nu, M);
        for (std::size_t x = 0; x < n; ++x) {
            EXPECT_EQ(r.star[r.star[x]], r.star[x]);
            const auto dist = g.bfs(x);
            for (std::size_t z = 0; z < n; ++z)
                if (dist[z] >= 0) EXPECT_GE(r.best[x], nu[z] * std::exp2(-M * dist[z]));
        }
    }
}

TEST(Domination, SpikeOnRegularTree) {
    // D-regular tree truncated at depth 5, single spike at the root.
    for (std::size_t D : {3u, 4u}) {
        Graph g(1);
        std::vector<std::size_t> frontier{0};
        std::vector<std::pair<std::size_t, std::size_t>> edges;
        std::size_t next = 1;
        for (int depth = 0; depth < 5; ++depth) {
            std::vector<std::size_t> grown;
            for (std::size_t u : frontier)
                for (std::size_t c = 0; c < (u == 0 ? D : D - 1); ++c) {
                    edges.emplace_back(u, next);
                    grown.push_back(next++);
                }
            frontier = grown;
        }
        Graph tree(next);
        for (auto [u, v] : edges) tree.add_edge(u, v);
        std::vector<double> nu(next, 0.0);
        nu[0] = 1.0;
        const double M = std::ceil(std::log2(static_cast<double>(D))) + 1.0;
        const auto rep = domination_check(tree, nu, M);
        EXPECT_TRUE(rep.hypothesis);
        EXPECT_LE(rep.ratio, 1.0 / (1.0 - std::exp2(-M) * D));
        EXPECT_EQ(rep.pointwise_violations, 0u);
        EXPECT_EQ(rep.cluster_violations, 0u);
    }
}

TEST(Domination, RandomInstancesHaveNoViolations) {
    std::mt19937_64 rng(4);
    int with_hypothesis = 0;
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 2 + (t * 53) % 300;
        const Graph g = t % 3 ? random_bounded(rng, n, 2 + t % 4) : random_tree(rng, n);
        const auto nu = random_nu(rng, n, t % 4);
        const double M = 1.0 + t % 4;
        const auto rep = domination_check(g, nu, M);
        EXPECT_EQ(rep.pointwise_violations, 0u);
        EXPECT_EQ(rep.cluster_violations, 0u);
        if (rep.hypothesis) {
            ++with_hypothesis;
            EXPECT_LE(rep.ratio, rep.cluster_factor * (1 + 1e-12));
        }
    }
    EXPECT_GT(with_hypothesis, 50);
}

TEST(CubeGraph, DegreeAndM) {
    EXPECT_EQ(cube_degree_bound(1), 5);
    EXPECT_EQ(cube_degree_bound(2), 9);
    EXPECT_EQ(smallest_cube_M(1), 3);
    EXPECT_EQ(smallest_cube_M(2), 4);
    EXPECT_EQ(smallest_cube_M(3), 4);
}

TEST(CubeGraph, SeniorsMatchAllPairs) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0, 1);
    for (int t = 0; t < 6; ++t) {
        const int d = 1 + t % 2;
        std::vector<double> c(40 * d), w(40);
        for (double& x : c) x = u(rng);
        for (double& x : w) x = 0.1 + u(rng);
        const DiscreteMeasure mu(d, c, w);
        const DyadicLattice lat(d, std::vector<double>(d, 0.0), -6, 1);
        const auto table = populated_cubes(mu, lat, 0.7 * d);
        const double M = smallest_cube_M(d), p = 2.0;
        const auto cs = cube_senior_vertices(table, p, M);
        for (std::size_t i = 0; i < table.size(); ++i) {
            std::size_t star = i;
            double best = cs.nu[i];
            int best_d = 0;
            for (std::size_t j = 0; j < table.size(); ++j) {
                const int dist = lat.distance(table.cube(i), table.cube(j));
                const double val = cs.nu[j] * std::exp2(-M * dist);
                if (val > best || (val == best && (dist < best_d || (dist == best_d && j < star)))) {
                    best = val;
                    star = j;
                    best_d = dist;
                }
            }
            ASSERT_EQ(cs.star[i], star) << t << " " << i;
        }
    }
}

TEST(EpsilonRegular, SyntheticTables) {
    const DyadicLattice lat(1, {0.0}, -3, 0);
    std::vector<CubeAddress> cubes;
    std::vector<CubeDensity> vals;
    for (int k = -3; k <= 0; ++k)
        for (int c = 0; c < 3; ++c) {
            CubeAddress q{k, 1, {c}, 0};
            cubes.push_back(q);
            vals.push_back({std::ldexp(1.0, k), 1.0});
        }
    const DensityTable equal(lat, 1.0, cubes, vals);
    EXPECT_EQ(epsilon_regular_cubes(equal, 0.01, 10).size(), equal.size());
    vals[0].density = 0.0;
    const DensityTable hole(lat, 1.0, cubes, vals);
    const auto reg = epsilon_regular_cubes(hole, 0.01, 10);
    EXPECT_EQ(reg.size(), hole.size() - 1);
    EXPECT_FALSE(hole.find(cubes[0]).has_value() && std::find(reg.begin(), reg.end(), *hole.find(cubes[0])) != reg.end());
}

TEST(EpsilonRegular, MatchesAllPairsAndIsMonotone) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<double> c(120), w(60);
    for (double& x : c) x = u(rng);
    for (double& x : w) x = 0.1 + u(rng);
    const DiscreteMeasure mu(2, c, w);
    const DyadicLattice lat(2, {0.0, 0.0}, -6, 1);
    const auto table = populated_cubes(mu, lat, 1.0);
    std::vector<std::size_t> prev;
    for (double eps : {0.2, 0.5, 1.0, 2.0}) {
        const auto reg = epsilon_regular_cubes(table, eps, 3);
        std::vector<std::size_t> oracle;
        for (std::size_t i = 0; i < table.size(); ++i) {
            bool ok = true;
            for (std::size_t j = 0; j < table.size(); ++j) {
                const int dist = lat.distance(table.cube(i), table.cube(j));
                if (dist <= 3 && table.value(j).density > std::exp2(eps * dist) * table.value(i).density * (1 + 1e-12))
                    ok = false;
            }
            if (ok) oracle.push_back(i);
        }
        EXPECT_EQ(reg, oracle);
        EXPECT_TRUE(std::includes(reg.begin(), reg.end(), prev.begin(), prev.end()));
        prev = reg;
    }
}

TEST(EpsilonRegular, FlatLineCubesOnTheSupport) {
    const double h = 1.0 / 256;
    const double L = 8.0;
    const auto mu = plane_measure(2, 1, h, L);
    // Scales from 10h to a tenth of the length.
    const int lo = static_cast<int>(std::ceil(std::log2(10 * h))), hi = static_cast<int>(std::floor(std::log2(0.1 * L)));
    const DyadicLattice lat(2, {0.0, 0.0}, lo, hi);
    const auto table = populated_cubes(mu, lat, 1.0);
    const auto reg = epsilon_regular_cubes(table, 0.1, 4);
    std::size_t on_support = 0;
    for (std::size_t i = 0; i < table.size(); ++i) {
        const CubeAddress& q = table.cube(i);
        const auto ctr = lat.center(q);
        const double half = 0.5 * DyadicLattice::side(q.level);
        // Cube meets the line and stays well inside the segment.
        if (std::fabs(ctr[1]) > half || std::fabs(ctr[0]) > 0.5 * L - 16 * half) continue;
        ++on_support;
        EXPECT_TRUE(std::binary_search(reg.begin(), reg.end(), i)) << to_string(q);
    }
    EXPECT_GT(on_support, 20u);
}

TEST(Chain, EmptyAndSingleAtom) {
    const DyadicLattice lat(2, {0.0, 0.0}, -4, 1);
    const auto empty = senior_regular_chain_check(DiscreteMeasure(2, {}, {}), lat, 1.0, 4, 2);
    EXPECT_TRUE(empty.vacuous);
    EXPECT_TRUE(empty.violations.empty());
    const DiscreteMeasure atom(2, {0.3, 0.4}, {1.0});
    const auto rep = senior_regular_chain_check(atom, lat, 1.0, 4, 2);
    EXPECT_TRUE(rep.violations.empty());
    EXPECT_GT(rep.seniors, 0u);
    for (std::size_t i : rep.detail.seniors) EXPECT_EQ(rep.detail.star[i], i);
    const auto top = static_cast<std::size_t>(std::max_element(rep.detail.nu.begin(), rep.detail.nu.end()) - rep.detail.nu.begin());
    EXPECT_TRUE(std::find(rep.detail.seniors.begin(), rep.detail.seniors.end(), top) != rep.detail.seniors.end());
    EXPECT_LE(rep.domination_ratio, rep.domination_bound + 0.01);
}

TEST(Chain, CantorAndSegment) {
    for (int level = 4; level <= 5; ++level) {
        const auto mu = cantor_measure(2, 0.25, level);
        const auto [kmin, kmax] = DyadicLattice::default_window(mu);
        const DyadicLattice lat(2, {0.0, 0.0}, kmin, kmax);
        const auto rep = senior_regular_chain_check(mu, lat, 1.0, smallest_cube_M(2), 2.0);
        EXPECT_TRUE(rep.violations.empty());
        EXPECT_LE(rep.domination_ratio, rep.domination_bound + 0.01);
        EXPECT_GE(rep.regular_total, rep.senior_total);
    }
    const auto seg = segment_measure(200, 2);
    const auto [kmin, kmax] = DyadicLattice::default_window(seg);
    const DyadicLattice lat(2, {0.0, 0.0}, kmin, kmax);
    const auto rep = senior_regular_chain_check(seg, lat, 1.0, smallest_cube_M(2), 2.0);
    EXPECT_TRUE(rep.violations.empty());
    EXPECT_LE(rep.domination_ratio, rep.domination_bound + 0.01);
}

TEST(Chain, Csv) {
    const DiscreteMeasure atom(1, {0.3}, {1.0});
    const DyadicLattice lat(1, {0.0}, -2, 0);
    const auto table = populated_cubes(atom, lat, 0.5);
    const auto cs = cube_senior_vertices(table, 2.0, 3.0);
    const std::string csv = seniors_csv(table, cs);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "level,c0,nu,star_level,star_c0,boundary_suspect");
    EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), cs.seniors.size() + 1);
}
